mod args;
mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::Outcome;
use error::{CliError, EXIT_FAILURE, EXIT_INCONCLUSIVE, EXIT_USAGE};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LAPBC_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Parameter(format!("LAPBC_THREADS must be a positive integer, got `{raw}`")))?;
    // only fails if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn render(out: &Outcome) -> Result<Vec<u8>, CliError> {
    match out.config.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&out.envelope()).expect("reports serialize");
            text.push('\n');
            Ok(text.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.series.header)?;
            for row in &out.series.rows {
                w.write_record(row)?;
            }
            Ok(w.into_inner().map_err(|e| CliError::Write { path: "<csv buffer>".into(), source: e.into_error() })?)
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let outcome = match &cli.command {
        Command::Inspect(c) => commands::inspect(c)?,
        Command::Spectrum(c) => commands::spectrum(c)?,
        Command::Heat(c) => commands::heat(c)?,
        Command::Harmonic(c) => commands::harmonic(c)?,
        Command::Sc(c) => commands::sc(c)?,
        Command::Metric(c) => commands::metric(c)?,
        Command::Cheeger(c) => commands::cheeger(c)?,
        Command::Example4(a) => commands::example4(a)?,
        Command::AppendixA(a) => commands::appendix_a(a)?,
        Command::Selftest(c) => commands::selftest(c)?,
    };
    let bytes = render(&outcome)?;
    let target = match &cli.command {
        Command::Example4(a) => a.common.out.clone(),
        Command::AppendixA(a) => a.common.out.clone(),
        Command::Inspect(c)
        | Command::Spectrum(c)
        | Command::Heat(c)
        | Command::Harmonic(c)
        | Command::Sc(c)
        | Command::Metric(c)
        | Command::Cheeger(c)
        | Command::Selftest(c) => c.out.clone(),
    };
    match target {
        Some(path) => std::fs::write(&path, &bytes).map_err(|source| CliError::Write { path, source })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })?;
        }
    }
    Ok(if outcome.failed {
        EXIT_FAILURE
    } else if outcome.config.strict && outcome.inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
