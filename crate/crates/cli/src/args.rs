use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lapbc", version, about = "Laplacians on weighted graphs: truncations, heat flow, completeness indicators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertex counts and sup of the weighted degree along balls.
    Inspect(Common),
    /// Bottom of the spectrum and spectral radius of Dirichlet ball truncations.
    Spectrum(Common),
    /// Diagonal heat kernel and heat mass at the root.
    Heat(Common),
    /// Solutions of (L + 1)u = 0 and the Neumann/Dirichlet resolvent gap.
    Harmonic(Common),
    /// Stochastic completeness indicators.
    Sc(Common),
    /// Path metric and ray probes.
    Metric(Common),
    /// Brute-force Cheeger constant of a ball.
    Cheeger(Common),
    /// Worked example on Z with a summable measure.
    Example4(Example4Args),
    /// Regular tree with finite total measure.
    #[command(name = "appendixA", alias = "appendix-a")]
    AppendixA(AppendixArgs),
    /// Invariant suite over the built-in family matrix.
    Selftest(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Graph file (JSON) or family descriptor such as `regular-tree:k=3`.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance for iterative and spectral solvers.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when the verdict is inconclusive.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Debug, Args)]
pub struct Example4Args {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub rho: f64,
    /// Amplitude of the measure profile; defaults to (1 - rho)/(1 + rho), which
    /// makes the total measure 1.
    #[arg(long)]
    pub amp: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub window: i64,
}

#[derive(Clone, Debug, Args)]
pub struct AppendixArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
}
