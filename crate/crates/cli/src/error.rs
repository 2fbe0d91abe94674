use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;
/// Computation failures that are neither bad input nor IO.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Parameter(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] lapbc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lapbc_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parameter(_) => EXIT_VALIDATION,
            CliError::Write { .. } | CliError::Csv(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::Io { .. } => EXIT_IO,
                E::Parse(_)
                | E::Validation(_)
                | E::UnknownFamily(_)
                | E::Parameter(_)
                | E::UnknownVertex(_)
                | E::Asymmetry(_)
                | E::EmptySet
                | E::SizeCap(_)
                | E::Coverage(_)
                | E::NonReal(_)
                | E::NotCauchy(_) => EXIT_VALIDATION,
                E::NoConvergence(_) => EXIT_FAILURE,
            },
        }
    }
}
