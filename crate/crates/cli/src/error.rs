use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Design(#[from] multibeam::Error),

    #[error(
        "verification failed: max |delta| = {max_delta_db:.4} dB exceeds the tolerance of {tolerance_db} dB"
    )]
    Tolerance {
        max_delta_db: f64,
        tolerance_db: f64,
    },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 config or validation error, 2 design rejected
    /// (infeasible, scan limit, beam layout), 3 verification tolerance exceeded.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Csv(_) => 1,
            CliError::Design(e) if e.is_design_rejection() => 2,
            CliError::Design(_) => 1,
            CliError::Tolerance { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
