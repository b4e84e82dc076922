use std::io;

use okmedian_core::Error as CoreError;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{source_name}:{line}: {msg}")]
    Parse { source_name: String, line: usize, msg: String },
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    /// A check made outside the core pipelines failed.
    #[error("check failed: {0}")]
    Violation(String),
    #[error("report: {0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Violation(_) => EXIT_CERTIFICATE,
            CliError::Core(e) => match e {
                CoreError::Certificate { .. } => EXIT_CERTIFICATE,
                CoreError::OracleCap { .. } | CoreError::GuessCap { .. } => EXIT_CAP,
                CoreError::Metric(_)
                | CoreError::LengthMismatch { .. }
                | CoreError::InvalidWeights(_)
                | CoreError::InvalidParameter(_) => EXIT_USAGE,
                _ => 1,
            },
            CliError::Io(_) | CliError::Report(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Report(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Report(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
