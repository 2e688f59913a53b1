use serde::Serialize;
use thiserror::Error;

use covdc::ErrorKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] covdc::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What gets printed to stderr and written to `error.json`.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub kind: &'static str,
    pub exit_code: u8,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Argument => 2,
                ErrorKind::Budget => 3,
                ErrorKind::Precondition => 4,
                ErrorKind::Numerical => 1,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (error, kind) = match self {
            CliError::Usage(_) => ("Usage".to_string(), "argument"),
            CliError::Core(e) => (
                e.code().to_string(),
                match e.kind() {
                    ErrorKind::Argument => "argument",
                    ErrorKind::Budget => "budget",
                    ErrorKind::Precondition => "precondition",
                    ErrorKind::Numerical => "numerical",
                },
            ),
            CliError::Io(_) => ("Io".into(), "io"),
            CliError::Csv(_) => ("Csv".into(), "io"),
            CliError::Json(_) => ("Json".into(), "io"),
        };
        ErrorRecord { error, kind, exit_code: self.exit_code(), message: self.to_string() }
    }
}
