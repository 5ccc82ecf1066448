//! CLI error type carrying the process exit code contract:
//! 0 success / optimal, 1 valid-but-suboptimal (verify), 2 invalid input.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("JSON error in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<fidopt::Error> for CliError {
    fn from(e: fidopt::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub type CliResult<V> = std::result::Result<V, CliError>;
