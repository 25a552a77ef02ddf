use thiserror::Error;

use crate::commands::status_of;

/// CLI failures, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration (exit 1).
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested point has no physical answer, e.g. no steady state (exit 2).
    #[error("physical-domain error [{status}]: {message}")]
    Domain { status: &'static str, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain { .. } => 2,
            CliError::Config(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<unravel_core::Error> for CliError {
    fn from(e: unravel_core::Error) -> Self {
        match e {
            unravel_core::Error::Config(msg) => CliError::Config(msg),
            e if e.is_physical_domain() => CliError::Domain {
                status: status_of(&e),
                message: e.to_string(),
            },
            e => CliError::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
