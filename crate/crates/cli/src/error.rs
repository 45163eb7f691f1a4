use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{context}: {source}")]
    Compute {
        context: String,
        source: cdising::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Compute {
                source: cdising::Error::InvalidArgument(_),
                ..
            } => 2,
            CliError::Compute { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

/// Adds run parameters to a core error.
pub trait Context<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for cdising::Result<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Compute {
            context: f(),
            source,
        })
    }
}
