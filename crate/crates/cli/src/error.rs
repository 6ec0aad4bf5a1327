use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: levy_scale::Error,
    },

    /// Artifacts were written but a self-check exceeded its threshold.
    #[error("run marked FAILED: {0}")]
    ChecksFailed(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<levy_scale::Error> for CliError {
    fn from(e: levy_scale::Error) -> Self {
        CliError::Numerical { context: "computation".into(), source: e }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical { source, .. } if is_input_error(source) => 2,
            CliError::Numerical { .. } | CliError::ChecksFailed(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

fn is_input_error(e: &levy_scale::Error) -> bool {
    matches!(e, levy_scale::Error::InvalidModel(_) | levy_scale::Error::InvalidArgument(_) | levy_scale::Error::Unsupported(_))
}

/// Attaches a config path to library errors.
pub trait Context<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError>;
}

impl<T> Context<T> for levy_scale::Result<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical { context: what.to_string(), source })
    }
}
