use std::path::PathBuf;

use thiserror::Error;

/// Failure of a harness command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration, tagged with the offending key path.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] kgdefect::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration and input errors, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(kgdefect::Error::BlowUp { .. }) | CliError::Numerical(_) => 3,
            CliError::Core(kgdefect::Error::Io(_)) | CliError::Io { .. } | CliError::Csv { .. } => {
                1
            }
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
