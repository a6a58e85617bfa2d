use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected configuration; names the offending key.
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("config: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] z3pf::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { key: key.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Io { .. } | Self::Write { .. } => ExitCode::from(3),
            Self::Config { .. } | Self::Parse(_) | Self::Core(_) => ExitCode::from(2),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
