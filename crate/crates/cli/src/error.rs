use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    /// Prefixes the message with the run it came from.
    pub fn context(self, run: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{run}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{run}: {m}")),
            io => io,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<twoatom::Error> for CliError {
    fn from(e: twoatom::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
