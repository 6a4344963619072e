//! CLI error classification. Exit codes: 0 success, 1 usage/config
//! error, 2 data error, 3 numerical failure.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Data(format!("{}: {err}", path.display()))
    }
}

impl From<emogan_core::Error> for CliError {
    fn from(err: emogan_core::Error) -> CliError {
        use emogan_core::Error as E;
        match err {
            E::NonFinite(_) => CliError::Numeric(err.to_string()),
            E::InvalidParameter { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
