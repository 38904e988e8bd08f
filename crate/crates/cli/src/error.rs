use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const INTERNAL: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const ORDER_FAILS: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: line {line}, column {column}: {message}", path.display())]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lib(#[from] stochorder::error::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use stochorder::error::Error as E;
        match self {
            CliError::Lib(E::NoConvergence { .. }) => exit::INTERNAL,
            _ => exit::INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
