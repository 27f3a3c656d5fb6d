use std::path::PathBuf;

use thiserror::Error;
use warplab_core::LabError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("solver error: {0}")]
    Solver(#[from] LabError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for everything the
    /// solvers or the filesystem report.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Solver(_) | CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn at(line: usize, msg: impl Into<String>) -> Self {
        CliError::Config { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
