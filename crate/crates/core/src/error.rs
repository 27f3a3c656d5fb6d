use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid warping profile at r = {at}: {reason}")]
    InvalidProfile { at: f64, reason: String },

    #[error("invalid ball: {0}")]
    InvalidBall(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("evaluation at a singular point: {0}")]
    Singular(String),

    #[error("point outside the admissible domain: {0}")]
    OutOfDomain(String),

    #[error("mode k = {k} exceeds the supported limit K_max = {limit}")]
    ModeLimit { k: usize, limit: usize },

    #[error("{what} did not converge (achieved {achieved:.3e})")]
    Nonconvergence { what: String, achieved: f64 },

    #[error("function is not positive: minimum {min:.6e} at {location}")]
    NotPositive { min: f64, location: String },

    #[error("tridiagonal solve failed at row {row}")]
    Tridiagonal { row: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
