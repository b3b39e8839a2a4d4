use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("time step {step} is outside the horizon [0, {horizon}]")]
    OutOfHorizon { step: usize, horizon: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large for exact solver: {work} state-steps exceeds the ceiling of {ceiling}")]
    TooLarge { work: u128, ceiling: u128 },

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate record for id {id} at frame {frame}")]
    DuplicateRecord { frame: i64, id: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
