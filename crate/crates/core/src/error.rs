use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid range: lower bound {lo} must be strictly below upper bound {hi}")]
    InvalidRange { lo: String, hi: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("malformed expression: {0}")]
    Malformed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no monotone path: {0}")]
    NoPath(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
