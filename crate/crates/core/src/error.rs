use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("step sizes violate beta*rho*|C|^2 < 1 (beta={beta}, rho={rho}, |C|={norm})")]
    StepSize { beta: f64, rho: f64, norm: f64 },

    #[error("iteration diverged at step {iteration} (|u|_inf = {magnitude})")]
    Diverged { iteration: usize, magnitude: f64 },

    #[error("both classes must be present (n+ = {positives}, n- = {negatives})")]
    SingleClass { positives: usize, negatives: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
