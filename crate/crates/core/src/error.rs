use thiserror::Error;

/// Errors raised by the exact and numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("square root of a negative number {0}")]
    NegativeSqrt(String),

    #[error("integer too large for square-free factorisation: {0}")]
    Overflow(String),

    #[error("factor {0} is not positive semidefinite")]
    NotPsd(String),

    #[error("{what} exceeds cap ({value} > {cap})")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no valid sample after {0} tries")]
    TriesExhausted(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
