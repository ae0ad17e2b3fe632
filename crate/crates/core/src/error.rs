use alloc::string::String;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two operands disagree on a dimension.
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A weight `1 / (ρ + (xᵢ'w)²)` divides by zero.
    #[error("singular weight at row {row}: rho + (x'w)^2 = 0")]
    Singular { row: usize },

    /// The requested value lies outside the range the function can attain.
    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// The requested operation is not supported for this input shape.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A power step produced a zero vector.
    #[error("degenerate power step: ||v|| = 0")]
    DegenerateStep,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
