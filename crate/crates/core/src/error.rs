use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A real-valued argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Probabilities that are negative or do not sum to one.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("coordinate error: {0}")]
    Coordinate(String),

    #[error("mismatched outcome spaces: {0}")]
    MismatchedSpace(String),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// Hash dimensions outside `1 <= l <= n`.
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("non-positive rate: {0}")]
    RateNonPositive(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// Exhaustive computations requested beyond their tractable size.
    #[error("scale error: {0}")]
    Scale(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}
