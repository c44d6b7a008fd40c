use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("elements belong to different fields")]
    MixedFields,

    #[error("division by zero in a finite field")]
    ZeroInverse,

    #[error("set is not closed under conjugation")]
    NotClosed,

    #[error("orbit search exceeded cap of {0} elements")]
    Indeterminate(usize),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
