use thiserror::Error;

/// Errors raised by the exact constructors, verifiers and the numeric recognizer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("value does not fit in a floating-point number")]
    Overflow,

    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("variable count {0} outside 1..=64")]
    VariableCount(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("r = {r} exceeds the admissible maximum {max}")]
    TooLarge { r: usize, max: usize },

    #[error("family is not symmetric")]
    NotSymmetric,

    #[error("degenerate family: {0}")]
    Degenerate(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("polynomial is not a homogeneous quadratic form")]
    NotQuadratic,

    #[error("matrix is not orthogonal")]
    NotOrthogonal,

    #[error("not exactly representable in Q(sqrt2, sqrt3): {0}")]
    NotRepresentable(String),

    #[error("input rejected: {0}")]
    Invariant(String),

    #[error("zero input")]
    ZeroInput,

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("tolerance violated: {0}")]
    Tolerance(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
