use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Structural problem with the input (unknown ids, conflicting
    /// intersection entries, ...). Not a mathematical inconsistency.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("fiber `{name}` failed validation: {failures}")]
    InvalidFiber { name: String, failures: String },

    #[error("matrix is not a symmetric zero-row-sum matrix: {0}")]
    NotLaplacian(String),

    #[error("matrix has rank {rank}, expected {expected}: kernel is larger than the constants")]
    SingularBeyondKernel { rank: usize, expected: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degree mismatch for `{id}`: incidences sum to {sum}, expected {expected}")]
    DegreeMismatch {
        id: String,
        sum: String,
        expected: String,
    },

    #[error("operation requires a divisor of degree 1, `{id}` has degree {degree}")]
    DegreeNotOne { id: String, degree: String },

    #[error("degree must be positive, `{id}` has degree {degree}")]
    NonpositiveDegree { id: String, degree: String },

    #[error("divisors live on different fibers")]
    FiberMismatch,

    #[error("closed form is only valid for reduced fibers; `{0}` has a multiple component")]
    NotReduced(String),

    #[error("invalid genus: {0}")]
    InvalidGenus(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid N = {n}: {reason}")]
    InvalidN { n: u64, reason: String },

    #[error("{p} does not divide {n}")]
    NotADivisor { p: u64, n: u64 },

    #[error("self-check failed: {0}")]
    SelfCheckFailed(String),

    #[error("place `{0}` has a non-reduced fiber and no chosen divisor")]
    MissingDivisor(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("exactness error at {path}: {message}")]
    Exactness { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
