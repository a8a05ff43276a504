use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("interior product of a degree-0 form has degree -1")]
    DegreeUnderflow,

    #[error("ambient dimension {0} is outside 1..=16")]
    UnsupportedDimension(usize),

    #[error("invalid multi-index {0:?}: indices must be strictly increasing and within range")]
    InvalidIndex(Vec<usize>),

    #[error("frame is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("frame columns are linearly dependent")]
    RankDeficient,

    #[error("plane of dimension {p} does not fit in R^{n}")]
    PlaneTooLarge { n: usize, p: usize },

    #[error("expected {expected} vectors, got {found}")]
    WrongArgumentCount { expected: usize, found: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("spinor is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("spinor does not lie in the positive half-spin space (residual {0:.3e})")]
    NotPositiveSpinor(f64),

    #[error("Lie algebra data fails its invariants: {0}")]
    InvalidLieAlgebra(String),

    #[error("plane is not critical (residual {0:.3e})")]
    NotCritical(f64),

    #[error("plane is not an integral element (residual {0:.3e})")]
    NotIntegral(f64),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
