use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DunklError {
    #[error("unknown reflection group family `{0}`")]
    UnknownFamily(String),

    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: &'static str, rank: usize },

    #[error("dihedral order must lie in 3..=8 (got {0})")]
    InvalidDihedralOrder(usize),

    #[error("family {family} expects {expected} multiplicity value(s), got {got}")]
    MultiplicityArity {
        family: &'static str,
        expected: String,
        got: usize,
    },

    #[error("multiplicity values must be nonnegative (got {0})")]
    NegativeMultiplicity(String),

    #[error("cannot parse `{0}` as an exact rational")]
    BadRational(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("polynomial is not divisible by the linear form")]
    NotDivisible,

    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("operation needs exact root data, but this system has inexact (floating) roots")]
    InexactRoots,

    #[error("operation requires a {expected} system")]
    WrongFamily { expected: &'static str },

    #[error("pairing Gram matrix is not positive definite in degree {degree}")]
    GramNotPositive { degree: usize },

    #[error("multi-index {0:?} not covered by this Hermite system")]
    UnknownIndex(Vec<u32>),

    #[error("series did not converge: tail bound {tail:e} above tolerance {tol:e} at degree {degree}")]
    NotConverged { tail: f64, tol: f64, degree: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("cost guard exceeded: {0}")]
    CostGuard(String),
}

pub type Result<T> = std::result::Result<T, DunklError>;
