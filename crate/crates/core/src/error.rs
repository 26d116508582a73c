use thiserror::Error;

/// Errors produced by constructions and checks in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("base q = {0} is invalid; it must be at least 2")]
    InvalidBase(u64),
    #[error("scalar bases differ: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible in the scalar ring")]
    NonInvertible,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("{0} is not a prime power (or exceeds the supported maximum of 64)")]
    NotPrimePower(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("position {0} of the profile is not 1")]
    InvalidPosition(usize),
    #[error("enumeration size {size} exceeds limit {limit}")]
    LimitExceeded { size: u128, limit: u128 },
    #[error("association scheme axiom {axiom} violated at {witness}")]
    AxiomViolation { axiom: String, witness: String },
    #[error("matrix has a non-rational eigenvalue")]
    NonRationalEigenvalue,
    #[error("first eigenmatrix is singular")]
    SingularP,
    #[error("Krein expansion of E_{i} o E_{j} is inconsistent")]
    InconsistentExpansion { i: usize, j: usize },
    #[error("graph is not distance-regular: vertices {x} and {y} at distance {k} give a different count for p_1{j}")]
    NotDistanceRegular { x: usize, y: usize, k: usize, j: usize },
    #[error("matrix is not symmetric, so the induced map is not symplectic")]
    NotSymplectic,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
