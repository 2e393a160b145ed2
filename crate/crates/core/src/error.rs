use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration is empty")]
    Empty,

    #[error("vector {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },

    #[error("vector {index} has norm {norm}, expected 1 within {tol:e}")]
    NonUnitVector { index: usize, norm: f64, tol: f64 },

    #[error("invalid gram matrix: {0}")]
    InvalidGram(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no feasible candidate: {0}")]
    Infeasible(String),

    #[error("solver failure: {0}")]
    Solver(String),

    /// A numerical finding that contradicts a step the argument relies on.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
