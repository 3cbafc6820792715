use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the given space")]
    NotSubspace,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid prefan: {0}")]
    InvalidPrefan(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("ray {0} is not a ray of the fan")]
    NotARay(usize),
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("fan is not complete")]
    NotComplete,
    #[error("fan is not Fano")]
    NotFano,
    #[error("degree region is unbounded")]
    Unbounded,
    #[error("bundles live on different bases")]
    BaseMismatch,
    #[error("projection is not surjective")]
    NotSurjective,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
