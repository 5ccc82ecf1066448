//! Error type shared by all operations.

use thiserror::Error;

/// Errors raised by validation and numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {limit:e}")]
    NotHermitian { asymmetry: f64, limit: f64 },
    #[error("operator is not positive semidefinite: min eigenvalue {min_eig:e} below -{clip:e}")]
    NotPsd { min_eig: f64, clip: f64 },
    #[error("not a density operator: {0}")]
    NotAState(String),
    #[error("not a POVM: {0}")]
    NotAPovm(String),
    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),
    #[error("outcome label sets differ")]
    LabelMismatch,
    #[error("states must be distinct")]
    StatesEqual,
    #[error("rho + sigma is singular; restrict to the joint support first")]
    SingularSum,
    #[error("state is not pure (rank {0})")]
    NotPure(usize),
    #[error("rho * sigma = 0: states have orthogonal supports")]
    OrthogonalSupports,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Library result alias.
pub type Result<V> = std::result::Result<V, Error>;
