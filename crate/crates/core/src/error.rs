use thiserror::Error;

/// Errors produced by model construction and the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or derived quantity violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A state vector violates a model invariant.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// An iterative routine exhausted its iteration or step budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),
    /// A result-level hypothesis (e.g. R2 > R1) does not hold for the inputs.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// An internal cross-check failed; indicates a bug or degenerate inputs.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
