use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    /// Gram-Schmidt hit a vector whose residual norm fell below tolerance.
    #[error("linear dependence at input index {index} (residual norm {norm:e})")]
    Dependence { index: usize, norm: f64 },

    #[error("invalid basis: {0}")]
    Basis(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    /// Enumeration stopped at the candidate cap. `processed` is the resumable marker.
    #[error("budget exhausted after {processed} candidates (next partition index {next_partition})")]
    Budget { processed: u64, next_partition: usize },
}
