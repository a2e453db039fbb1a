use thiserror::Error;

/// Errors raised by the set-propagation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The simplex routine broke down numerically (iteration limit, NaN).
    /// Never reported as "empty" or "nonempty".
    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("operation requires a bounded set")]
    Unbounded,

    #[error("activation `{0}` is not piecewise affine")]
    NotPiecewiseAffine(String),

    #[error("activation `{0}` is not injective")]
    NotInjective(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid set specification: {0}")]
    InvalidSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
