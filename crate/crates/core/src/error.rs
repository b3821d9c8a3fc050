use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The active Hessian block could not be factored. Strict convexity of `g`
    /// rules this out, so it points at a broken objective.
    #[error("Hessian block of size {0} is not positive definite")]
    NotPositiveDefinite(usize),

    #[error("Armijo line search exceeded {0} backtracking steps")]
    LineSearch(usize),

    /// `dump` holds the instance in the text format of `LcpInstance::dump`.
    #[error("linear complementarity solve failed: {reason}")]
    Lcp { reason: String, dump: String },

    #[error("iterate norm exceeded the divergence cap {0:e}")]
    Diverged(f64),

    #[error("no convergence within {0} iterations")]
    NoConvergence(usize),

    #[error("discrepancy principle exhausted after {0} reductions")]
    DiscrepancyExhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension { expected, found })
        }
    }
}
