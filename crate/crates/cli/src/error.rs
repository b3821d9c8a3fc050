use bssn_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn config(e: Error) -> Self {
        Self::Config(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Convergence(_) => 2,
            Self::Internal(_) => 3,
        }
    }
}

/// Errors raised while solving. Anything that is not a failure to converge
/// points at a broken invariant.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_) | Error::DiscrepancyExhausted(_) | Error::Diverged(_) => {
                Self::Convergence(e.to_string())
            }
            other => Self::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Internal(e.to_string())
    }
}
