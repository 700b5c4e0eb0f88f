use thiserror::Error;

/// Crate-wide error type. `Domain` covers precondition violations;
/// `NonPositiveDeterminant` and `SingularSystem` signal numerical breakdown.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix dimension {n} exceeds the configured cap {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("non-positive determinant: {0}")]
    NonPositiveDeterminant(String),
    #[error("singular saddle-point system: {0}")]
    SingularSystem(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("too few samples: need at least {need} uncensored records, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that indicate numerical failure rather than a bad
    /// input (used by the CLI to pick the exit code).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveDeterminant(_) | Error::SingularSystem(_)
        )
    }
}
