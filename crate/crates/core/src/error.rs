use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Grid locations are not strictly increasing at `index` (0-based, the
    /// offending element compared to its predecessor).
    #[error("grid is not strictly increasing at index {index}")]
    Ordering { index: usize },
    #[error("{what} must be {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("matrix is not positive definite (Cholesky pivot {pivot})")]
    Conditioning { pivot: usize },
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("effective sample size is undefined for a constant series")]
    UndefinedEss,
    #[error("no posterior draws to summarize")]
    EmptyDraws,
    #[error("x = {x} is outside the scenario domain")]
    OutOfDomain { x: f64 },
    #[error("improper prior: {0}")]
    ImproperPrior(String),
    #[error("sweep {sweep} failed: {source}")]
    Sweep { sweep: usize, source: Box<Error> },
}

impl Error {
    /// Strips [`Error::Sweep`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Sweep { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn domain(what: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            what,
            requirement,
            value,
        }
    }
}
