use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adaptive refinement did not converge: {0}")]
    NonConvergent(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("target {y} outside bracket image [{lo}, {hi}]")]
    BracketError { y: f64, lo: f64, hi: f64 },
    #[error("unsupported dimension: {0}")]
    DimensionError(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("branch does not match alpha: {0}")]
    BranchMismatch(String),
    #[error("integrand not integrable: {0}")]
    NotIntegrable(String),
    #[error("profile must be non-increasing: {0}")]
    MonotoneRequired(String),
    #[error("sufficient condition violated: {0}")]
    ConditionViolated(String),
    #[error("logarithm argument is not positive: {0}")]
    LogArgumentNonpositive(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
