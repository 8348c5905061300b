use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller passed an argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two points from different coordinate charts were combined.
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    /// The Gram matrix lost positive definiteness at the requested size.
    #[error(
        "ill-conditioned Gram matrix (condition estimate {condition:.3e}); largest feasible section size {feasible_n}"
    )]
    IllConditionedGram { condition: f64, feasible_n: usize },

    /// The inductive search for a level's row count gave up.
    #[error("construction failed at level {level} (m = {m}): first violated condition {condition}")]
    ConstructionFailure { level: usize, m: u64, condition: String },

    /// An exhaustive search would exceed its budget.
    #[error("search budget exceeded: {0}")]
    Budget(String),

    /// The certified tail bound could not be established.
    #[error("internal error: {0}")]
    Internal(String),

    /// Cache file rejected (version, checksum or layout).
    #[error("cache error: {0}")]
    Cache(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
