use thiserror::Error;

/// Errors raised by the exact pipeline.
///
/// `Inconclusive` is not a failure of the input: it marks a computation that
/// ran out of precision or budget and refuses to guess.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported prime {prime}: {reason}")]
    UnsupportedPrime { prime: u64, reason: String },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("budget exceeded: need {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
