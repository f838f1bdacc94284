use thiserror::Error;

use crate::combinatorics::BigCount;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The work required exceeds the configured budget.
    #[error("budget exceeded: {what} needs {required}, budget is {budget}")]
    Budget {
        what: String,
        required: BigCount,
        budget: BigCount,
    },

    /// Interval evaluation of a floor could not decide the integer part.
    #[error("floor of {0} is not resolvable at f64 precision")]
    UnresolvedFloor(String),

    #[error("Moser-Tardos round cap of {rounds} reached; last violated set {last_violated:?}")]
    RoundCap {
        rounds: u64,
        last_violated: Vec<usize>,
    },

    #[error("no sample at or below the expected size {expected} after {attempts} attempts (best {best})")]
    RetryCap {
        attempts: u32,
        expected: f64,
        best: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
