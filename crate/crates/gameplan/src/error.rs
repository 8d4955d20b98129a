//! Library error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data violated a precondition (duplicate ids, non-finite
    /// coordinates, unsorted sequences, out-of-range indices, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested agent id is not present in the data.
    #[error("unknown agent id {0}")]
    UnknownAgent(crate::AgentId),

    /// The requested observation window is not covered by the data.
    #[error("window [{start}, {end}] not covered by trajectory data")]
    WindowNotCovered { start: f64, end: f64 },

    /// Brute-force oracle refused an instance that is too large.
    #[error("brute-force oracle limited to n <= {max}, got n = {n}")]
    OracleTooLarge { n: usize, max: usize },

    /// Scenario configuration cannot be realized.
    #[error("scenario error: {0}")]
    Scenario(String),

    /// Config file / report I/O.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
