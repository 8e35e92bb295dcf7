use thiserror::Error;

/// Errors produced by graph ingestion, statistics, tests, and samplers.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (edge lists, CSV matrices).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition of an operation does not hold for the given input.
    #[error("{0}")]
    Domain(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
