use thiserror::Error;

/// Errors produced by scoring, ingestion, replay and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A scorer registry, generator or run configuration problem.
    #[error("config error: {0}")]
    Config(String),

    /// An analysis had no eligible data to work on.
    #[error("empty analysis: {0}")]
    EmptyAnalysis(String),

    /// A session log line failed to parse or validate.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
