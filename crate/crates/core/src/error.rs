use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("no path from node {origin} to node {destination}")]
    NoPath { origin: usize, destination: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("declared {declared} links but parsed {parsed}")]
    CountMismatch { declared: usize, parsed: usize },

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
