use thiserror::Error;

use crate::gridworld::Cell;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no path from {from:?} to {to:?}")]
    NoPath { from: Cell, to: Cell },

    #[error("posterior has zero total mass")]
    DegeneratePosterior,

    #[error("candidate list is empty")]
    NoCandidate,

    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
