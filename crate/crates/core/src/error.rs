use std::path::PathBuf;

use thiserror::Error;

use crate::model::TransmitDesign;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input broke a documented precondition (dimensions, norms, signs).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    /// The convex subsolver gave up at SPCA round `iteration`.
    /// `last_good` holds the most recent accepted iterate, if any.
    #[error("subsolver failed at iteration {iteration}: {reason}")]
    Subsolver {
        iteration: usize,
        reason: String,
        last_good: Option<Box<TransmitDesign>>,
    },

    #[error("dual multipliers unavailable: {0}")]
    UnavailableDuals(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
