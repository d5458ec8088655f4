use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expansions do not share a basis: {0}")]
    BasisMismatch(String),

    #[error("no model payload for grid node {index}")]
    MissingPayload { index: usize },

    #[error("inadmissible coefficients: {0}")]
    Inadmissible(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear system is singular for scenario {digest}: {reason}")]
    Singular { digest: String, reason: String },

    #[error("solve failed at grid node {index} (xi = {xi:?}): {source}")]
    NodeSolve {
        index: usize,
        xi: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
