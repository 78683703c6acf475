use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive semi-definite (failed after jitter {jitter:e})")]
    NotPsd { jitter: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The Chernoff parameter `t` has the wrong sign for the requested tail.
    #[error("sign error: {0}")]
    Sign(String),

    #[error("grid of {size} points at step t={t} exceeds the grid cap {cap}")]
    GridCapExceeded { t: usize, size: f64, cap: usize },

    #[error("problem too large: {what} = {size} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: f64,
        cap: usize,
    },

    #[error("heuristic must vanish at leaves, got h({state:?}) = {value}")]
    HeuristicContractViolation { state: Vec<usize>, value: f64 },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("{file}:{line}: {message}")]
    Schema {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{kind} (seed {seed}): {source}")]
    Run {
        kind: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
