use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transform length {0} is not a power of two")]
    Sizing(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("framing error: expected {expected} samples, got {actual}")]
    Framing { expected: usize, actual: usize },

    #[error("observation has no snapshots")]
    EmptyObservation,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no noise subspace: estimated order {order} equals dimension")]
    NoNoiseSubspace { order: usize },

    #[error("rank-deficient code matrix (condition {condition:e}); codes {code_a} and {code_b} are nearly collinear")]
    Decoupling {
        code_a: usize,
        code_b: usize,
        condition: f64,
    },

    #[error("timing ambiguity: V = 1 leaves the multiple of Q unresolved")]
    Ambiguity,

    #[error("config: missing required key `{0}`")]
    MissingKey(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors caused by the experiment configuration rather than by a run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::MissingKey(_) | Error::Configuration(_))
    }
}
