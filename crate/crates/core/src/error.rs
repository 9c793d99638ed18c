use thiserror::Error;

use crate::topology::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite argument {0} passed to a squashing function")]
    Domain(f64),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("network spec failed validation ({} violation(s)); first: {}", .0.len(), .0[0])]
    InvalidSpec(Vec<Violation>),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("no target supplied at step {0}")]
    MissingTarget(usize),

    #[error("target supplied for input unit {unit} at step {step}")]
    TargetOnInput { unit: usize, step: usize },

    #[error("trace does not match network: {0}")]
    TraceMismatch(String),

    #[error("time span [{t0}, {t_final}] is not inside the recorded trace of {len} steps")]
    Span {
        t0: usize,
        t_final: usize,
        len: usize,
    },

    #[error("training diverged at {0}: non-finite parameter")]
    Divergence(String),

    #[error("loss function returned a non-finite value at coordinate {0}")]
    NonFiniteLoss(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
