use thiserror::Error;

/// Errors raised by graph handling, network construction and evaluation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("sentinel B = {sentinel} must exceed max(m, n + pad) = {required}")]
    SentinelTooSmall { sentinel: i64, required: i64 },

    #[error("structural inconsistency at index {index}: {reason}")]
    Structure { index: usize, reason: String },

    #[error("vertex counts differ ({left} vs {right})")]
    VertexCountMismatch { left: usize, right: usize },

    #[error("infeasible edge count {edges} for {n} vertices (max {max})")]
    InfeasibleEdgeCount { n: usize, edges: usize, max: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("arithmetic overflow in layer {layer}, neuron {neuron}")]
    Overflow { layer: usize, neuron: usize },

    #[error("input {index} is not on the evaluation grid (scale {scale})")]
    OffGrid { index: usize, scale: i64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("search guard exceeded: {0}")]
    Guard(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
