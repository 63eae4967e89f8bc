use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("edge ({u}, {v}) has non-positive weight {weight}")]
    NonpositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no edge between {u} and {v}")]
    NoSuchEdge { u: usize, v: usize },

    #[error("cochain has zero norm")]
    ZeroNorm,

    #[error("vertex subset is empty")]
    EmptySubset,

    #[error("matrix is rank deficient (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("path is broken at step {step}")]
    BrokenPath { step: usize },

    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("edge potential is not synchronizable (kernel dimension {kernel_dim}, expected {expected})")]
    NotSynchronizable { kernel_dim: usize, expected: usize },

    #[error("cannot form {k} clusters from {points} points")]
    TooFewPoints { points: usize, k: usize },

    #[error("all edge weights are numerically zero")]
    DegenerateWeights,

    #[error("class {class} has zero volume")]
    ZeroVolumeClass { class: usize },

    #[error("degree sequence is not graphical")]
    NotGraphical,

    #[error("gave up after {attempts} attempts")]
    RetriesExhausted { attempts: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),
}

impl Error {
    /// Coarse category used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::RankDeficient { .. }
            | Error::ConvergenceFailure { .. }
            | Error::NotSynchronizable { .. }
            | Error::DegenerateWeights
            | Error::RetriesExhausted { .. } => "numerical",
            _ => "validation",
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
