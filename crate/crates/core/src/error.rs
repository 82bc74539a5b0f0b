use thiserror::Error;

/// Errors produced by tensor construction, the rank-one solvers, and the
/// decomposition drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("shape mismatch: ({0}, {1}) vs ({2}, {3})")]
    Shape(usize, usize, usize, usize),

    #[error("non-finite entry at offset {0}")]
    NonFinite(usize),

    #[error("invalid tensor shape: order {order}, dim {dim}")]
    InvalidShape { order: usize, dim: usize },

    #[error(
        "tensor is not symmetric: entry {offset} differs from its permutation by {deviation:e}"
    )]
    NotSymmetric { offset: usize, deviation: f64 },

    #[error("tensor too large: {entries} entries exceeds cap {cap}")]
    SizeCap { entries: usize, cap: usize },

    #[error("invalid vector: {0}")]
    Vector(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("feasible set is empty (theta = {theta}, {anchors} anchors)")]
    Infeasible { theta: f64, anchors: usize },

    #[error("brute-force oracle supports dim <= 3, got {0}")]
    UnsupportedSize(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid instance spec: {0}")]
    Spec(String),

    #[error("adaptive theta fell below floor {floor} at step {step} without acceptance")]
    AdaptiveFailure { step: usize, floor: f64 },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("missing field: {0}")]
    Missing(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
