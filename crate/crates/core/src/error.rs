use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lattice domains do not match: {left:?} vs {right:?}")]
    DomainMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("non-finite value at site {site}")]
    NonFinite { site: usize },

    #[error("derivative order {requested} not supported (max {max})")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("extent {extent} on axis {axis} too small, need at least {required}")]
    DomainTooSmall {
        axis: usize,
        extent: usize,
        required: usize,
    },

    #[error("convolution operator is not invertible: min multiplier {min_multiplier:e}")]
    NonInvertible { min_multiplier: f64 },

    #[error("degenerate simplex #{index} (volume {volume:e})")]
    DegenerateSimplex { index: usize, volume: f64 },

    #[error("invalid simplicial partition: {0}")]
    InvalidPartition(String),

    #[error("Gram matrix is numerically singular (condition {condition:e})")]
    SingularGram { condition: f64 },

    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
