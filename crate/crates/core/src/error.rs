use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution {0} outside supported range 1..=24")]
    InvalidResolution(u32),

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("index {index} out of range for resolution {resolution}")]
    IndexOutOfRange { index: u64, resolution: u32 },

    #[error("order {order} exceeds 2^{resolution}")]
    OrderTooLarge { order: u64, resolution: u32 },

    #[error("order must be at least {min}, got {order}")]
    OrderTooSmall { order: u64, min: u64 },

    #[error("depth {depth} exceeds resolution {resolution}")]
    DepthTooLarge { depth: u32, resolution: u32 },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("norm exponent must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("weight index {index} beyond available horizon {horizon}")]
    WeightHorizon { index: usize, horizon: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
