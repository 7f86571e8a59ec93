use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("antenna counts must be at least 1, got {0:?}")]
    AntennaCount(Vec<u32>),

    #[error("CSIT quality {name} = {value} lies outside [0, 1]")]
    AlphaRange { name: &'static str, value: f64 },

    #[error("interference channel {0:?} has M2 < N1 after normalization; the schemes need M2 >= N1")]
    UnsupportedIc([u32; 4]),

    #[error("{op} requires {need}")]
    Regime { op: &'static str, need: &'static str },

    #[error("power exponent {name} = {value} lies outside [{lo}, {hi}]")]
    ExponentRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("lambda = {value} lies outside [0, {max}]")]
    LambdaRange { value: f64, max: f64 },

    #[error("null space has dimension {available}, {requested} streams requested")]
    NullSpace { available: usize, requested: usize },

    #[error("constraint set does not bound the region in direction {0}")]
    Unbounded(&'static str),

    #[error("invalid SNR sweep: {0}")]
    Sweep(String),

    #[error("transmit power must exceed 1 (linear), got {0}")]
    Power(f64),

    #[error("thread pool: {0}")]
    Threads(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
