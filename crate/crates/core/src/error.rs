use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must lie in (0, 2], got {0}")]
    InvalidAlpha(f64),

    #[error("stable scale must be finite and nonnegative, got {0}")]
    InvalidScale(f64),

    #[error("sketch size k must be at least 1")]
    InvalidK,

    #[error("bucket count must be at least 2, got {0}")]
    InvalidBuckets(usize),

    #[error("dimension mismatch: vector has dimension {vector}, expected {expected}")]
    DimensionMismatch { expected: usize, vector: usize },

    #[error("vector has no nonzero entries")]
    EmptyVector,

    #[error("negative entry at index {index}: {value}")]
    NegativeEntry { index: u32, value: f64 },

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("vector is not l1-normalized: entries sum to {sum}")]
    NotNormalized { sum: f64 },

    #[error("no closed-form collision law is known for alpha = {0}")]
    NoClosedForm(f64),

    #[error(
        "sketch fingerprints differ; sketches from different configurations are not comparable"
    )]
    FingerprintMismatch,

    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),

    #[error("invalid encoded features: {0}")]
    InvalidFeatures(String),

    #[error("encoded features have mixed lengths: {0} and {1}")]
    MixedFeatureLength(u64, u64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
