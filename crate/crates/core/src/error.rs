use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid example: {0}")]
    InvalidExample(String),

    #[error("separator violates the unit margin on example {index}: y<w*,x> = {margin}")]
    MarginViolation { index: usize, margin: f64 },

    #[error("separability not certified after {passes} passes")]
    NotSeparable { passes: usize },

    #[error("rejection sampling acceptance rate {rate:e} is below 1e-4; margin infeasible for this dimension")]
    InfeasibleMargin { rate: f64 },

    #[error("construction failed after {attempts} attempts: {reason}")]
    ConstructionFailed { attempts: usize, reason: String },

    #[error("bad magic in {file}: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { file: &'static str, expected: u32, found: u32 },

    #[error("truncated {file}: header declares {expected} bytes, found {found}")]
    Truncated { file: &'static str, expected: usize, found: usize },

    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },

    #[error("label out of range: {label} at index {index}")]
    LabelOutOfRange { index: usize, label: u8 },

    #[error("insufficient examples: need {needed}, have {available}")]
    InsufficientExamples { needed: usize, available: usize },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
