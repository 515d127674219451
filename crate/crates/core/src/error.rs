use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid mask dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("label grid has {actual} entries, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("label {label} unknown at ({row},{col})")]
    UnknownPixel { label: u8, row: usize, col: usize },

    #[error("label {0} is not declared in the class spec")]
    UnknownLabel(u8),

    #[error("dimension mismatch: ground truth is {gt_width}x{gt_height}, prediction is {pred_width}x{pred_height}")]
    DimensionMismatch {
        gt_width: usize,
        gt_height: usize,
        pred_width: usize,
        pred_height: usize,
    },

    #[error("masks are governed by different class specs")]
    SpecMismatch,

    #[error("invalid class spec: {0}")]
    InvalidSpec(String),

    #[error("base loss must be non-negative and finite, got {0}")]
    InvalidBaseLoss(f64),

    #[error("degenerate sample: every paired difference is zero")]
    DegenerateSample,

    #[error("paired sample lengths differ: {a} vs {b}")]
    SampleLengthMismatch { a: usize, b: usize },

    #[error("paired sample is empty")]
    EmptySample,

    #[error("sample contains a non-finite value")]
    NonFiniteSample,

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
}
