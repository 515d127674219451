//! Pure kernels for evaluating multi-class segmentation masks.
//!
//! The crate is `no_std` (it only needs `alloc`) and covers:
//!
//! * [`mask`]: label masks, per-class binarization, class merging.
//! * [`metrics`]: confusion counts, F-score, error rate, Jaccard / IoU.
//! * [`context`]: centroids, the spatial (δ) and scale (λ) context
//!   coefficients, the ratio ρ, the punish-context loss and its composition
//!   with a base loss.
//! * [`stats`]: the Wilcoxon signed-rank test (exact and normal approximation).
//! * [`summary`]: mean / sample standard deviation roll-ups.
//!
//! File decoding, the batch harness and the CLI live in the `ocuctx` crate.

#![no_std]

extern crate alloc;

pub mod class_spec;
pub mod context;
mod error;
pub mod mask;
pub mod metrics;
pub mod stats;
pub mod summary;

pub use class_spec::{ClassDef, ClassSpec};
pub use context::{
    centroid, pc_loss, punish, scale_coefficient, spatial_coefficient, spatial_ratio, Centroid,
    ContextConfig, ContextFlags, ContextResult, Moments, PunishMode,
};
pub use error::{Error, Result};
pub use mask::{binarize, merge_classes, validate_pair, BinaryMask, LabelMask};
pub use metrics::{
    class_metrics, confusion_counts, error_rate, f_score, jaccard, theta, ClassMetrics,
    ConfusionCounts, PairTally,
};
pub use stats::{pairwise_matrix, wilcoxon, PValueMatrix, PairedSample, TestMethod, TestResult};
pub use summary::Summary;
