//! Pixel-level confusion counting and the per-class protocol metrics.
//!
//! All metrics are one-vs-rest for a single class. When a class is absent
//! from both masks the comparison is vacuous agreement: F-score 1,
//! Jaccard 1, θ 0, error rate 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::context::Moments;
use crate::error::{Error, Result};
use crate::mask::{binarize, validate_pair, BinaryMask, LabelMask};

/// TP/FP/FN/TN pixel tallies for one class of one image pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tp,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tn,
        }
    }
}

/// The four per-class scores derived from one [`ConfusionCounts`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub f_score: f64,
    pub error_rate: f64,
    pub iou: f64,
    pub theta: f64,
}

impl ClassMetrics {
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let iou = jaccard(c);
        Self {
            f_score: f_score(c),
            error_rate: error_rate(c),
            iou,
            theta: 1.0 - iou,
        }
    }
}

pub fn confusion_counts(gt: &BinaryMask, pred: &BinaryMask) -> Result<ConfusionCounts> {
    if gt.width() != pred.width() || gt.height() != pred.height() {
        return Err(Error::DimensionMismatch {
            gt_width: gt.width(),
            gt_height: gt.height(),
            pred_width: pred.width(),
            pred_height: pred.height(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    // Padding bits past the last pixel are zero in both masks.
    for (&g, &p) in gt.words().iter().zip(pred.words()) {
        tp += u64::from((g & p).count_ones());
        fp += u64::from((!g & p).count_ones());
        fn_ += u64::from((g & !p).count_ones());
    }
    let total = gt.len() as u64;
    Ok(ConfusionCounts {
        tp,
        fp,
        fn_,
        tn: total - tp - fp - fn_,
    })
}

/// `2·tp / (2·tp + fp + fn)`, 1 when both masks are empty.
pub fn f_score(c: &ConfusionCounts) -> f64 {
    let denom = 2 * c.tp + c.fp + c.fn_;
    if denom == 0 {
        1.0
    } else {
        (2 * c.tp) as f64 / denom as f64
    }
}

/// Fraction of pixels on which the two masks disagree.
pub fn error_rate(c: &ConfusionCounts) -> f64 {
    let total = c.total();
    if total == 0 {
        0.0
    } else {
        (c.fp + c.fn_) as f64 / total as f64
    }
}

/// Intersection over union, 1 when both masks are empty.
pub fn jaccard(c: &ConfusionCounts) -> f64 {
    let union = c.tp + c.fp + c.fn_;
    if union == 0 {
        1.0
    } else {
        c.tp as f64 / union as f64
    }
}

/// Jaccard distance `1 − J`.
pub fn theta(c: &ConfusionCounts) -> f64 {
    1.0 - jaccard(c)
}

/// Binarizes both masks at `label` and scores the pair.
pub fn class_metrics(gt: &LabelMask, pred: &LabelMask, label: u8) -> Result<ClassMetrics> {
    validate_pair(gt, pred)?;
    let g = binarize(gt, label)?;
    let p = binarize(pred, label)?;
    Ok(ClassMetrics::from_counts(&confusion_counts(&g, &p)?))
}

const NO_INDEX: u8 = u8::MAX;

/// Single-pass tally of an image pair: the joint label histogram plus
/// per-class pixel moments of both masks.
///
/// Every per-class count and centroid needed by the metrics and the context
/// coefficients can be read off it without rescanning the pixels.
#[derive(Debug, Clone)]
pub struct PairTally {
    index: [u8; 256],
    labels: Vec<u8>,
    joint: Vec<u64>,
    gt_moments: Vec<Moments>,
    pred_moments: Vec<Moments>,
    total: u64,
}

impl PairTally {
    pub fn new(gt: &LabelMask, pred: &LabelMask) -> Result<Self> {
        validate_pair(gt, pred)?;
        let spec = gt.spec();
        let mut labels = Vec::with_capacity(spec.classes().len() + 1);
        labels.push(spec.background_label());
        labels.extend(spec.foreground_labels());
        let mut index = [NO_INDEX; 256];
        for (i, &l) in labels.iter().enumerate() {
            index[l as usize] = i as u8;
        }
        let k = labels.len();
        let mut joint = vec![0u64; k * k];
        let mut gt_moments = vec![Moments::default(); k];
        let mut pred_moments = vec![Moments::default(); k];

        let width = gt.width();
        for (row, (grow, prow)) in gt
            .labels()
            .chunks_exact(width)
            .zip(pred.labels().chunks_exact(width))
            .enumerate()
        {
            let row = row as u64;
            for (col, (&g, &p)) in grow.iter().zip(prow).enumerate() {
                let gi = index[g as usize] as usize;
                let pi = index[p as usize] as usize;
                joint[gi * k + pi] += 1;
                gt_moments[gi].add_unchecked(row, col as u64);
                pred_moments[pi].add_unchecked(row, col as u64);
            }
        }
        Ok(Self {
            index,
            labels,
            joint,
            gt_moments,
            pred_moments,
            total: gt.len() as u64,
        })
    }

    fn slot(&self, label: u8) -> Result<usize> {
        match self.index[label as usize] {
            NO_INDEX => Err(Error::UnknownLabel(label)),
            i => Ok(i as usize),
        }
    }

    /// Background label followed by foreground labels.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self, label: u8) -> Result<ConfusionCounts> {
        let i = self.slot(label)?;
        let k = self.labels.len();
        let tp = self.joint[i * k + i];
        let gt_count: u64 = self.joint[i * k..(i + 1) * k].iter().sum();
        let pred_count: u64 = (0..k).map(|r| self.joint[r * k + i]).sum();
        let fn_ = gt_count - tp;
        let fp = pred_count - tp;
        Ok(ConfusionCounts {
            tp,
            fp,
            fn_,
            tn: self.total - tp - fp - fn_,
        })
    }

    pub fn class_metrics(&self, label: u8) -> Result<ClassMetrics> {
        Ok(ClassMetrics::from_counts(&self.counts(label)?))
    }

    pub fn gt_moments(&self, label: u8) -> Result<Moments> {
        Ok(self.gt_moments[self.slot(label)?])
    }

    pub fn pred_moments(&self, label: u8) -> Result<Moments> {
        Ok(self.pred_moments[self.slot(label)?])
    }
}
