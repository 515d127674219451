//! Context coefficients and the punish-context loss.
//!
//! For an image pair the loss is `(λ + ρ) / 2` where
//!
//! * λ, the scale context coefficient, is the mean pairwise absolute
//!   difference of the per-class Jaccard distances θ;
//! * δ, the spatial context coefficient of one mask, is the mean pairwise
//!   Euclidean distance between class centroids;
//! * ρ = δ(pred) / δ(gt).
//!
//! Both pairwise means are `(1/N) Σ_i (1/(N−1)) Σ_{j≠i} d(i, j)`.
//!
//! The loss is computed on hard label masks and is a plain scalar. A perfect
//! prediction scores 0.5 (λ = 0, ρ = 1), and ρ is unbounded above.
//!
//! Degenerate inputs never fail: ρ falls back to 0 and the reason is recorded
//! in [`ContextFlags`].

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::class_spec::ClassSpec;
use crate::error::{Error, Result};
use crate::mask::{validate_pair, BinaryMask, LabelMask};
use crate::metrics::PairTally;

/// Integer pixel moments of one class: pixel count and coordinate sums.
///
/// Centroid differences are formed from these sums by exact integer
/// cross-multiplication, so distances between centroids are unaffected by
/// where the pair sits on the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Moments {
    pub count: u64,
    pub row_sum: u64,
    pub col_sum: u64,
}

impl Moments {
    #[inline]
    pub(crate) fn add_unchecked(&mut self, row: u64, col: u64) {
        self.count += 1;
        self.row_sum += row;
        self.col_sum += col;
    }

    pub fn of_mask(mask: &BinaryMask) -> Self {
        let mut m = Self::default();
        let w = mask.width();
        for idx in mask.ones() {
            m.add_unchecked((idx / w) as u64, (idx % w) as u64);
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn centroid(&self) -> Centroid {
        if self.count == 0 {
            return Centroid::Undefined;
        }
        let n = self.count as f64;
        Centroid::Defined {
            row: self.row_sum as f64 / n,
            col: self.col_sum as f64 / n,
            pixel_count: self.count,
        }
    }

    /// Euclidean distance between the two centroids, `None` if either is empty.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        if self.count == 0 || other.count == 0 {
            return None;
        }
        let (n1, n2) = (i128::from(self.count), i128::from(other.count));
        let denom = (n1 * n2) as f64;
        let dr = (i128::from(self.row_sum) * n2 - i128::from(other.row_sum) * n1) as f64 / denom;
        let dc = (i128::from(self.col_sum) * n2 - i128::from(other.col_sum) * n1) as f64 / denom;
        Some(libm::sqrt(dr * dr + dc * dc))
    }
}

/// Center of mass of a class, or `Undefined` when the class has no pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Centroid {
    Undefined,
    Defined { row: f64, col: f64, pixel_count: u64 },
}

impl Centroid {
    pub fn is_defined(&self) -> bool {
        matches!(self, Centroid::Defined { .. })
    }
}

pub fn centroid(mask: &BinaryMask) -> Centroid {
    Moments::of_mask(mask).centroid()
}

/// How the loss is composed with a base segmentation loss.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PunishMode {
    /// `base × (1 + pc_loss)`
    #[default]
    Multiplicative,
    /// `base + pc_loss`
    Additive,
}

impl PunishMode {
    pub fn apply(self, base_loss: f64, pc_loss: f64) -> Result<f64> {
        if !(base_loss >= 0.0 && base_loss.is_finite()) {
            return Err(Error::InvalidBaseLoss(base_loss));
        }
        Ok(match self {
            PunishMode::Multiplicative => base_loss * (1.0 + pc_loss),
            PunishMode::Additive => base_loss + pc_loss,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextConfig {
    pub spec: Arc<ClassSpec>,
    pub punish_mode: PunishMode,
}

impl ContextConfig {
    pub fn new(spec: Arc<ClassSpec>, punish_mode: PunishMode) -> Self {
        Self { spec, punish_mode }
    }

    /// Number of classes taking part in λ and δ.
    pub fn class_count(&self) -> usize {
        self.spec.context_labels().len()
    }

    fn check(&self, mask: &LabelMask) -> Result<()> {
        if Arc::ptr_eq(mask.spec_arc(), &self.spec) || *mask.spec() == *self.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }
}

/// Degeneracy markers attached to a [`ContextResult`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ContextFlags(u8);

impl ContextFlags {
    /// A context class present in the ground truth is missing from the prediction.
    pub const PRED_CLASS_EMPTY: Self = Self(1);
    /// A context class present in the prediction is missing from the ground truth.
    pub const GT_CLASS_EMPTY: Self = Self(1 << 1);
    /// δ(gt) fell below `epsilon_delta`.
    pub const DELTA_GT_NEAR_ZERO: Self = Self(1 << 2);
    /// Fewer than two classes are available for a pairwise coefficient.
    pub const SINGLE_CLASS: Self = Self(1 << 3);

    const ALL: [(Self, &'static str); 4] = [
        (Self::PRED_CLASS_EMPTY, "PRED_CLASS_EMPTY"),
        (Self::GT_CLASS_EMPTY, "GT_CLASS_EMPTY"),
        (Self::DELTA_GT_NEAR_ZERO, "DELTA_GT_NEAR_ZERO"),
        (Self::SINGLE_CLASS, "SINGLE_CLASS"),
    ];

    pub const fn empty() -> Self {
        Self(0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn insert(&mut self, other: Self) {
        self.0 |= other.0;
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn names(self) -> impl Iterator<Item = &'static str> {
        Self::ALL
            .into_iter()
            .filter(move |(f, _)| self.contains(*f))
            .map(|(_, name)| name)
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(_, n)| *n == name).map(|(f, _)| *f)
    }
}

impl core::ops::BitOr for ContextFlags {
    type Output = Self;
    fn bitor(self, rhs: Self) -> Self {
        Self(self.0 | rhs.0)
    }
}

impl core::fmt::Display for ContextFlags {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        for (i, name) in self.names().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(name)?;
        }
        Ok(())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ContextFlags {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.names())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ContextFlags {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let names: Vec<alloc::string::String> = serde::Deserialize::deserialize(deserializer)?;
        let mut flags = Self::empty();
        for name in names {
            let flag = Self::from_name(&name)
                .ok_or_else(|| serde::de::Error::custom(alloc::format!("unknown flag {name}")))?;
            flags.insert(flag);
        }
        Ok(flags)
    }
}

/// θ of one context class.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassTheta {
    pub label: u8,
    pub theta: f64,
}

/// Everything the loss is built from, for one image pair.
///
/// `delta_gt` and `delta_pred` are measured over the classes whose centroid
/// is defined in both masks, so `rho == delta_pred / delta_gt` whenever no
/// flag forced ρ to 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContextResult {
    pub thetas: Vec<ClassTheta>,
    pub lambda: f64,
    pub delta_gt: f64,
    pub delta_pred: f64,
    pub rho: f64,
    pub pc_loss: f64,
    pub flags: ContextFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialCoefficient {
    pub delta: f64,
    /// Context classes with a defined centroid, in context order.
    pub usable_classes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCoefficient {
    pub lambda: f64,
    pub thetas: Vec<ClassTheta>,
    /// Set when the context holds a single class and λ falls back to θ of it.
    pub single_class: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialRatio {
    pub rho: f64,
    pub delta_gt: f64,
    pub delta_pred: f64,
    pub flags: ContextFlags,
}

/// `(1/N) Σ_i (1/(N−1)) Σ_{j≠i} |v_i − v_j|`; 0 for fewer than two values.
pub fn mean_pairwise_abs_difference(values: &[f64]) -> f64 {
    mean_pairwise(values.len(), |i, j| libm::fabs(values[i] - values[j]))
}

/// Mean pairwise centroid distance over classes; all moments must be non-empty.
pub fn mean_pairwise_distance(moments: &[Moments]) -> f64 {
    mean_pairwise(moments.len(), |i, j| {
        moments[i].distance(&moments[j]).expect("moments must be non-empty")
    })
}

fn mean_pairwise(n: usize, dist: impl Fn(usize, usize) -> f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut outer = 0.0;
    for i in 0..n {
        let mut inner = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            inner += dist(i, j);
        }
        outer += inner / (n - 1) as f64;
    }
    outer / n as f64
}

/// δ of a single mask over its context classes with a defined centroid.
pub fn spatial_coefficient(mask: &LabelMask, cfg: &ContextConfig) -> Result<SpatialCoefficient> {
    cfg.check(mask)?;
    let mut slot = [usize::MAX; 256];
    let labels = cfg.spec.context_labels();
    for (i, &l) in labels.iter().enumerate() {
        slot[l as usize] = i;
    }
    let mut moments = alloc::vec![Moments::default(); labels.len()];
    let width = mask.width();
    for (row, line) in mask.labels().chunks_exact(width).enumerate() {
        for (col, &l) in line.iter().enumerate() {
            let s = slot[l as usize];
            if s != usize::MAX {
                moments[s].add_unchecked(row as u64, col as u64);
            }
        }
    }
    let (usable_classes, defined): (Vec<u8>, Vec<Moments>) = labels
        .iter()
        .zip(&moments)
        .filter(|(_, m)| !m.is_empty())
        .map(|(&l, &m)| (l, m))
        .unzip();
    Ok(SpatialCoefficient {
        delta: mean_pairwise_distance(&defined),
        usable_classes,
    })
}

pub fn scale_coefficient(gt: &LabelMask, pred: &LabelMask, cfg: &ContextConfig) -> Result<ScaleCoefficient> {
    cfg.check(gt)?;
    let tally = PairTally::new(gt, pred)?;
    scale_from_tally(&tally, cfg)
}

pub fn spatial_ratio(gt: &LabelMask, pred: &LabelMask, cfg: &ContextConfig) -> Result<SpatialRatio> {
    cfg.check(gt)?;
    let tally = PairTally::new(gt, pred)?;
    ratio_from_tally(&tally, cfg)
}

/// Full context evaluation of one pair.
pub fn pc_loss(gt: &LabelMask, pred: &LabelMask, cfg: &ContextConfig) -> Result<ContextResult> {
    validate_pair(gt, pred)?;
    cfg.check(gt)?;
    let tally = PairTally::new(gt, pred)?;
    context_from_tally(&tally, cfg)
}

/// Same as [`pc_loss`] for a pair that has already been tallied.
pub fn context_from_tally(tally: &PairTally, cfg: &ContextConfig) -> Result<ContextResult> {
    let scale = scale_from_tally(tally, cfg)?;
    let ratio = ratio_from_tally(tally, cfg)?;
    let mut flags = ratio.flags;
    if scale.single_class {
        flags.insert(ContextFlags::SINGLE_CLASS);
    }
    Ok(ContextResult {
        pc_loss: (scale.lambda + ratio.rho) / 2.0,
        thetas: scale.thetas,
        lambda: scale.lambda,
        delta_gt: ratio.delta_gt,
        delta_pred: ratio.delta_pred,
        rho: ratio.rho,
        flags,
    })
}

fn scale_from_tally(tally: &PairTally, cfg: &ContextConfig) -> Result<ScaleCoefficient> {
    let thetas = cfg
        .spec
        .context_labels()
        .into_iter()
        .map(|label| Ok(ClassTheta { label, theta: tally.class_metrics(label)?.theta }))
        .collect::<Result<Vec<_>>>()?;
    if thetas.len() == 1 {
        return Ok(ScaleCoefficient {
            lambda: thetas[0].theta,
            thetas,
            single_class: true,
        });
    }
    let values: Vec<f64> = thetas.iter().map(|t| t.theta).collect();
    Ok(ScaleCoefficient {
        lambda: mean_pairwise_abs_difference(&values),
        thetas,
        single_class: false,
    })
}

fn ratio_from_tally(tally: &PairTally, cfg: &ContextConfig) -> Result<SpatialRatio> {
    let labels = cfg.spec.context_labels();
    let mut flags = ContextFlags::empty();
    let mut shared_gt = Vec::with_capacity(labels.len());
    let mut shared_pred = Vec::with_capacity(labels.len());
    for &label in &labels {
        let g = tally.gt_moments(label)?;
        let p = tally.pred_moments(label)?;
        match (g.is_empty(), p.is_empty()) {
            (false, false) => {
                shared_gt.push(g);
                shared_pred.push(p);
            }
            (false, true) => flags.insert(ContextFlags::PRED_CLASS_EMPTY),
            (true, false) => flags.insert(ContextFlags::GT_CLASS_EMPTY),
            (true, true) => {}
        }
    }
    let delta_gt = mean_pairwise_distance(&shared_gt);
    let delta_pred = mean_pairwise_distance(&shared_pred);
    let degenerate = |mut flags: ContextFlags| SpatialRatio {
        rho: 0.0,
        delta_gt,
        delta_pred,
        flags: {
            if labels.len() < 2 {
                flags.insert(ContextFlags::SINGLE_CLASS);
            }
            flags
        },
    };
    if shared_gt.len() < 2 {
        if flags.is_empty() {
            flags.insert(ContextFlags::SINGLE_CLASS);
        }
        return Ok(degenerate(flags));
    }
    if delta_gt < cfg.spec.epsilon_delta() {
        flags.insert(ContextFlags::DELTA_GT_NEAR_ZERO);
        return Ok(degenerate(flags));
    }
    Ok(SpatialRatio {
        rho: delta_pred / delta_gt,
        delta_gt,
        delta_pred,
        flags,
    })
}

/// Composes `base_loss` with the pair's loss using the configured mode.
pub fn punish(base_loss: f64, ctx: &ContextResult, cfg: &ContextConfig) -> Result<f64> {
    cfg.punish_mode.apply(base_loss, ctx.pc_loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_spec::ClassDef;
    use alloc::vec;

    fn moments_at(points: &[(u64, u64)]) -> Moments {
        let mut m = Moments::default();
        for &(r, c) in points {
            m.add_unchecked(r, c);
        }
        m
    }

    fn cfg(spec: ClassSpec) -> ContextConfig {
        ContextConfig::new(Arc::new(spec), PunishMode::Multiplicative)
    }

    fn two_class_no_bg() -> ContextConfig {
        cfg(ClassSpec::ocular_default().with_background_in_context(false))
    }

    #[test]
    fn centroid_examples() {
        let mut bits = vec![false; 9];
        for i in [0, 2, 6, 8] {
            bits[i] = true;
        }
        let m = BinaryMask::from_bools(3, 3, &bits);
        assert_eq!(centroid(&m), Centroid::Defined { row: 1.0, col: 1.0, pixel_count: 4 });

        let mut bits = vec![false; 8 * 8];
        bits[3 * 8 + 5] = true;
        let m = BinaryMask::from_bools(8, 8, &bits);
        assert_eq!(centroid(&m), Centroid::Defined { row: 3.0, col: 5.0, pixel_count: 1 });

        assert_eq!(centroid(&BinaryMask::new(4, 4)), Centroid::Undefined);
    }

    #[test]
    fn distance_is_euclidean() {
        let a = moments_at(&[(0, 0)]);
        let b = moments_at(&[(3, 4)]);
        assert_eq!(a.distance(&b), Some(5.0));
        assert_eq!(a.distance(&Moments::default()), None);
        // fractional centroids: (0.5, 0) and (0, 0)
        let c = moments_at(&[(0, 0), (1, 0)]);
        assert_eq!(c.distance(&a), Some(0.5));
    }

    #[test]
    fn mean_pairwise_distance_examples() {
        let pts = [moments_at(&[(0, 0)]), moments_at(&[(3, 4)]), moments_at(&[(0, 8)])];
        // distances 5, 8, 5: ((5+8)/2 + (5+5)/2 + (8+5)/2) / 3
        assert_eq!(mean_pairwise_distance(&pts), 6.0);
        assert_eq!(mean_pairwise_distance(&pts[..2]), 5.0);
        assert_eq!(mean_pairwise_distance(&pts[..1]), 0.0);
    }

    #[test]
    fn lambda_examples() {
        let l = mean_pairwise_abs_difference(&[0.0, 0.3, 0.6]);
        assert!((l - 0.4).abs() < 1e-15, "{l}");
        assert_eq!(mean_pairwise_abs_difference(&[0.25; 4]), 0.0);
        assert_eq!(mean_pairwise_abs_difference(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn spatial_coefficient_on_masks() {
        // three single-pixel classes at (0,0), (3,4), (0,8)
        let spec = ClassSpec::new(
            vec![ClassDef::new(1, "a"), ClassDef::new(2, "b"), ClassDef::new(3, "c")],
            0,
            false,
            1e-9,
        )
        .unwrap();
        let cfg = cfg(spec);
        let mut labels = vec![0u8; 9 * 4];
        labels[0] = 1;
        labels[3 * 9 + 4] = 2;
        labels[8] = 3;
        let mask = LabelMask::new(9, 4, labels, cfg.spec.clone()).unwrap();
        let s = spatial_coefficient(&mask, &cfg).unwrap();
        assert_eq!(s.delta, 6.0);
        assert_eq!(s.usable_classes, vec![1, 2, 3]);
    }

    #[test]
    fn single_foreground_class_has_zero_delta() {
        let spec = ClassSpec::new(vec![ClassDef::new(1, "iris")], 0, false, 1e-9).unwrap();
        let cfg = cfg(spec);
        let mask = LabelMask::new(2, 2, vec![0, 1, 1, 0], cfg.spec.clone()).unwrap();
        let s = spatial_coefficient(&mask, &cfg).unwrap();
        assert_eq!(s.delta, 0.0);
        assert_eq!(s.usable_classes, vec![1]);
    }

    #[test]
    fn spatial_ratio_doubles_when_pred_pulls_classes_apart() {
        // gt: iris (0,0), sclera (3,4) -> δ 5; pred: iris (0,0), sclera (6,8) -> δ 10
        let cfg = two_class_no_bg();
        let mut g = vec![0u8; 10 * 10];
        g[0] = 1;
        g[3 * 10 + 4] = 2;
        let mut p = vec![0u8; 10 * 10];
        p[0] = 1;
        p[6 * 10 + 8] = 2;
        let gt = LabelMask::new(10, 10, g, cfg.spec.clone()).unwrap();
        let pred = LabelMask::new(10, 10, p, cfg.spec.clone()).unwrap();
        let r = spatial_ratio(&gt, &pred, &cfg).unwrap();
        assert_eq!((r.delta_gt, r.delta_pred, r.rho), (5.0, 10.0, 2.0));
        assert!(r.flags.is_empty());
    }

    #[test]
    fn pred_missing_a_class_zeroes_rho() {
        let cfg = two_class_no_bg();
        let gt = LabelMask::new(2, 2, vec![1, 0, 0, 2], cfg.spec.clone()).unwrap();
        let pred = LabelMask::new(2, 2, vec![1, 0, 0, 0], cfg.spec.clone()).unwrap();
        let r = spatial_ratio(&gt, &pred, &cfg).unwrap();
        assert_eq!(r.rho, 0.0);
        assert!(r.flags.contains(ContextFlags::PRED_CLASS_EMPTY));
        assert!(!r.flags.contains(ContextFlags::GT_CLASS_EMPTY));
    }

    #[test]
    fn identical_pair_is_fixed_point() {
        let cfg = cfg(ClassSpec::ocular_default());
        let gt = LabelMask::new(3, 3, vec![1, 1, 0, 0, 0, 0, 0, 2, 2], cfg.spec.clone()).unwrap();
        let r = pc_loss(&gt, &gt, &cfg).unwrap();
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.pc_loss, 0.5);
        assert!(r.flags.is_empty());
        assert!(r.thetas.iter().all(|t| t.theta == 0.0));
    }

    #[test]
    fn all_background_prediction() {
        // Without background in the context both θ are 1, so λ = 0.
        let cfg_fg = two_class_no_bg();
        let gt = LabelMask::new(2, 2, vec![1, 0, 0, 2], cfg_fg.spec.clone()).unwrap();
        let pred = LabelMask::background(2, 2, cfg_fg.spec.clone()).unwrap();
        let r = pc_loss(&gt, &pred, &cfg_fg).unwrap();
        assert_eq!((r.lambda, r.rho, r.pc_loss), (0.0, 0.0, 0.0));
        assert!(r.flags.contains(ContextFlags::PRED_CLASS_EMPTY));

        // With background: θ_bg = 1 − 2/4 = 0.5, θ_iris = θ_sclera = 1,
        // λ = ((0.5 + 0.5)/2 + (0.5 + 0)/2 + (0.5 + 0)/2) / 3 = 1/3.
        let cfg_bg = cfg(ClassSpec::ocular_default());
        let gt = LabelMask::new(2, 2, vec![1, 0, 0, 2], cfg_bg.spec.clone()).unwrap();
        let pred = LabelMask::background(2, 2, cfg_bg.spec.clone()).unwrap();
        let r = pc_loss(&gt, &pred, &cfg_bg).unwrap();
        assert!((r.lambda - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.pc_loss, (r.lambda + r.rho) / 2.0);
        assert!(r.flags.contains(ContextFlags::PRED_CLASS_EMPTY));
    }

    #[test]
    fn single_context_class() {
        let spec = ClassSpec::new(vec![ClassDef::new(1, "iris")], 0, false, 1e-9).unwrap();
        let cfg = cfg(spec);
        let gt = LabelMask::new(2, 2, vec![1, 1, 0, 0], cfg.spec.clone()).unwrap();
        let pred = LabelMask::new(2, 2, vec![1, 0, 0, 0], cfg.spec.clone()).unwrap();
        let r = pc_loss(&gt, &pred, &cfg).unwrap();
        assert_eq!(r.lambda, 0.5);
        assert_eq!(r.rho, 0.0);
        assert!(r.flags.contains(ContextFlags::SINGLE_CLASS));
    }

    #[test]
    fn coincident_centroids_flag_delta() {
        // iris ring around a sclera dot: both centroids at (1,1)
        let cfg = two_class_no_bg();
        let gt = LabelMask::new(3, 3, vec![1, 1, 1, 1, 2, 1, 1, 1, 1], cfg.spec.clone()).unwrap();
        let r = pc_loss(&gt, &gt, &cfg).unwrap();
        assert_eq!(r.delta_gt, 0.0);
        assert_eq!(r.rho, 0.0);
        assert!(r.flags.contains(ContextFlags::DELTA_GT_NEAR_ZERO));
        assert!(r.pc_loss.is_finite());
    }

    #[test]
    fn punish_modes() {
        let ctx = ContextResult {
            thetas: vec![],
            lambda: 0.0,
            delta_gt: 0.0,
            delta_pred: 0.0,
            rho: 1.0,
            pc_loss: 0.5,
            flags: ContextFlags::empty(),
        };
        let mult = two_class_no_bg();
        assert_eq!(punish(1.0, &ctx, &mult).unwrap(), 1.5);
        assert_eq!(punish(0.0, &ctx, &mult).unwrap(), 0.0);
        let add = ContextConfig::new(mult.spec.clone(), PunishMode::Additive);
        let ctx = ContextResult { pc_loss: 0.4, ..ctx };
        assert_eq!(punish(2.0, &ctx, &add).unwrap(), 2.4);
        assert_eq!(punish(-1.0, &ctx, &add), Err(Error::InvalidBaseLoss(-1.0)));
    }

    #[test]
    fn spec_mismatch_is_rejected() {
        let cfg = two_class_no_bg();
        let other = Arc::new(ClassSpec::ocular_default());
        let mask = LabelMask::background(2, 2, other).unwrap();
        assert_eq!(spatial_coefficient(&mask, &cfg), Err(Error::SpecMismatch));
    }

    #[test]
    fn flags_display() {
        let f = ContextFlags::PRED_CLASS_EMPTY | ContextFlags::SINGLE_CLASS;
        assert_eq!(alloc::format!("{f}"), "PRED_CLASS_EMPTY,SINGLE_CLASS");
        assert_eq!(alloc::format!("{}", ContextFlags::empty()), "none");
    }
}
