//! Brute-force reference implementations used to check the library.
//!
//! Everything here works from explicit pixel lists and plain floating-point
//! means; nothing calls into the crate's counting or centroid code.

#![allow(dead_code)]

use rand::Rng;

pub const BG: u8 = 0;

/// Per-pixel confusion tallies for one class.
pub fn count_class(gt: &[u8], pred: &[u8], label: u8) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&g, &p) in gt.iter().zip(pred) {
        match (g == label, p == label) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    (tp, fp, fn_, tn)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMetrics {
    pub f_score: f64,
    pub error_rate: f64,
    pub iou: f64,
    pub theta: f64,
}

pub fn metrics(gt: &[u8], pred: &[u8], label: u8) -> OracleMetrics {
    let (tp, fp, fn_, tn) = count_class(gt, pred, label);
    let (tp, fp, fn_, tn) = (tp as f64, fp as f64, fn_ as f64, tn as f64);
    let union = tp + fp + fn_;
    let iou = if union == 0.0 { 1.0 } else { tp / union };
    let f_score = if union == 0.0 { 1.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
    OracleMetrics {
        f_score,
        error_rate: (fp + fn_) / (tp + fp + fn_ + tn),
        iou,
        theta: 1.0 - iou,
    }
}

/// Pixel coordinates `(row, col)` carrying `label`.
pub fn pixels(mask: &[u8], width: usize, label: u8) -> Vec<(f64, f64)> {
    mask.iter()
        .enumerate()
        .filter(|(_, &l)| l == label)
        .map(|(i, _)| ((i / width) as f64, (i % width) as f64))
        .collect()
}

pub fn centroid(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let r: f64 = points.iter().map(|p| p.0).sum();
    let c: f64 = points.iter().map(|p| p.1).sum();
    Some((r / n, c / n))
}

pub fn double_sum(n: usize, d: impl Fn(usize, usize) -> f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let mut inner = 0.0;
        for j in 0..n {
            if j != i {
                inner += d(i, j);
            }
        }
        total += inner / (n as f64 - 1.0);
    }
    total / n as f64
}

pub fn delta(centroids: &[(f64, f64)]) -> f64 {
    double_sum(centroids.len(), |i, j| {
        let dr = centroids[i].0 - centroids[j].0;
        let dc = centroids[i].1 - centroids[j].1;
        (dr * dr + dc * dc).sqrt()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleContext {
    pub thetas: Vec<f64>,
    pub lambda: f64,
    pub delta_gt: f64,
    pub delta_pred: f64,
    pub rho: f64,
    pub pc_loss: f64,
    pub pred_class_empty: bool,
    pub gt_class_empty: bool,
    pub delta_near_zero: bool,
    pub single_class: bool,
}

/// Scale and spatial coefficients straight from pixel lists.
pub fn context(gt: &[u8], pred: &[u8], width: usize, labels: &[u8], eps: f64) -> OracleContext {
    let thetas: Vec<f64> = labels.iter().map(|&l| metrics(gt, pred, l).theta).collect();
    let lambda = if thetas.len() == 1 {
        thetas[0]
    } else {
        double_sum(thetas.len(), |i, j| (thetas[i] - thetas[j]).abs())
    };

    let mut cg = Vec::new();
    let mut cp = Vec::new();
    let (mut pred_empty, mut gt_empty) = (false, false);
    for &l in labels {
        match (centroid(&pixels(gt, width, l)), centroid(&pixels(pred, width, l))) {
            (Some(a), Some(b)) => {
                cg.push(a);
                cp.push(b);
            }
            (Some(_), None) => pred_empty = true,
            (None, Some(_)) => gt_empty = true,
            (None, None) => {}
        }
    }
    let delta_gt = delta(&cg);
    let delta_pred = delta(&cp);
    let mut single = labels.len() < 2;
    let mut near_zero = false;
    let rho = if cg.len() < 2 {
        if !pred_empty && !gt_empty {
            single = true;
        }
        0.0
    } else if delta_gt < eps {
        near_zero = true;
        0.0
    } else {
        delta_pred / delta_gt
    };
    OracleContext {
        pc_loss: (lambda + rho) / 2.0,
        thetas,
        lambda,
        delta_gt,
        delta_pred,
        rho,
        pred_class_empty: pred_empty,
        gt_class_empty: gt_empty,
        delta_near_zero: near_zero,
        single_class: single,
    }
}

/// Random label grid over `0..classes`. Mixes per-pixel noise with
/// rectangle layouts so that some classes are often absent.
pub fn random_mask(rng: &mut impl Rng, width: usize, height: usize, classes: u8) -> Vec<u8> {
    if rng.random_bool(0.5) {
        return (0..width * height).map(|_| rng.random_range(0..classes)).collect();
    }
    let mut mask = vec![BG; width * height];
    for label in 1..classes {
        if rng.random_bool(0.15) {
            continue;
        }
        let r0 = rng.random_range(0..height);
        let c0 = rng.random_range(0..width);
        let r1 = rng.random_range(r0..height) + 1;
        let c1 = rng.random_range(c0..width) + 1;
        for r in r0..r1 {
            for c in c0..c1 {
                mask[r * width + c] = label;
            }
        }
    }
    mask
}

/// Prediction derived from `gt` by flipping a random fraction of pixels.
pub fn perturb(rng: &mut impl Rng, gt: &[u8], classes: u8) -> Vec<u8> {
    let rate = rng.random_range(0.0..0.6);
    gt.iter()
        .map(|&l| if rng.random_bool(rate) { rng.random_range(0..classes) } else { l })
        .collect()
}

/// Two-sided Wilcoxon p-value by enumerating all 2^n sign assignments.
pub fn wilcoxon_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = d.len();
    // doubled average rank: 2 * (less + (equal + 1) / 2)
    let doubled: Vec<u64> = d
        .iter()
        .map(|x| {
            let less = d.iter().filter(|y| y.abs() < x.abs()).count() as u64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as u64;
            2 * less + equal + 1
        })
        .collect();
    let observed: u64 = d.iter().zip(&doubled).filter(|(x, _)| **x > 0.0).map(|(_, r)| *r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for signs in 0u64..(1 << n) {
        let w: u64 = (0..n).filter(|i| signs >> i & 1 == 1).map(|i| doubled[i]).sum();
        if w <= observed {
            le += 1;
        }
        if w >= observed {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}
