//! Wilcoxon signed-rank test for paired per-image scores.
//!
//! Zero differences are discarded and tied magnitudes share their average
//! rank. Up to [`EXACT_MAX_N`] effective pairs the null distribution of W+
//! is enumerated exactly by dynamic programming over (doubled) ranks; above
//! that a normal approximation with tie and continuity corrections is used.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest effective sample size tested with the exact distribution by default.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSample {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SampleLengthMismatch { a: a.len(), b: b.len() });
        }
        if a.is_empty() {
            return Err(Error::EmptySample);
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Signed nonzero differences `a − b`.
    fn differences(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(x, y)| x - y)
            .filter(|d| *d != 0.0)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    /// Sum of ranks of the positive differences (may be a half-integer under ties).
    pub w_plus: f64,
    pub n_effective: usize,
    pub p_two_sided: f64,
    pub method: TestMethod,
    pub alpha: f64,
    pub significant: bool,
}

/// Ranks of nonzero differences, doubled so average ranks stay integral,
/// with the sign of each difference.
#[derive(Debug, Clone)]
pub struct SignedRanks {
    pub doubled_ranks: Vec<u32>,
    pub positive: Vec<bool>,
    /// Sizes of groups of tied magnitudes (groups of one included).
    pub tie_groups: Vec<usize>,
}

impl SignedRanks {
    pub fn from_differences(diffs: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..diffs.len()).collect();
        order.sort_by(|&i, &j| libm::fabs(diffs[i]).total_cmp(&libm::fabs(diffs[j])));
        let mut doubled_ranks = vec![0u32; diffs.len()];
        let mut tie_groups = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let mag = libm::fabs(diffs[order[start]]);
            let mut end = start;
            while end + 1 < order.len() && libm::fabs(diffs[order[end + 1]]) == mag {
                end += 1;
            }
            // average of 1-based ranks start+1 ..= end+1, doubled
            let doubled = (start + end + 2) as u32;
            for &idx in &order[start..=end] {
                doubled_ranks[idx] = doubled;
            }
            tie_groups.push(end - start + 1);
            start = end + 1;
        }
        Self {
            doubled_ranks,
            positive: diffs.iter().map(|d| *d > 0.0).collect(),
            tie_groups,
        }
    }

    pub fn n(&self) -> usize {
        self.doubled_ranks.len()
    }

    pub fn doubled_w_plus(&self) -> u32 {
        self.doubled_ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, p)| **p)
            .map(|(r, _)| *r)
            .sum()
    }
}

/// Null distribution of the doubled W+ statistic: entry `s` is the
/// probability that the positively signed doubled ranks sum to `s`.
pub fn signed_rank_distribution(doubled_ranks: &[u32]) -> Vec<f64> {
    let max: usize = doubled_ranks.iter().map(|&r| r as usize).sum();
    let mut dist = vec![0.0f64; max + 1];
    dist[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        reach += r;
        for s in (0..=reach).rev() {
            let with = if s >= r { dist[s - r] } else { 0.0 };
            dist[s] = 0.5 * (dist[s] + with);
        }
    }
    dist
}

fn exact_p(ranks: &SignedRanks) -> f64 {
    let dist = signed_rank_distribution(&ranks.doubled_ranks);
    let w = ranks.doubled_w_plus() as usize;
    let lower: f64 = dist[..=w].iter().sum();
    let upper: f64 = dist[w..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p(ranks: &SignedRanks) -> f64 {
    let n = ranks.n() as f64;
    let w = f64::from(ranks.doubled_w_plus()) / 2.0;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = ranks
        .tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (libm::fabs(w - mean) - 0.5).max(0.0) / libm::sqrt(var);
    libm::erfc(z / core::f64::consts::SQRT_2).min(1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Two-sided test choosing the method from the effective sample size.
pub fn wilcoxon(sample: &PairedSample, alpha: f64) -> Result<TestResult> {
    wilcoxon_with(sample, alpha, None)
}

/// Two-sided test with an optional forced method.
pub fn wilcoxon_with(sample: &PairedSample, alpha: f64, method: Option<TestMethod>) -> Result<TestResult> {
    check_alpha(alpha)?;
    let diffs = sample.differences();
    if diffs.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let ranks = SignedRanks::from_differences(&diffs);
    let method = method.unwrap_or(if ranks.n() <= EXACT_MAX_N {
        TestMethod::Exact
    } else {
        TestMethod::NormalApprox
    });
    let p = match method {
        TestMethod::Exact => exact_p(&ranks),
        TestMethod::NormalApprox => normal_p(&ranks),
    };
    Ok(TestResult {
        w_plus: f64::from(ranks.doubled_w_plus()) / 2.0,
        n_effective: ranks.n(),
        p_two_sided: p,
        method,
        alpha,
        significant: p < alpha,
    })
}

/// Symmetric matrix of two-sided p-values; the diagonal is empty.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PValueMatrix {
    pub names: Vec<String>,
    pub p_values: Vec<Vec<Option<f64>>>,
}

impl PValueMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.p_values.get(i)?.get(j).copied().flatten()
    }
}

/// Tests every pair of methods. Identical score lists (no nonzero
/// difference) get p = 1.
pub fn pairwise_matrix<S: AsRef<str>>(samples: &[(S, Vec<f64>)], alpha: f64) -> Result<PValueMatrix> {
    check_alpha(alpha)?;
    let n = samples.len();
    if let Some((_, first)) = samples.first() {
        for (_, s) in samples {
            if s.len() != first.len() {
                return Err(Error::SampleLengthMismatch { a: first.len(), b: s.len() });
            }
        }
    }
    let mut p_values = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let sample = PairedSample::new(samples[i].1.clone(), samples[j].1.clone())?;
            let p = match wilcoxon(&sample, alpha) {
                Ok(r) => r.p_two_sided,
                Err(Error::DegenerateSample) => 1.0,
                Err(e) => return Err(e),
            };
            p_values[i][j] = Some(p);
            p_values[j][i] = Some(p);
        }
    }
    Ok(PValueMatrix {
        names: samples.iter().map(|(name, _)| String::from(name.as_ref())).collect(),
        p_values,
    })
}
