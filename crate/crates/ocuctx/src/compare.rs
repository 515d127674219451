//! Paired significance tests between evaluation reports.

use std::collections::{BTreeMap, BTreeSet};

use ocuctx_core::stats::wilcoxon_with;
use ocuctx_core::{pairwise_matrix, PValueMatrix, PairedSample, TestMethod, TestResult};

use crate::error::{Error, Result};
use crate::report::{EvaluationReport, Metric};

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub result: TestResult,
    /// Ids left out because evaluation failed in at least one report.
    pub skipped: Vec<String>,
}

/// Per-image scores of each report aligned on the shared, successfully
/// evaluated ids (sorted). Id sets must match exactly.
fn aligned(reports: &[&EvaluationReport], metric: Metric) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let maps: Vec<BTreeMap<&str, Option<f64>>> = reports
        .iter()
        .map(|r| {
            r.per_image
                .iter()
                .map(|row| (row.id.as_str(), row.mean.as_ref().filter(|_| row.is_ok()).map(|m| metric.of(m))))
                .collect()
        })
        .collect();
    let first: BTreeSet<&str> = maps[0].keys().copied().collect();
    for map in &maps[1..] {
        let other: BTreeSet<&str> = map.keys().copied().collect();
        if other != first {
            return Err(Error::IdMismatch {
                only_a: first.difference(&other).map(|s| s.to_string()).collect(),
                only_b: other.difference(&first).map(|s| s.to_string()).collect(),
            });
        }
    }
    let mut skipped = Vec::new();
    let mut columns = vec![Vec::new(); maps.len()];
    for id in &first {
        let values: Option<Vec<f64>> = maps.iter().map(|m| m[id]).collect();
        match values {
            Some(vals) => {
                for (col, v) in columns.iter_mut().zip(vals) {
                    col.push(v);
                }
            }
            None => skipped.push(id.to_string()),
        }
    }
    Ok((columns, skipped))
}

/// Wilcoxon signed-rank test of `a` against `b` on one per-image metric.
pub fn compare(
    a: &EvaluationReport,
    b: &EvaluationReport,
    metric: Metric,
    alpha: f64,
    method: Option<TestMethod>,
) -> Result<Comparison> {
    let (mut columns, skipped) = aligned(&[a, b], metric)?;
    let second = columns.pop().expect("two columns");
    let first = columns.pop().expect("two columns");
    let sample = PairedSample::new(first, second)?;
    Ok(Comparison {
        result: wilcoxon_with(&sample, alpha, method)?,
        skipped,
    })
}

/// Pairwise p-value matrix across several named reports.
pub fn compare_many(reports: &[(String, EvaluationReport)], metric: Metric, alpha: f64) -> Result<PValueMatrix> {
    let refs: Vec<&EvaluationReport> = reports.iter().map(|(_, r)| r).collect();
    let (columns, _) = aligned(&refs, metric)?;
    let named: Vec<(String, Vec<f64>)> = reports.iter().map(|(n, _)| n.clone()).zip(columns).collect();
    Ok(pairwise_matrix(&named, alpha)?)
}
