//! Evaluation reports: schema, aggregation and rendering.

use std::fmt::Write as _;

use ocuctx_core::{ClassDef, ClassMetrics, ContextResult, PunishMode, Summary};
use serde::{Deserialize, Serialize};

use crate::classes::ClassConfigEcho;
use crate::dataset::Scenario;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const AGGREGATION_ORDER: &str = "per-image per-class metric, then mean over foreground classes within each image, \
     then mean and sample standard deviation (n-1) over successfully evaluated images";

/// Relative tolerance used when checking a loaded aggregate.
const AGGREGATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema: u32,
    pub tool_version: String,
    pub scenario: Scenario,
    pub config: ConfigEcho,
    pub per_image: Vec<ImageRow>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub classes: ClassConfigEcho,
    pub punish_mode: PunishMode,
    pub aggregation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub label: u8,
    pub name: String,
    #[serde(flatten)]
    pub metrics: ClassMetrics,
}

/// Foreground-class mean of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageMean {
    pub f_score: f64,
    pub error_rate: f64,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRow {
    pub id: String,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<ImageMean>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextResult>,
    /// The configured punish composition applied to a unit base loss.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub punish_factor: Option<f64>,
}

impl ImageRow {
    pub fn ok(id: String, classes: Vec<ClassRow>, context: ContextResult, punish_factor: f64) -> Self {
        let n = classes.len() as f64;
        let mean = ImageMean {
            f_score: classes.iter().map(|c| c.metrics.f_score).sum::<f64>() / n,
            error_rate: classes.iter().map(|c| c.metrics.error_rate).sum::<f64>() / n,
            iou: classes.iter().map(|c| c.metrics.iou).sum::<f64>() / n,
        };
        Self {
            id,
            status: RowStatus::Ok,
            error: None,
            classes,
            mean: Some(mean),
            context: Some(context),
            punish_factor: Some(punish_factor),
        }
    }

    pub fn failed(id: String, error: String) -> Self {
        Self {
            id,
            status: RowStatus::Failed,
            error: Some(error),
            classes: Vec::new(),
            mean: None,
            context: None,
            punish_factor: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAggregate {
    pub label: u8,
    pub name: String,
    pub f_score: Summary,
    pub error_rate: Summary,
    pub iou: Summary,
    pub theta: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummaries {
    pub f_score: Summary,
    pub error_rate: Summary,
    pub iou: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextSummaries {
    pub lambda: Summary,
    pub rho: Summary,
    pub delta_gt: Summary,
    pub delta_pred: Summary,
    pub pc_loss: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub images: usize,
    pub failed: usize,
    pub classes: Vec<ClassAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<MetricSummaries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSummaries>,
}

fn summarize<'a>(rows: impl Iterator<Item = &'a ImageRow>, f: impl Fn(&ImageRow) -> Option<f64>) -> Option<Summary> {
    let values: Vec<f64> = rows.filter_map(f).collect();
    Summary::of(&values)
}

impl Aggregate {
    pub fn from_rows(rows: &[ImageRow], classes: &[ClassDef]) -> Self {
        let ok = || rows.iter().filter(|r| r.is_ok());
        let class_metric = |label: u8, pick: fn(&ClassMetrics) -> f64| {
            summarize(ok(), move |r| {
                r.classes.iter().find(|c| c.label == label).map(|c| pick(&c.metrics))
            })
        };
        let class_aggs = classes
            .iter()
            .filter_map(|c| {
                Some(ClassAggregate {
                    label: c.label,
                    name: c.name.clone(),
                    f_score: class_metric(c.label, |m| m.f_score)?,
                    error_rate: class_metric(c.label, |m| m.error_rate)?,
                    iou: class_metric(c.label, |m| m.iou)?,
                    theta: class_metric(c.label, |m| m.theta)?,
                })
            })
            .collect();
        let scenario = (|| {
            Some(MetricSummaries {
                f_score: summarize(ok(), |r| r.mean.map(|m| m.f_score))?,
                error_rate: summarize(ok(), |r| r.mean.map(|m| m.error_rate))?,
                iou: summarize(ok(), |r| r.mean.map(|m| m.iou))?,
            })
        })();
        let context = (|| {
            Some(ContextSummaries {
                lambda: summarize(ok(), |r| r.context.as_ref().map(|c| c.lambda))?,
                rho: summarize(ok(), |r| r.context.as_ref().map(|c| c.rho))?,
                delta_gt: summarize(ok(), |r| r.context.as_ref().map(|c| c.delta_gt))?,
                delta_pred: summarize(ok(), |r| r.context.as_ref().map(|c| c.delta_pred))?,
                pc_loss: summarize(ok(), |r| r.context.as_ref().map(|c| c.pc_loss))?,
            })
        })();
        Self {
            images: ok().count(),
            failed: rows.len() - ok().count(),
            classes: class_aggs,
            scenario,
            context,
        }
    }

    /// Numeric comparison with a small relative tolerance.
    fn agrees_with(&self, other: &Self) -> bool {
        fn close(a: f64, b: f64) -> bool {
            (a - b).abs() <= AGGREGATE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
        }
        fn same(a: &Summary, b: &Summary) -> bool {
            a.n == b.n
                && close(a.mean, b.mean)
                && match (a.std, b.std) {
                    (Some(x), Some(y)) => close(x, y),
                    (None, None) => true,
                    _ => false,
                }
        }
        let metrics = |a: &MetricSummaries, b: &MetricSummaries| {
            same(&a.f_score, &b.f_score) && same(&a.error_rate, &b.error_rate) && same(&a.iou, &b.iou)
        };
        let context = |a: &ContextSummaries, b: &ContextSummaries| {
            same(&a.lambda, &b.lambda)
                && same(&a.rho, &b.rho)
                && same(&a.delta_gt, &b.delta_gt)
                && same(&a.delta_pred, &b.delta_pred)
                && same(&a.pc_loss, &b.pc_loss)
        };
        self.images == other.images
            && self.failed == other.failed
            && self.classes.len() == other.classes.len()
            && self.classes.iter().zip(&other.classes).all(|(a, b)| {
                a.label == b.label
                    && a.name == b.name
                    && same(&a.f_score, &b.f_score)
                    && same(&a.error_rate, &b.error_rate)
                    && same(&a.iou, &b.iou)
                    && same(&a.theta, &b.theta)
            })
            && match (&self.scenario, &other.scenario) {
                (Some(a), Some(b)) => metrics(a, b),
                (None, None) => true,
                _ => false,
            }
            && match (&self.context, &other.context) {
                (Some(a), Some(b)) => context(a, b),
                (None, None) => true,
                _ => false,
            }
    }
}

/// Overall outcome of a batch run, used for the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Clean,
    Partial,
    TotalFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Clean => 0,
            RunStatus::Partial => 2,
            RunStatus::TotalFailure => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// Per-image metric selectable for comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FScore,
    Iou,
    ErrorRate,
}

impl Metric {
    pub fn of(self, mean: &ImageMean) -> f64 {
        match self {
            Metric::FScore => mean.f_score,
            Metric::Iou => mean.iou,
            Metric::ErrorRate => mean.error_rate,
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fscore" | "f" | "f_score" => Ok(Metric::FScore),
            "iou" | "jaccard" => Ok(Metric::Iou),
            "er" | "error_rate" => Ok(Metric::ErrorRate),
            other => Err(format!("unknown metric '{other}' (expected fscore, iou or er)")),
        }
    }
}

impl EvaluationReport {
    pub fn new(scenario: Scenario, config: ConfigEcho, per_image: Vec<ImageRow>) -> Self {
        let aggregate = Aggregate::from_rows(&per_image, &config.classes.classes);
        Self {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario,
            config,
            per_image,
            aggregate,
        }
    }

    pub fn status(&self) -> RunStatus {
        match (self.aggregate.images, self.aggregate.failed) {
            (_, 0) => RunStatus::Clean,
            (0, _) => RunStatus::TotalFailure,
            _ => RunStatus::Partial,
        }
    }

    /// Parses a JSON report and checks the aggregate against its rows.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema != SCHEMA_VERSION {
            return Err(Error::Report(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                report.schema
            )));
        }
        let recomputed = Aggregate::from_rows(&report.per_image, &report.config.classes.classes);
        if !report.aggregate.agrees_with(&recomputed) {
            return Err(Error::Report("aggregate does not match the per-image rows".into()));
        }
        Ok(report)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Report(msg) => Error::Report(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.render_csv(),
            Format::Markdown => Ok(self.render_markdown().into_bytes()),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>> {
        let classes = &self.config.classes.classes;
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = vec!["id".into(), "status".into(), "error".into()];
        for c in classes {
            for m in ["fscore", "er", "iou", "theta"] {
                header.push(format!("{}_{m}", c.name));
            }
        }
        header.extend(
            [
                "mean_fscore",
                "mean_er",
                "mean_iou",
                "lambda",
                "rho",
                "delta_gt",
                "delta_pred",
                "pc_loss",
                "punish_factor",
                "flags",
            ]
            .map(String::from),
        );
        w.write_record(&header)?;
        for row in &self.per_image {
            let mut rec = vec![
                row.id.clone(),
                if row.is_ok() { "ok" } else { "failed" }.to_string(),
                row.error.clone().unwrap_or_default(),
            ];
            for c in classes {
                match row.classes.iter().find(|r| r.label == c.label) {
                    Some(r) => {
                        let m = r.metrics;
                        rec.extend([m.f_score, m.error_rate, m.iou, m.theta].map(|v| v.to_string()));
                    }
                    None => rec.extend(std::iter::repeat_n(String::new(), 4)),
                }
            }
            match &row.mean {
                Some(m) => rec.extend([m.f_score, m.error_rate, m.iou].map(|v| v.to_string())),
                None => rec.extend(std::iter::repeat_n(String::new(), 3)),
            }
            match &row.context {
                Some(c) => {
                    rec.extend([c.lambda, c.rho, c.delta_gt, c.delta_pred, c.pc_loss].map(|v| v.to_string()));
                    rec.push(row.punish_factor.map(|v| v.to_string()).unwrap_or_default());
                    rec.push(c.flags.names().collect::<Vec<_>>().join("|"));
                }
                None => rec.extend(std::iter::repeat_n(String::new(), 7)),
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| Error::Report(e.to_string()))
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        let agg = &self.aggregate;
        let _ = writeln!(
            out,
            "Scenario: {} | images evaluated: {} | failed: {}\n",
            self.scenario, agg.images, agg.failed
        );
        out.push_str("| Class | F-score (%) | ER (%) | IoU (%) |\n");
        out.push_str("|---|---|---|---|\n");
        for c in &agg.classes {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                c.name,
                percent(&c.f_score),
                percent(&c.error_rate),
                percent(&c.iou)
            );
        }
        if let Some(s) = &agg.scenario {
            let _ = writeln!(
                out,
                "| **{}** | {} | {} | {} |",
                self.scenario.to_string().to_uppercase(),
                percent(&s.f_score),
                percent(&s.error_rate),
                percent(&s.iou)
            );
        }
        if let Some(c) = &agg.context {
            out.push_str("\n| λ | ρ | δ(gt) | δ(pred) | PC-Loss |\n");
            out.push_str("|---|---|---|---|---|\n");
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                plain(&c.lambda, 4),
                plain(&c.rho, 4),
                plain(&c.delta_gt, 2),
                plain(&c.delta_pred, 2),
                plain(&c.pc_loss, 4)
            );
        }
        let failures: Vec<&ImageRow> = self.per_image.iter().filter(|r| !r.is_ok()).collect();
        if !failures.is_empty() {
            out.push_str("\nFailed images:\n\n");
            for r in failures {
                let _ = writeln!(out, "- `{}`: {}", r.id, r.error.as_deref().unwrap_or("unknown error"));
            }
        }
        out
    }
}

fn percent(s: &Summary) -> String {
    match s.std {
        Some(std) => format!("{:.2} ± {:.2}", 100.0 * s.mean, 100.0 * std),
        None => format!("{:.2}", 100.0 * s.mean),
    }
}

fn plain(s: &Summary, digits: usize) -> String {
    match s.std {
        Some(std) => format!("{:.*} ± {:.*}", digits, s.mean, digits, std),
        None => format!("{:.*}", digits, s.mean),
    }
}
