//! Batch evaluation of a manifest.

use std::sync::Arc;

use ocuctx_core::context::context_from_tally;
use ocuctx_core::{ClassSpec, ContextConfig, PairTally, PunishMode};
use rayon::prelude::*;

use crate::classes::ClassConfigEcho;
use crate::dataset::{DatasetManifest, ImagePair, Scenario};
use crate::error::Result;
use crate::report::{ClassRow, ConfigEcho, EvaluationReport, ImageRow, AGGREGATION_ORDER};

/// Scores every pair of the manifest on `jobs` worker threads.
///
/// Rows come back in manifest order whatever the thread count. A pair that
/// cannot be loaded or compared becomes a failed row and is left out of the
/// aggregate.
pub fn evaluate(manifest: &DatasetManifest, punish_mode: PunishMode, jobs: usize) -> Result<EvaluationReport> {
    let scenario_spec = Arc::new(manifest.scenario.spec(&manifest.spec)?);
    let cfg = ContextConfig::new(Arc::clone(&scenario_spec), punish_mode);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let rows: Vec<ImageRow> = pool.install(|| {
        manifest
            .pairs
            .par_iter()
            .map(|pair| match evaluate_pair(pair, &manifest.spec, manifest.scenario, &cfg) {
                Ok(row) => row,
                Err(e) => ImageRow::failed(pair.id.clone(), e.to_string()),
            })
            .collect()
    });
    let config = ConfigEcho {
        classes: ClassConfigEcho::from(scenario_spec.as_ref()),
        punish_mode,
        aggregation: AGGREGATION_ORDER.to_string(),
    };
    Ok(EvaluationReport::new(manifest.scenario, config, rows))
}

fn evaluate_pair(pair: &ImagePair, spec: &Arc<ClassSpec>, scenario: Scenario, cfg: &ContextConfig) -> Result<ImageRow> {
    let gt = scenario.apply(&pair.gt.load(spec)?)?;
    let pred = scenario.apply(&pair.pred.load(spec)?)?;
    let tally = PairTally::new(&gt, &pred)?;
    let classes = cfg
        .spec
        .classes()
        .iter()
        .map(|c| {
            Ok(ClassRow {
                label: c.label,
                name: c.name.clone(),
                metrics: tally.class_metrics(c.label)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let context = context_from_tally(&tally, cfg)?;
    let factor = cfg.punish_mode.apply(1.0, context.pc_loss)?;
    Ok(ImageRow::ok(pair.id.clone(), classes, context, factor))
}
