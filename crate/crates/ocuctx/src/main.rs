use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ocuctx::classes::load_class_config;
use ocuctx::compare::{compare, compare_many};
use ocuctx::dataset::{discover, list_ids, Scenario};
use ocuctx::evaluate::evaluate;
use ocuctx::io::load_mask;
use ocuctx::report::{EvaluationReport, Format, Metric};
use ocuctx::split::{split, split_grouped};
use ocuctx_core::{pc_loss, ClassSpec, ContextConfig, PunishMode, TestMethod};

#[derive(Parser)]
#[command(name = "ocuctx", version, about = "Context-aware segmentation scoring for label masks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PunishArg {
    Mult,
    Add,
}

impl From<PunishArg> for PunishMode {
    fn from(p: PunishArg) -> Self {
        match p {
            PunishArg::Mult => PunishMode::Multiplicative,
            PunishArg::Add => PunishMode::Additive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Exact,
    Normal,
}

#[derive(Subcommand)]
enum Command {
    /// Score every prediction in a directory against its ground truth.
    Evaluate {
        #[arg(long, value_name = "DIR")]
        gt: PathBuf,
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        /// all | iris | sclera | custom
        #[arg(long, default_value = "custom")]
        scenario: Scenario,
        /// JSON class config; defaults to background 0, iris 1, sclera 2.
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mult")]
        punish: PunishArg,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// json | csv | markdown
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the context coefficients and loss of a single pair.
    Pcloss {
        #[arg(long, value_name = "FILE")]
        gt: PathBuf,
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mult")]
        punish: PunishArg,
        /// Also print this base loss after punishment.
        #[arg(long)]
        base_loss: Option<f64>,
        /// Emit the result as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Seeded 40/40/20 train/test/validation split of the masks in a directory.
    Split {
        #[arg(long, value_name = "DIR")]
        manifest: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Keep ids sharing the text before this delimiter in one set.
        #[arg(long, value_name = "DELIM")]
        group_by_prefix: Option<String>,
        /// Folds per-class files (`<id>_<class>.png`) into one id.
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
    },
    /// Wilcoxon signed-rank comparison of evaluation reports.
    Compare {
        /// Two reports for a single test, more for a p-value matrix.
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        /// fscore | iou | er
        #[arg(long)]
        metric: Metric,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
}

fn class_spec(path: Option<&Path>) -> Result<Arc<ClassSpec>> {
    Ok(Arc::new(match path {
        Some(p) => load_class_config(p).with_context(|| format!("loading {}", p.display()))?,
        None => ClassSpec::ocular_default(),
    }))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Evaluate {
            gt,
            pred,
            scenario,
            classes,
            punish,
            out,
            format,
            jobs,
        } => {
            let spec = class_spec(classes.as_deref())?;
            let found = discover(&gt, &pred, spec, scenario)?;
            for w in &found.warnings {
                eprintln!("warning: {w}");
            }
            let report = evaluate(&found.manifest, punish.into(), jobs)?;
            let bytes = report.render(format)?;
            std::fs::write(&out, bytes).with_context(|| format!("writing {}", out.display()))?;
            for row in report.per_image.iter().filter(|r| !r.is_ok()) {
                eprintln!("failed: {}: {}", row.id, row.error.as_deref().unwrap_or(""));
            }
            eprintln!(
                "evaluated {} image(s), {} failed -> {}",
                report.aggregate.images,
                report.aggregate.failed,
                out.display()
            );
            Ok(ExitCode::from(report.status().exit_code() as u8))
        }
        Command::Pcloss {
            gt,
            pred,
            classes,
            punish,
            base_loss,
            json,
        } => {
            let spec = class_spec(classes.as_deref())?;
            let cfg = ContextConfig::new(spec.clone(), punish.into());
            let gt = load_mask(&gt, &spec)?;
            let pred = load_mask(&pred, &spec)?;
            let ctx = pc_loss(&gt, &pred, &cfg)?;
            let punished = base_loss.map(|b| cfg.punish_mode.apply(b, ctx.pc_loss)).transpose()?;
            if json {
                let mut value = serde_json::to_value(&ctx)?;
                if let Some(p) = punished {
                    value["punished_loss"] = serde_json::json!(p);
                }
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                print!("{}", ocuctx::format_context(&ctx, &spec));
                if let Some(p) = punished {
                    println!("punished_loss: {p}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Split {
            manifest,
            seed,
            out,
            group_by_prefix,
            classes,
        } => {
            let spec = match &classes {
                Some(_) => Some(class_spec(classes.as_deref())?),
                None => None,
            };
            let ids = list_ids(&manifest, spec.as_deref())?;
            let assignment = match &group_by_prefix {
                Some(delim) => split_grouped(&ids, seed, delim)?,
                None => split(&ids, seed)?,
            };
            let mut text = serde_json::to_string_pretty(&assignment)?;
            text.push('\n');
            std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "train {} / test {} / validation {} -> {}",
                assignment.train.len(),
                assignment.test.len(),
                assignment.validation.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            reports,
            metric,
            alpha,
            method,
        } => {
            let loaded: Vec<(String, EvaluationReport)> = reports
                .iter()
                .map(|p| Ok((p.display().to_string(), EvaluationReport::load(p)?)))
                .collect::<Result<_>>()?;
            if loaded.len() == 2 {
                let method = match method {
                    MethodArg::Auto => None,
                    MethodArg::Exact => Some(TestMethod::Exact),
                    MethodArg::Normal => Some(TestMethod::NormalApprox),
                };
                let c = compare(&loaded[0].1, &loaded[1].1, metric, alpha, method)?;
                for id in &c.skipped {
                    eprintln!("skipped {id}: evaluation failed in at least one report");
                }
                let r = c.result;
                println!("w_plus: {}", r.w_plus);
                println!("n_effective: {}", r.n_effective);
                println!("p_two_sided: {}", r.p_two_sided);
                println!(
                    "method: {}",
                    match r.method {
                        TestMethod::Exact => "exact",
                        TestMethod::NormalApprox => "normal_approx",
                    }
                );
                println!("alpha: {}", r.alpha);
                println!("significant: {}", r.significant);
            } else {
                if !matches!(method, MethodArg::Auto) {
                    bail!("--method applies to two-report comparisons only");
                }
                let m = compare_many(&loaded, metric, alpha)?;
                println!("{}", serde_json::to_string_pretty(&m)?);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // usage errors share status 1 with other errors; 2 and 3 mean failed images
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
