//! Batch evaluation harness around `ocuctx-core`: mask files, class
//! configuration, dataset pairing, seeded splits, reports and method
//! comparison. The `ocuctx` binary is a thin CLI over this crate.

pub mod classes;
pub mod compare;
pub mod dataset;
mod error;
pub mod evaluate;
pub mod io;
pub mod report;
pub mod split;

use std::fmt::Write as _;

use ocuctx_core::{ClassSpec, ContextResult};

pub use error::{Error, Result};

/// Text block printed by `ocuctx pcloss`. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn format_context(ctx: &ContextResult, spec: &ClassSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lambda: {}", ctx.lambda);
    let _ = writeln!(out, "rho: {}", ctx.rho);
    let _ = writeln!(out, "delta_gt: {}", ctx.delta_gt);
    let _ = writeln!(out, "delta_pred: {}", ctx.delta_pred);
    for t in &ctx.thetas {
        let name = spec.name_of(t.label).unwrap_or("?");
        let _ = writeln!(out, "theta[{name}]: {}", t.theta);
    }
    let _ = writeln!(out, "pc_loss: {}", ctx.pc_loss);
    let _ = writeln!(out, "flags: {}", ctx.flags);
    out
}
