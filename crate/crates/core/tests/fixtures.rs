mod oracle;

use std::sync::Arc;

use ocuctx_core::{pc_loss, ClassSpec, ContextConfig, ContextFlags, LabelMask, PunishMode};

/// 8×8: iris rows 1–3 / cols 1–3, sclera rows `sclera_top..sclera_top+3` / cols 5–7.
fn two_block(sclera_top: usize) -> Vec<u8> {
    let mut m = vec![0u8; 64];
    for r in 1..4 {
        for c in 1..4 {
            m[r * 8 + c] = 1;
        }
    }
    for r in sclera_top..sclera_top + 3 {
        for c in 5..8 {
            m[r * 8 + c] = 2;
        }
    }
    m
}

fn run(spec: ClassSpec) -> (ocuctx_core::ContextResult, oracle::OracleContext) {
    let spec = Arc::new(spec);
    let cfg = ContextConfig::new(spec.clone(), PunishMode::Multiplicative);
    let (g, p) = (two_block(5), two_block(4));
    let gt = LabelMask::new(8, 8, g.clone(), spec.clone()).unwrap();
    let pred = LabelMask::new(8, 8, p.clone(), spec.clone()).unwrap();
    let labels = spec.context_labels();
    (pc_loss(&gt, &pred, &cfg).unwrap(), oracle::context(&g, &p, 8, &labels, 1e-9))
}

#[test]
fn shifted_sclera_foreground_only() {
    let (r, o) = run(ClassSpec::ocular_default().with_background_in_context(false));
    // sclera keeps 6 of 12 union pixels; centroids (2,2),(6,6) vs (2,2),(5,6)
    let expected_rho = 5.0 / (4.0 * 2f64.sqrt());
    assert_eq!(r.thetas.iter().map(|t| t.theta).collect::<Vec<_>>(), vec![0.0, 0.5]);
    assert_eq!(r.lambda, 0.5);
    assert!((r.delta_gt - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.delta_pred, 5.0);
    assert!((r.rho - expected_rho).abs() < 1e-12);
    assert!((r.pc_loss - (0.5 + expected_rho) / 2.0).abs() < 1e-12);
    assert!((r.pc_loss - o.pc_loss).abs() < 1e-12);
    assert!(r.flags.is_empty());
}

#[test]
fn shifted_sclera_with_background() {
    let (r, o) = run(ClassSpec::ocular_default());
    // background: 43 shared of 49 union pixels
    assert_eq!(r.thetas[0].label, 0);
    assert!((r.thetas[0].theta - 6.0 / 49.0).abs() < 1e-15);
    assert!((r.lambda - 1.0 / 3.0).abs() < 1e-15);
    assert!((r.delta_gt - 3.771236166328253).abs() < 1e-12);
    assert!((r.delta_pred - 3.3575608815623803).abs() < 1e-12);
    assert!((r.rho - 0.8903077753497908).abs() < 1e-12);
    assert!((r.pc_loss - 0.611820554341562).abs() < 1e-12);
    assert!((r.pc_loss - o.pc_loss).abs() < 1e-12);
    assert_eq!(r.pc_loss, (r.lambda + r.rho) / 2.0);
}

#[test]
fn perfect_prediction_scores_one_half() {
    let spec = Arc::new(ClassSpec::ocular_default());
    let cfg = ContextConfig::new(spec.clone(), PunishMode::Additive);
    let gt = LabelMask::new(8, 8, two_block(5), spec).unwrap();
    let r = pc_loss(&gt, &gt, &cfg).unwrap();
    assert_eq!((r.lambda, r.rho, r.pc_loss), (0.0, 1.0, 0.5));
    assert_eq!(r.flags, ContextFlags::empty());
}
