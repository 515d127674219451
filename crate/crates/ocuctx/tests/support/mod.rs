#![allow(dead_code)]

use std::path::Path;

use ocuctx::io::write_gray;
use rand::Rng;

/// Random ground truth plus a perturbed prediction of the same eye.
pub fn synthetic_pair(rng: &mut impl Rng, width: usize, height: usize) -> (Vec<u8>, Vec<u8>) {
    let (h, w) = (height as f64, width as f64);
    let center = (rng.random_range(0.35 * h..0.65 * h), rng.random_range(0.35 * w..0.65 * w));
    let iris = rng.random_range(0.12 * h..0.2 * h);
    // iris off-centre in the sclera so the two centroids are apart
    let sclera_center = (center.0, center.1 + rng.random_range(0.05 * w..0.12 * w));
    let radii = (rng.random_range(0.22 * h..0.3 * h), rng.random_range(0.3 * w..0.4 * w));
    let gt = layered(width, height, center, iris, sclera_center, radii);
    let jitter = |rng: &mut dyn rand::RngCore, v: f64, s: f64| v + (rng.next_u32() as f64 / u32::MAX as f64 - 0.5) * s;
    let pred = layered(
        width,
        height,
        (jitter(rng, center.0, 10.0), jitter(rng, center.1, 10.0)),
        jitter(rng, iris, 6.0).max(1.0),
        (jitter(rng, sclera_center.0, 10.0), jitter(rng, sclera_center.1, 10.0)),
        (jitter(rng, radii.0, 8.0).max(2.0), jitter(rng, radii.1, 8.0).max(2.0)),
    );
    (gt, pred)
}

/// Sclera ellipse with an iris disk drawn over it.
pub fn layered(width: usize, height: usize, iris_center: (f64, f64), iris: f64, sclera_center: (f64, f64), radii: (f64, f64)) -> Vec<u8> {
    let mut m = vec![0u8; width * height];
    for r in 0..height {
        for c in 0..width {
            let (ir, ic) = (r as f64 - iris_center.0, c as f64 - iris_center.1);
            let (sr, sc) = (r as f64 - sclera_center.0, c as f64 - sclera_center.1);
            if ir * ir + ic * ic <= iris * iris {
                m[r * width + c] = 1;
            } else if (sr / radii.0).powi(2) + (sc / radii.1).powi(2) <= 1.0 {
                m[r * width + c] = 2;
            }
        }
    }
    m
}

/// Writes `count` synthetic pairs as `gt/NNNN.png` and `pred/NNNN.png`.
pub fn write_dataset(root: &Path, count: usize, width: usize, height: usize, rng: &mut impl Rng) {
    let gt = root.join("gt");
    let pred = root.join("pred");
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    for i in 0..count {
        let (g, p) = synthetic_pair(rng, width, height);
        write_gray(&gt.join(format!("{i:04}.png")), width, height, &g).unwrap();
        write_gray(&pred.join(format!("{i:04}.png")), width, height, &p).unwrap();
    }
}
