//! Label masks and their per-class binary views.
//!
//! Coordinates are `(row, col)` with the origin at the top-left corner and
//! rows increasing downward. Labels are stored row-major.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::class_spec::{ClassDef, ClassSpec};
use crate::error::{Error, Result};

/// A `width × height` grid of class labels validated against a [`ClassSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<u8>,
    spec: Arc<ClassSpec>,
}

impl LabelMask {
    /// Builds a mask, rejecting any pixel whose label the spec does not know.
    pub fn new(width: usize, height: usize, labels: Vec<u8>, spec: Arc<ClassSpec>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(Error::InvalidDimensions { width, height })?;
        if labels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: labels.len(),
            });
        }
        let known = known_table(&spec);
        if let Some(idx) = labels.iter().position(|&l| !known[l as usize]) {
            return Err(Error::UnknownPixel {
                label: labels[idx],
                row: idx / width,
                col: idx % width,
            });
        }
        Ok(Self {
            width,
            height,
            labels,
            spec,
        })
    }

    /// A mask filled with the background label.
    pub fn background(width: usize, height: usize, spec: Arc<ClassSpec>) -> Result<Self> {
        let bg = spec.background_label();
        Self::new(width, height, vec![bg; width.saturating_mul(height)], spec)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn spec(&self) -> &ClassSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<ClassSpec> {
        &self.spec
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        if row < self.height && col < self.width {
            Some(self.labels[row * self.width + col])
        } else {
            None
        }
    }

    pub fn into_labels(self) -> Vec<u8> {
        self.labels
    }

    /// Number of pixels carrying `label`.
    pub fn count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Rotates the grid 90° clockwise.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut out = vec![0u8; w * h];
        // (r, c) -> (c, h - 1 - r) in an h-wide grid
        for r in 0..h {
            for c in 0..w {
                out[c * h + (h - 1 - r)] = self.labels[r * w + c];
            }
        }
        self.with_grid(h, w, out)
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut out = self.labels.clone();
        for row in out.chunks_mut(self.width) {
            row.reverse();
        }
        self.with_grid(self.width, self.height, out)
    }

    /// Nearest-neighbour upscaling by an integer factor.
    pub fn upscale(&self, factor: usize) -> Self {
        assert!(factor >= 1, "upscale factor must be at least 1");
        let (w, h) = (self.width * factor, self.height * factor);
        let mut out = Vec::with_capacity(w * h);
        for r in 0..h {
            let src = &self.labels[(r / factor) * self.width..(r / factor + 1) * self.width];
            for c in 0..w {
                out.push(src[c / factor]);
            }
        }
        self.with_grid(w, h, out)
    }

    /// Pads the grid with background, which translates the content by
    /// `(top, left)` on a larger canvas.
    pub fn pad(&self, top: usize, left: usize, bottom: usize, right: usize) -> Self {
        let w = self.width + left + right;
        let h = self.height + top + bottom;
        let mut out = vec![self.spec.background_label(); w * h];
        for r in 0..self.height {
            let dst = (r + top) * w + left;
            out[dst..dst + self.width]
                .copy_from_slice(&self.labels[r * self.width..(r + 1) * self.width]);
        }
        self.with_grid(w, h, out)
    }

    /// Foreground classes in `keep` stay; every other foreground pixel
    /// becomes background and the spec shrinks accordingly.
    pub fn retain_classes(&self, keep: &[u8]) -> Result<Self> {
        let spec = self.spec.retained_spec(keep)?;
        let bg = spec.background_label();
        let labels = self
            .labels
            .iter()
            .map(|&l| if keep.contains(&l) { l } else { bg })
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            labels,
            spec: Arc::new(spec),
        })
    }

    // Geometry changes never introduce new labels, so no revalidation.
    fn with_grid(&self, width: usize, height: usize, labels: Vec<u8>) -> Self {
        Self {
            width,
            height,
            labels,
            spec: Arc::clone(&self.spec),
        }
    }
}

fn known_table(spec: &ClassSpec) -> [bool; 256] {
    let mut known = [false; 256];
    known[spec.background_label() as usize] = true;
    for l in spec.foreground_labels() {
        known[l as usize] = true;
    }
    known
}

/// One bit per pixel marking membership of a single class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_bools(width: usize, height: usize, bits: &[bool]) -> Self {
        assert_eq!(bits.len(), width * height, "bit count must equal width * height");
        let mut mask = Self::new(width, height);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                mask.words[i / 64] |= 1 << (i % 64);
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> bool {
        index < self.len() && self.words[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn get_rc(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width && self.get(row * self.width + col)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Row-major indices of member pixels.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Membership mask of `label` (a foreground class or the background).
pub fn binarize(mask: &LabelMask, label: u8) -> Result<BinaryMask> {
    if !mask.spec.is_known(label) {
        return Err(Error::UnknownLabel(label));
    }
    let mut out = BinaryMask::new(mask.width, mask.height);
    for (wi, chunk) in mask.labels.chunks(64).enumerate() {
        let mut word = 0u64;
        for (bit, &l) in chunk.iter().enumerate() {
            word |= u64::from(l == label) << bit;
        }
        out.words[wi] = word;
    }
    Ok(out)
}

/// Relabels every pixel in `sources` as `target.label`.
///
/// The output spec drops the sources and declares `target` in place of the
/// first of them. An empty source set returns the mask unchanged.
pub fn merge_classes(mask: &LabelMask, sources: &[u8], target: &ClassDef) -> Result<LabelMask> {
    if sources.is_empty() {
        return Ok(mask.clone());
    }
    let spec = mask.spec.merged_spec(sources, target)?;
    let mut lut: [u8; 256] = core::array::from_fn(|i| i as u8);
    for &s in sources {
        lut[s as usize] = target.label;
    }
    let labels = mask.labels.iter().map(|&l| lut[l as usize]).collect();
    Ok(LabelMask {
        width: mask.width,
        height: mask.height,
        labels,
        spec: Arc::new(spec),
    })
}

/// Checks that two masks can be compared pixel-to-pixel.
pub fn validate_pair(gt: &LabelMask, pred: &LabelMask) -> Result<()> {
    if gt.width != pred.width || gt.height != pred.height {
        return Err(Error::DimensionMismatch {
            gt_width: gt.width,
            gt_height: gt.height,
            pred_width: pred.width,
            pred_height: pred.height,
        });
    }
    if !Arc::ptr_eq(&gt.spec, &pred.spec) && gt.spec != pred.spec {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}
