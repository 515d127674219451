//! Mask files: 8-bit single-channel PNG and binary PGM (P5).
//!
//! Pixel values are class labels as-is. Any value the class spec does not
//! declare is an error, reported with its `(row, col)`.

use std::path::Path;
use std::sync::Arc;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use ocuctx_core::{ClassSpec, LabelMask};

use crate::error::{Error, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Raw grayscale raster: `(width, height, row-major bytes)`.
pub fn read_gray(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let format = if bytes.starts_with(PNG_MAGIC) {
        ImageFormat::Png
    } else if bytes.starts_with(b"P5") {
        ImageFormat::Pnm
    } else if bytes.starts_with(b"P") && bytes.len() > 1 && bytes[1].is_ascii_digit() {
        return Err(unsupported(path, "only binary (P5) PGM is supported"));
    } else {
        return Err(unsupported(path, "not a PNG or PGM file"));
    };
    let img = image::load_from_memory_with_format(&bytes, format).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    match img {
        DynamicImage::ImageLuma8(gray) => {
            let (w, h) = gray.dimensions();
            Ok((w as usize, h as usize, gray.into_raw()))
        }
        other => Err(unsupported(
            path,
            &format!("expected 8-bit single-channel data, found {:?}", other.color()),
        )),
    }
}

fn unsupported(path: &Path, reason: &str) -> Error {
    Error::UnsupportedFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Loads a multi-class mask whose pixel values are labels.
pub fn load_mask(path: &Path, spec: &Arc<ClassSpec>) -> Result<LabelMask> {
    let (w, h, labels) = read_gray(path)?;
    LabelMask::new(w, h, labels, Arc::clone(spec)).map_err(|source| Error::Mask {
        path: path.to_path_buf(),
        source,
    })
}

/// Builds a label mask from one binary file per class (nonzero = member).
/// Classes without a file are empty; a pixel claimed by two files is an error.
pub fn load_per_class(files: &[(u8, &Path)], spec: &Arc<ClassSpec>) -> Result<LabelMask> {
    let bg = spec.background_label();
    let mut grid: Option<(usize, usize, Vec<u8>)> = None;
    for &(label, path) in files {
        if !spec.is_foreground(label) {
            return Err(Error::Mask {
                path: path.to_path_buf(),
                source: ocuctx_core::Error::UnknownLabel(label),
            });
        }
        let (w, h, bits) = read_gray(path)?;
        let (gw, gh, labels) = grid.get_or_insert_with(|| (w, h, vec![bg; w * h]));
        if (w, h) != (*gw, *gh) {
            return Err(Error::Dataset(format!(
                "{}: per-class mask is {w}x{h}, expected {gw}x{gh}",
                path.display()
            )));
        }
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                if labels[i] != bg {
                    return Err(Error::Dataset(format!(
                        "{}: pixel ({},{}) already belongs to label {}",
                        path.display(),
                        i / w,
                        i % w,
                        labels[i]
                    )));
                }
                labels[i] = label;
            }
        }
    }
    let (w, h, labels) = grid.ok_or_else(|| Error::Dataset("no per-class mask files given".into()))?;
    Ok(LabelMask::new(w, h, labels, Arc::clone(spec))?)
}

/// Writes the label grid as 8-bit grayscale; `.pgm` selects binary PGM,
/// anything else PNG.
pub fn save_mask(mask: &LabelMask, path: &Path) -> Result<()> {
    write_gray(path, mask.width(), mask.height(), mask.labels())
}

pub fn write_gray(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let out = std::io::BufWriter::new(file);
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let (w, h) = (width as u32, height as u32);
    let result = if is_pgm {
        PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(data, w, h, ExtendedColorType::L8)
    } else {
        image::codecs::png::PngEncoder::new(out).write_image(data, w, h, ExtendedColorType::L8)
    };
    result.map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// True for file names this module can read.
pub fn is_mask_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("pgm"))
}
