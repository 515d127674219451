//! Pairing ground-truth and prediction files into a manifest.
//!
//! Files are matched by stem. A stem ending in `_<class name>` (for a class
//! declared in the spec) is treated as one binary mask of a per-class set,
//! so `img01_iris.png` and `img01_sclera.png` together form image `img01`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use ocuctx_core::{merge_classes, ClassDef, ClassSpec, LabelMask};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// Which classes are scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Every foreground class merged into one region.
    All,
    /// Only the class named `iris`; other foreground becomes background.
    Iris,
    /// Only the class named `sclera`; other foreground becomes background.
    Sclera,
    /// Classes exactly as configured.
    #[default]
    Custom,
}

impl Scenario {
    pub const ALL_REGION_NAME: &'static str = "all";

    /// Spec that masks carry after [`Scenario::apply`].
    pub fn spec(self, base: &ClassSpec) -> Result<ClassSpec> {
        let probe = LabelMask::background(1, 1, Arc::new(base.clone()))?;
        Ok(self.apply(&probe)?.spec().clone())
    }

    pub fn apply(self, mask: &LabelMask) -> Result<LabelMask> {
        let spec = mask.spec();
        match self {
            Scenario::Custom => Ok(mask.clone()),
            Scenario::All => {
                let sources: Vec<u8> = spec.foreground_labels().collect();
                let target = ClassDef::new(sources[0], Self::ALL_REGION_NAME);
                Ok(merge_classes(mask, &sources, &target)?)
            }
            Scenario::Iris | Scenario::Sclera => {
                let name = self.to_string();
                let class = spec
                    .class_by_name(&name)
                    .ok_or_else(|| Error::Dataset(format!("scenario '{name}' needs a class named '{name}'")))?;
                Ok(mask.retain_classes(&[class.label])?)
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::All => "all",
            Scenario::Iris => "iris",
            Scenario::Sclera => "sclera",
            Scenario::Custom => "custom",
        })
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Scenario::All),
            "iris" => Ok(Scenario::Iris),
            "sclera" => Ok(Scenario::Sclera),
            "custom" => Ok(Scenario::Custom),
            other => Err(format!("unknown scenario '{other}'")),
        }
    }
}

/// Where the mask of one image comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskSource {
    Single(PathBuf),
    PerClass(Vec<(u8, PathBuf)>),
}

impl MaskSource {
    pub fn load(&self, spec: &Arc<ClassSpec>) -> Result<LabelMask> {
        match self {
            MaskSource::Single(path) => io::load_mask(path, spec),
            MaskSource::PerClass(files) => {
                let refs: Vec<(u8, &Path)> = files.iter().map(|(l, p)| (*l, p.as_path())).collect();
                io::load_per_class(&refs, spec)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImagePair {
    pub id: String,
    pub gt: MaskSource,
    pub pred: MaskSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub pairs: Vec<ImagePair>,
    pub spec: Arc<ClassSpec>,
    pub scenario: Scenario,
}

impl DatasetManifest {
    pub fn ids(&self) -> Vec<String> {
        self.pairs.iter().map(|p| p.id.clone()).collect()
    }
}

/// Mask sources found in one directory, keyed by image id.
pub fn scan_dir(dir: &Path, spec: Option<&ClassSpec>) -> Result<BTreeMap<String, MaskSource>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut singles: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut per_class: BTreeMap<String, Vec<(u8, PathBuf)>> = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() || !io::is_mask_file(&path) {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
            continue;
        };
        let class_part = spec.and_then(|spec| {
            spec.classes().iter().find_map(|c| {
                stem.strip_suffix(&c.name)
                    .and_then(|rest| rest.strip_suffix('_'))
                    .filter(|rest| !rest.is_empty())
                    .map(|rest| (rest.to_string(), c.label))
            })
        });
        match class_part {
            Some((id, label)) => per_class.entry(id).or_default().push((label, path)),
            None => {
                if let Some(previous) = singles.insert(stem.clone(), path.clone()) {
                    return Err(Error::Dataset(format!(
                        "image '{stem}' appears twice: {} and {}",
                        previous.display(),
                        path.display()
                    )));
                }
            }
        }
    }
    let mut out: BTreeMap<String, MaskSource> =
        singles.into_iter().map(|(id, p)| (id, MaskSource::Single(p))).collect();
    for (id, mut files) in per_class {
        if out.contains_key(&id) {
            return Err(Error::Dataset(format!(
                "image '{id}' has both a multi-class file and per-class files"
            )));
        }
        files.sort();
        out.insert(id, MaskSource::PerClass(files));
    }
    Ok(out)
}

/// Result of [`discover`]: the manifest plus unmatched-file warnings.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub manifest: DatasetManifest,
    pub warnings: Vec<String>,
}

/// Pairs masks in `gt_dir` and `pred_dir` by image id, in id order.
pub fn discover(gt_dir: &Path, pred_dir: &Path, spec: Arc<ClassSpec>, scenario: Scenario) -> Result<Discovery> {
    let mut gt = scan_dir(gt_dir, Some(&spec))?;
    let mut pred = scan_dir(pred_dir, Some(&spec))?;
    let mut warnings = Vec::new();
    for id in gt.keys().filter(|id| !pred.contains_key(*id)) {
        warnings.push(format!("no prediction for ground truth '{id}'"));
    }
    for id in pred.keys().filter(|id| !gt.contains_key(*id)) {
        warnings.push(format!("no ground truth for prediction '{id}'"));
    }
    let ids: Vec<String> = gt.keys().filter(|id| pred.contains_key(*id)).cloned().collect();
    if ids.is_empty() {
        return Err(Error::Dataset(format!(
            "no image ids in common between {} and {}",
            gt_dir.display(),
            pred_dir.display()
        )));
    }
    let pairs = ids
        .into_iter()
        .map(|id| ImagePair {
            gt: gt.remove(&id).expect("id from gt"),
            pred: pred.remove(&id).expect("id from pred"),
            id,
        })
        .collect();
    Ok(Discovery {
        manifest: DatasetManifest { pairs, spec, scenario },
        warnings,
    })
}

/// Sorted image ids of the mask files in `dir`.
pub fn list_ids(dir: &Path, spec: Option<&ClassSpec>) -> Result<Vec<String>> {
    Ok(scan_dir(dir, spec)?.into_keys().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_gray;

    #[test]
    fn scenarios_transform_masks() {
        let spec = Arc::new(ClassSpec::ocular_default());
        let m = LabelMask::new(2, 2, vec![0, 1, 2, 2], spec).unwrap();
        assert_eq!(Scenario::All.apply(&m).unwrap().labels(), &[0, 1, 1, 1]);
        assert_eq!(Scenario::Iris.apply(&m).unwrap().labels(), &[0, 1, 0, 0]);
        assert_eq!(Scenario::Sclera.apply(&m).unwrap().labels(), &[0, 0, 2, 2]);
        assert_eq!(Scenario::Custom.apply(&m).unwrap(), m);
        let all = Scenario::All.spec(m.spec()).unwrap();
        assert_eq!(all.classes(), &[ClassDef::new(1, "all")]);
        assert_eq!("SCLERA".parse::<Scenario>().unwrap(), Scenario::Sclera);
    }

    #[test]
    fn discover_pairs_by_stem_and_warns() {
        let gt = tempfile::tempdir().unwrap();
        let pred = tempfile::tempdir().unwrap();
        for id in ["a", "b", "c"] {
            write_gray(&gt.path().join(format!("{id}.png")), 2, 2, &[0; 4]).unwrap();
        }
        for id in ["b", "a", "z"] {
            write_gray(&pred.path().join(format!("{id}.pgm")), 2, 2, &[0; 4]).unwrap();
        }
        // per-class prediction for c
        write_gray(&pred.path().join("c_iris.png"), 2, 2, &[255, 0, 0, 0]).unwrap();
        std::fs::write(pred.path().join("notes.txt"), "x").unwrap();

        let spec = Arc::new(ClassSpec::ocular_default());
        let d = discover(gt.path(), pred.path(), spec.clone(), Scenario::Custom).unwrap();
        assert_eq!(d.manifest.ids(), vec!["a", "b", "c"]);
        assert!(matches!(d.manifest.pairs[2].pred, MaskSource::PerClass(_)));
        assert_eq!(d.warnings, vec!["no ground truth for prediction 'z'".to_string()]);
        let m = d.manifest.pairs[2].pred.load(&spec).unwrap();
        assert_eq!(m.labels(), &[1, 0, 0, 0]);
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let gt = tempfile::tempdir().unwrap();
        let pred = tempfile::tempdir().unwrap();
        write_gray(&gt.path().join("a.png"), 1, 1, &[0]).unwrap();
        write_gray(&pred.path().join("b.png"), 1, 1, &[0]).unwrap();
        let spec = Arc::new(ClassSpec::ocular_default());
        assert!(matches!(
            discover(gt.path(), pred.path(), spec, Scenario::Custom),
            Err(Error::Dataset(_))
        ));
    }
}
