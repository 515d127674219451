//! The evaluated class vocabulary.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default division guard for the spatial ratio, in pixels.
pub const DEFAULT_EPSILON_DELTA: f64 = 1e-9;

/// One foreground class: the raw 8-bit label value and its name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassDef {
    pub label: u8,
    pub name: String,
}

impl ClassDef {
    pub fn new(label: u8, name: impl Into<String>) -> Self {
        Self {
            label,
            name: name.into(),
        }
    }
}

/// Ordered foreground classes plus the background policy.
///
/// Foreground classes keep the order they were declared in; every per-class
/// list produced downstream follows it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassSpec {
    classes: Vec<ClassDef>,
    background_label: u8,
    include_background_in_context: bool,
    epsilon_delta: f64,
    /// Labels retired by a merge, paired with the label they were folded into.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Vec::is_empty"))]
    merged: Vec<(u8, u8)>,
}

impl ClassSpec {
    pub fn new(
        classes: Vec<ClassDef>,
        background_label: u8,
        include_background_in_context: bool,
        epsilon_delta: f64,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidSpec("at least one foreground class is required".into()));
        }
        for (i, class) in classes.iter().enumerate() {
            if class.label == background_label {
                return Err(Error::InvalidSpec(format!(
                    "class '{}' reuses the background label {}",
                    class.name, background_label
                )));
            }
            if classes[..i].iter().any(|c| c.label == class.label) {
                return Err(Error::InvalidSpec(format!("duplicate label {}", class.label)));
            }
        }
        if !(epsilon_delta > 0.0 && epsilon_delta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "epsilon_delta must be positive, got {epsilon_delta}"
            )));
        }
        Ok(Self {
            classes,
            background_label,
            include_background_in_context,
            epsilon_delta,
            merged: Vec::new(),
        })
    }

    /// Background 0, iris 1, sclera 2, background included in context.
    pub fn ocular_default() -> Self {
        Self::new(
            alloc::vec![ClassDef::new(1, "iris"), ClassDef::new(2, "sclera")],
            0,
            true,
            DEFAULT_EPSILON_DELTA,
        )
        .expect("default spec is valid")
    }

    pub fn classes(&self) -> &[ClassDef] {
        &self.classes
    }

    pub fn background_label(&self) -> u8 {
        self.background_label
    }

    pub fn include_background_in_context(&self) -> bool {
        self.include_background_in_context
    }

    pub fn epsilon_delta(&self) -> f64 {
        self.epsilon_delta
    }

    pub fn foreground_labels(&self) -> impl Iterator<Item = u8> + '_ {
        self.classes.iter().map(|c| c.label)
    }

    pub fn is_foreground(&self, label: u8) -> bool {
        self.classes.iter().any(|c| c.label == label)
    }

    /// True for any foreground label or the background label.
    pub fn is_known(&self, label: u8) -> bool {
        label == self.background_label || self.is_foreground(label)
    }

    pub fn class(&self, label: u8) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn class_by_name(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Name of a foreground class, or `"background"` for the background label.
    pub fn name_of(&self, label: u8) -> Option<&str> {
        if label == self.background_label {
            return Some("background");
        }
        self.class(label).map(|c| c.name.as_str())
    }

    /// Labels taking part in λ and δ: background first when included, then
    /// the foreground classes in declaration order.
    pub fn context_labels(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.classes.len() + 1);
        if self.include_background_in_context {
            out.push(self.background_label);
        }
        out.extend(self.foreground_labels());
        out
    }

    /// Label that `label` was folded into by an earlier merge, if any.
    pub fn merged_into(&self, label: u8) -> Option<u8> {
        self.merged.iter().find(|(from, _)| *from == label).map(|(_, to)| *to)
    }

    pub fn with_epsilon_delta(mut self, epsilon_delta: f64) -> Result<Self> {
        if !(epsilon_delta > 0.0 && epsilon_delta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "epsilon_delta must be positive, got {epsilon_delta}"
            )));
        }
        self.epsilon_delta = epsilon_delta;
        Ok(self)
    }

    pub fn with_background_in_context(mut self, include: bool) -> Self {
        self.include_background_in_context = include;
        self
    }

    /// Spec after folding `sources` into `target`. Sources must be
    /// foreground labels, or labels already folded into `target`.
    pub(crate) fn merged_spec(&self, sources: &[u8], target: &ClassDef) -> Result<Self> {
        if target.label == self.background_label {
            return Err(Error::UnknownLabel(target.label));
        }
        for &s in sources {
            if !self.is_foreground(s) && self.merged_into(s) != Some(target.label) {
                return Err(Error::UnknownLabel(s));
            }
        }
        let mut merged = self.merged.clone();
        let mut classes = Vec::with_capacity(self.classes.len());
        let mut placed = false;
        for class in &self.classes {
            let folded = sources.contains(&class.label);
            if class.label == target.label || (folded && !placed) {
                if !placed {
                    classes.push(target.clone());
                    placed = true;
                }
            } else if !folded {
                classes.push(class.clone());
            }
            if folded && class.label != target.label {
                merged.retain(|(from, _)| *from != class.label);
                merged.push((class.label, target.label));
            }
        }
        if !placed {
            classes.push(target.clone());
        }
        // Chains collapse onto the newest target.
        for entry in merged.iter_mut() {
            if sources.contains(&entry.1) && entry.1 != target.label {
                entry.1 = target.label;
            }
        }
        let mut spec = Self::new(
            classes,
            self.background_label,
            self.include_background_in_context,
            self.epsilon_delta,
        )?;
        spec.merged = merged;
        Ok(spec)
    }

    /// Spec keeping only `keep` as foreground; other classes become background.
    pub(crate) fn retained_spec(&self, keep: &[u8]) -> Result<Self> {
        for &k in keep {
            if !self.is_foreground(k) {
                return Err(Error::UnknownLabel(k));
            }
        }
        let classes = self
            .classes
            .iter()
            .filter(|c| keep.contains(&c.label))
            .cloned()
            .collect();
        Self::new(
            classes,
            self.background_label,
            self.include_background_in_context,
            self.epsilon_delta,
        )
    }
}

impl core::fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let names: Vec<String> = self
            .classes
            .iter()
            .map(|c| format!("{}={}", c.label, c.name))
            .collect();
        write!(f, "{{{}; bg={}}}", names.join(", "), self.background_label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_background_collision() {
        let err = ClassSpec::new(vec![ClassDef::new(0, "iris")], 0, true, 1e-9).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(ClassSpec::new(
            vec![ClassDef::new(1, "a"), ClassDef::new(1, "b")],
            0,
            true,
            1e-9
        )
        .is_err());
        assert!(ClassSpec::new(vec![], 0, true, 1e-9).is_err());
    }

    #[test]
    fn rejects_non_positive_epsilon() {
        assert!(ClassSpec::new(vec![ClassDef::new(1, "a")], 0, true, 0.0).is_err());
        assert!(ClassSpec::new(vec![ClassDef::new(1, "a")], 0, true, -1.0).is_err());
    }

    #[test]
    fn context_labels_follow_background_policy() {
        let spec = ClassSpec::ocular_default();
        assert_eq!(spec.context_labels(), vec![0, 1, 2]);
        let spec = spec.with_background_in_context(false);
        assert_eq!(spec.context_labels(), vec![1, 2]);
    }

    #[test]
    fn merged_spec_places_target_at_first_source() {
        let spec = ClassSpec::new(
            vec![ClassDef::new(1, "iris"), ClassDef::new(2, "sclera"), ClassDef::new(3, "pupil")],
            0,
            true,
            1e-9,
        )
        .unwrap();
        let merged = spec.merged_spec(&[1, 2], &ClassDef::new(9, "eye")).unwrap();
        assert_eq!(
            merged.classes(),
            &[ClassDef::new(9, "eye"), ClassDef::new(3, "pupil")]
        );
        assert_eq!(merged.merged_into(1), Some(9));
        assert_eq!(merged.merged_into(2), Some(9));
        // folding the same sources again is accepted
        let again = merged.merged_spec(&[1, 2], &ClassDef::new(9, "eye")).unwrap();
        assert_eq!(again, merged);
    }
}
