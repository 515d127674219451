//! JSON class configuration files.
//!
//! ```json
//! { "1": "iris", "2": "sclera", "background": 0,
//!   "include_background_in_context": true, "epsilon_delta": 1e-9 }
//! ```
//!
//! Integer keys declare foreground classes and are ordered by label value.
//! The three named keys are optional and default to 0, `true` and 1e-9.

use std::path::Path;

use ocuctx_core::class_spec::DEFAULT_EPSILON_DELTA;
use ocuctx_core::{ClassDef, ClassSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub fn load_class_config(path: &Path) -> Result<ClassSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_class_config(&text)
}

pub fn parse_class_config(text: &str) -> Result<ClassSpec> {
    let obj: Map<String, Value> = serde_json::from_str(text)?;
    let mut classes = Vec::new();
    let mut background = 0u8;
    let mut include_background = true;
    let mut epsilon = DEFAULT_EPSILON_DELTA;
    for (key, value) in &obj {
        match key.as_str() {
            "background" => background = label_value(key, value)?,
            "include_background_in_context" => {
                include_background = value
                    .as_bool()
                    .ok_or_else(|| Error::ClassConfig(format!("'{key}' must be a boolean")))?
            }
            "epsilon_delta" => {
                epsilon = value
                    .as_f64()
                    .ok_or_else(|| Error::ClassConfig(format!("'{key}' must be a number")))?
            }
            _ => {
                let label: u8 = key
                    .parse()
                    .map_err(|_| Error::ClassConfig(format!("unexpected key '{key}'")))?;
                let name = value
                    .as_str()
                    .ok_or_else(|| Error::ClassConfig(format!("name of class {label} must be a string")))?;
                classes.push(ClassDef::new(label, name));
            }
        }
    }
    classes.sort_by_key(|c| c.label);
    if let Some(dup) = classes.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::ClassConfig(format!("class name '{}' declared twice", dup[0].name)));
    }
    ClassSpec::new(classes, background, include_background, epsilon).map_err(|e| Error::ClassConfig(e.to_string()))
}

fn label_value(key: &str, value: &Value) -> Result<u8> {
    value
        .as_u64()
        .and_then(|v| u8::try_from(v).ok())
        .ok_or_else(|| Error::ClassConfig(format!("'{key}' must be an integer in 0..=255")))
}

/// Serializable copy of a [`ClassSpec`], echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassConfigEcho {
    pub classes: Vec<ClassDef>,
    pub background: u8,
    pub include_background_in_context: bool,
    pub epsilon_delta: f64,
}

impl From<&ClassSpec> for ClassConfigEcho {
    fn from(spec: &ClassSpec) -> Self {
        Self {
            classes: spec.classes().to_vec(),
            background: spec.background_label(),
            include_background_in_context: spec.include_background_in_context(),
            epsilon_delta: spec.epsilon_delta(),
        }
    }
}

impl ClassConfigEcho {
    pub fn to_spec(&self) -> Result<ClassSpec> {
        Ok(ClassSpec::new(
            self.classes.clone(),
            self.background,
            self.include_background_in_context,
            self.epsilon_delta,
        )?)
    }
}
