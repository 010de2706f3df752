//! Machine-readable run reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use normext::Tolerance;

use crate::schema::SCHEMA_VERSION;

/// A named residual and its certified error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub bound: f64,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Residual { name: name.into(), value, bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical model file.
    pub model_digest: String,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub verdicts: Vec<Verdict>,
    pub residuals: Vec<Residual>,
    /// Command-specific results.
    pub data: serde_json::Map<String, serde_json::Value>,
    /// Wall-clock timings; only present when requested, since they break
    /// byte determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl RunReport {
    pub fn new(command: &str, canonical_model: &str, seed: u64, tolerance: Tolerance) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: "normext".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            model_digest: digest(canonical_model),
            seed,
            tolerance,
            verdicts: Vec::new(),
            residuals: Vec::new(),
            data: serde_json::Map::new(),
            timings: None,
        }
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), passed, detail: detail.into() });
    }

    pub fn residual(&mut self, name: &str, value: f64, bound: f64) {
        self.residuals.push(Residual::new(name, value, bound));
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        self.data.insert(key.into(), v);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn digest(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect()
}
