//! The JSON model file.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "generator": { "kind": "shifted_real", "alpha": [0, 1], "abscissa": [[1, 1]],
//!                  "growth_exponent": 1, "eps": 0.5 },
//!   "xi": { "tail": [{ "decay": 1 }] },
//!   "tolerance": { "inner_product_tol": 1e-12 },
//!   "seed": 42,
//!   "subspace": [{ "u": [1], "v": [[0, -1]] }]
//! }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use normext::vishik::BoundaryValue;
use normext::{AtomGenerator, DiagonalSymbol, DiscreteModel, ModelVector, TailTerm, Tolerance};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A complex number written as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Real(f64),
    Complex([f64; 2]),
}

impl Coef {
    pub fn value(self) -> Complex64 {
        match self {
            Coef::Real(x) => Complex64::new(x, 0.0),
            Coef::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn one() -> Coef {
    Coef::Real(1.0)
}

fn identity() -> String {
    "identity".into()
}

fn first() -> u64 {
    1
}

/// `coef · symbol(z_k) · k^(−decay)` for `k ≥ start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    #[serde(default = "one")]
    pub coef: Coef,
    #[serde(default = "identity")]
    pub symbol: String,
    pub decay: f64,
    #[serde(default = "first")]
    pub start: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    /// `[index, coef]` pairs, indices from 1.
    #[serde(default)]
    pub finite: Vec<(u64, Coef)>,
    #[serde(default)]
    pub tail: Vec<TailSpec>,
}

impl VectorSpec {
    pub fn build(&self) -> Result<ModelVector, CliError> {
        if let Some((k, _)) = self.finite.iter().find(|(k, _)| *k == 0) {
            return Err(CliError::Schema(format!("xi.finite index {k}: indices start at 1")));
        }
        let mut tail = Vec::with_capacity(self.tail.len());
        for t in &self.tail {
            let symbol = DiagonalSymbol::from_name(&t.symbol)
                .ok_or_else(|| CliError::Schema(format!("unknown symbol {:?}", t.symbol)))?;
            if !(t.decay.is_finite() && t.decay > 0.0) {
                return Err(CliError::Schema(format!("decay must be positive, got {}", t.decay)));
            }
            tail.push(TailTerm::new(t.coef.value(), symbol, t.decay, t.start));
        }
        Ok(ModelVector::new(self.finite.iter().map(|&(k, c)| (k, c.value())), tail))
    }
}

/// Tolerance overrides; missing fields keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub inner_product_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub subspace_tol: Option<f64>,
    pub truncation_cap: Option<u64>,
}

impl ToleranceSpec {
    pub fn resolve(&self) -> Tolerance {
        let d = Tolerance::default();
        Tolerance {
            inner_product_tol: self.inner_product_tol.unwrap_or(d.inner_product_tol),
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            subspace_tol: self.subspace_tol.unwrap_or(d.subspace_tol),
            truncation_cap: self.truncation_cap.unwrap_or(d.truncation_cap),
        }
    }
}

/// One basis vector `(u, v)` of an extension subspace, in kernel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub u: Vec<Coef>,
    pub v: Vec<Coef>,
}

impl BoundarySpec {
    pub fn value(&self) -> BoundaryValue {
        BoundaryValue::new(
            self.u.iter().map(|c| c.value()).collect(),
            self.v.iter().map(|c| c.value()).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub generator: AtomGenerator,
    pub xi: VectorSpec,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub subspace: Option<Vec<BoundarySpec>>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        match value.get("schema_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => return Err(CliError::Schema(format!("unsupported schema_version {v}"))),
            None => return Err(CliError::Schema("missing field `schema_version`".into())),
        }
        serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))
    }

    /// Canonical serialization, used for the report digest.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("model file serializes")
    }

    pub fn build(&self, tolerance: Tolerance) -> Result<DiscreteModel, CliError> {
        let xi = self.xi.build()?;
        Ok(DiscreteModel::new(self.generator.clone(), xi, tolerance)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIFTED: &str = r#"{
        "schema_version": 1,
        "generator": {"kind": "shifted_real", "alpha": [0, 1], "abscissa": [[1, 1]],
                      "growth_exponent": 1, "eps": 0.5},
        "xi": {"tail": [{"decay": 1}]}
    }"#;

    #[test]
    fn parses_and_builds() {
        let f = ModelFile::parse(SHIFTED).unwrap();
        let m = f.build(f.tolerance.resolve()).unwrap();
        assert_eq!(m.atom(3), Complex64::new(3.0, 1.0));
        assert_eq!(ModelFile::parse(&f.canonical()).unwrap(), f);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(ModelFile::parse("{"), Err(CliError::Parse(_))));
        assert!(matches!(ModelFile::parse("{}"), Err(CliError::Schema(_))));
        let bad = SHIFTED.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(matches!(ModelFile::parse(&bad), Err(CliError::Schema(_))));
        let bad = SHIFTED.replace("\"xi\"", "\"zeta\"");
        assert!(matches!(ModelFile::parse(&bad), Err(CliError::Schema(_))));
    }

    #[test]
    fn symbols_and_coefficients() {
        let spec: VectorSpec =
            serde_json::from_str(r#"{"finite": [[2, [1, -1]]], "tail": [{"coef": [0, 2], "symbol": "z_inv", "decay": 1}]}"#)
                .unwrap();
        let v = spec.build().unwrap();
        assert_eq!(v.finite_part()[&2], Complex64::new(1.0, -1.0));
        assert_eq!(v.tail()[0].modulus, -1);
        let bad: VectorSpec = serde_json::from_str(r#"{"tail": [{"symbol": "sin", "decay": 1}]}"#).unwrap();
        assert!(bad.build().is_err());
    }
}
