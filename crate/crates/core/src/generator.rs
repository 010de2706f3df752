//! Atom generators `k ↦ z_k` and their certified growth analysis.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest index scanned explicitly while certifying the growth envelope.
pub const ANALYSIS_CAP: u64 = 1 << 24;

/// Prefix on which the modulus ordering of atoms is checked.
pub const SORT_PREFIX: u64 = 4096;

/// `Σ c_j k^{e_j}` with complex coefficients and real exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSum {
    terms: Vec<(Complex64, f64)>,
}

impl PowerSum {
    /// Builds a power sum, merging equal exponents, dropping zero
    /// coefficients and ordering by decreasing exponent.
    pub fn new(terms: impl IntoIterator<Item = (Complex64, f64)>) -> Self {
        let mut v: Vec<(Complex64, f64)> = terms.into_iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut out: Vec<(Complex64, f64)> = Vec::with_capacity(v.len());
        for (c, e) in v {
            match out.last_mut() {
                Some(last) if last.1 == e => last.0 += c,
                _ => out.push((c, e)),
            }
        }
        out.retain(|(c, _)| *c != Complex64::new(0.0, 0.0));
        PowerSum { terms: out }
    }

    pub fn real(terms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self::new(terms.into_iter().map(|(c, e)| (Complex64::new(c, 0.0), e)))
    }

    /// The identity rule `k ↦ k`.
    pub fn index() -> Self {
        Self::real([(1.0, 1.0)])
    }

    pub fn terms(&self) -> &[(Complex64, f64)] {
        &self.terms
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.im == 0.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.terms.iter().map(|&(c, e)| (c * s, e)))
    }

    pub fn plus(&self, other: &PowerSum) -> Self {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    #[inline]
    pub fn eval(&self, k: u64) -> Complex64 {
        let kf = k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, e) in &self.terms {
            acc += c * kpow(kf, e);
        }
        acc
    }

    #[inline]
    pub fn eval_real(&self, k: u64) -> f64 {
        let kf = k as f64;
        self.terms.iter().map(|&(c, e)| c.re * kpow(kf, e)).sum()
    }
}

#[inline]
fn kpow(k: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        k
    } else if e.fract() == 0.0 && e.abs() <= 64.0 {
        k.powi(e as i32)
    } else {
        k.powf(e)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoefRepr {
    Real(f64),
    Complex(Complex64),
}

impl Serialize for PowerSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter())
    }
}

impl<'de> Deserialize<'de> for PowerSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(CoefRepr, f64)> = Vec::deserialize(d)?;
        Ok(PowerSum::new(raw.into_iter().map(|(c, e)| {
            let c = match c {
                CoefRepr::Real(r) => Complex64::new(r, 0.0),
                CoefRepr::Complex(c) => c,
            };
            (c, e)
        })))
    }
}

/// A real slope, or the vertical direction `t = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Finite(f64),
    Infinite,
}

impl Slope {
    pub fn finite(self) -> Option<f64> {
        match self {
            Slope::Finite(t) => Some(t),
            Slope::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Slope::Infinite)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(t) => write!(f, "{t}"),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slope::Finite(t) => s.serialize_f64(*t),
            Slope::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(t) if t.is_finite() => Ok(Slope::Finite(t)),
            Repr::Num(_) => Err(serde::de::Error::custom("slope must be finite or \"inf\"")),
            Repr::Str(s) => match s.as_str() {
                "inf" | "infinity" | "∞" => Ok(Slope::Infinite),
                other => Err(serde::de::Error::custom(format!("unknown slope {other:?}"))),
            },
        }
    }
}

/// How the atoms are laid out in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomRule {
    /// Atoms on `x − t·y = s`. For finite `t` the rule gives the ordinate
    /// `y_k`; for `t = ∞` the line is `y = −s` and the rule gives `x_k`.
    Line { t: Slope, s: f64, rule: PowerSum },
    /// `z_k = x_k + α` with a real abscissa rule.
    ShiftedReal { alpha: Complex64, abscissa: PowerSum },
    /// `z_k` given by a complex power sum.
    Generic { rule: PowerSum },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomGenerator {
    #[serde(flatten)]
    pub rule: AtomRule,
    /// Declared β with `|z_k| = Θ(k^β)`.
    pub growth_exponent: f64,
    /// Modulus floor.
    pub eps: f64,
}

/// Certified growth data derived from a generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    /// Leading coefficient ℓ and exponent P of the power sum.
    pub leading: Complex64,
    pub exponent: f64,
    /// `|z_k/(ℓ k^P) − 1| ≤ rho · k^(−kappa)` for all `k ≥ 1`.
    pub rho: f64,
    pub kappa: f64,
    /// From this index on `rho · k^(−kappa) ≤ 1/16`.
    pub asymptotic_from: u64,
    /// `c_lower k^P ≤ |z_k| ≤ c_upper k^P` for all `k ≥ 1`.
    pub c_lower: f64,
    pub c_upper: f64,
}

impl Growth {
    /// Limit of the phase `z_k/|z_k|`.
    pub fn omega(&self) -> Complex64 {
        self.leading / self.leading.norm()
    }

    /// Bound on `|z_k|^m / k^(P m)` valid for all `k`.
    pub fn envelope(&self, m: i32) -> f64 {
        if m >= 0 {
            self.c_upper.powi(m)
        } else {
            self.c_lower.powi(m)
        }
    }
}

impl AtomGenerator {
    pub fn line(t: Slope, s: f64, rule: PowerSum, eps: f64) -> Self {
        let beta = rule.terms().first().map_or(1.0, |t| t.1);
        AtomGenerator { rule: AtomRule::Line { t, s, rule }, growth_exponent: beta, eps }
    }

    pub fn shifted_real(alpha: Complex64, abscissa: PowerSum, eps: f64) -> Self {
        let beta = abscissa.terms().first().map_or(1.0, |t| t.1);
        AtomGenerator {
            rule: AtomRule::ShiftedReal { alpha, abscissa },
            growth_exponent: beta,
            eps,
        }
    }

    pub fn generic(rule: PowerSum, eps: f64) -> Self {
        let beta = rule.terms().first().map_or(1.0, |t| t.1);
        AtomGenerator { rule: AtomRule::Generic { rule }, growth_exponent: beta, eps }
    }

    /// The atom `z_k`, `k ≥ 1`.
    #[inline]
    pub fn atom(&self, k: u64) -> Complex64 {
        match &self.rule {
            AtomRule::Line { t: Slope::Finite(t), s, rule } => {
                let y = rule.eval_real(k);
                Complex64::new(t * y + s, y)
            }
            AtomRule::Line { t: Slope::Infinite, s, rule } => Complex64::new(rule.eval_real(k), -s),
            AtomRule::ShiftedReal { alpha, abscissa } => abscissa.eval_real(k) + alpha,
            AtomRule::Generic { rule } => rule.eval(k),
        }
    }

    /// The atom rule as a single complex power sum.
    pub fn power_sum(&self) -> PowerSum {
        let one = Complex64::new(1.0, 0.0);
        match &self.rule {
            AtomRule::Line { t: Slope::Finite(t), s, rule } => rule
                .scale(Complex64::new(*t, 1.0))
                .plus(&PowerSum::new([(one * *s, 0.0)])),
            AtomRule::Line { t: Slope::Infinite, s, rule } => {
                rule.plus(&PowerSum::new([(Complex64::new(0.0, -s), 0.0)]))
            }
            AtomRule::ShiftedReal { alpha, abscissa } => {
                abscissa.plus(&PowerSum::new([(*alpha, 0.0)]))
            }
            AtomRule::Generic { rule } => rule.clone(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidGenerator(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.growth_exponent.is_finite() && self.growth_exponent > 0.0) {
            return Err(Error::InvalidGenerator(format!(
                "growth exponent must be positive, got {}",
                self.growth_exponent
            )));
        }
        let real_rule = |r: &PowerSum, what: &str| {
            if r.is_real() {
                Ok(())
            } else {
                Err(Error::InvalidGenerator(format!("{what} rule must have real coefficients")))
            }
        };
        match &self.rule {
            AtomRule::Line { t, s, rule } => {
                if !s.is_finite() || t.finite().is_some_and(|t| !t.is_finite()) {
                    return Err(Error::InvalidGenerator("line parameters must be finite".into()));
                }
                real_rule(rule, "line")
            }
            AtomRule::ShiftedReal { alpha, abscissa } => {
                if !(alpha.re.is_finite() && alpha.im.is_finite()) {
                    return Err(Error::InvalidGenerator("shift must be finite".into()));
                }
                real_rule(abscissa, "abscissa")
            }
            AtomRule::Generic { .. } => Ok(()),
        }?;
        let ps = self.power_sum();
        if ps
            .terms()
            .iter()
            .any(|(c, e)| !(c.re.is_finite() && c.im.is_finite() && e.is_finite()))
        {
            return Err(Error::InvalidGenerator("non-finite power sum term".into()));
        }
        Ok(())
    }

    /// Certifies the modulus floor, the growth envelope and the ordering of
    /// atoms, and returns the derived growth constants.
    pub fn analyze(&self) -> Result<Growth> {
        self.check_shape()?;
        let ps = self.power_sum();
        let terms = ps.terms();
        let Some(&(leading, p)) = terms.first() else {
            return Err(Error::InvalidGenerator("atom rule is identically zero".into()));
        };
        if p <= 0.0 {
            return Err(Error::InvalidGenerator(format!(
                "atoms must grow: leading exponent {p} is not positive"
            )));
        }
        if (self.growth_exponent - p).abs() > 1e-12 * p.max(1.0) {
            return Err(Error::InvalidGenerator(format!(
                "declared growth exponent {} differs from the rule's leading exponent {p}",
                self.growth_exponent
            )));
        }
        let lead_abs = leading.norm();
        let lower: f64 = terms[1..].iter().map(|(c, _)| c.norm()).sum();
        let rho = lower / lead_abs;
        let kappa = terms.get(1).map_or(1.0, |&(_, e)| p - e);

        let mut k_asym: u64 = 1;
        if rho > 0.0 {
            let need = (16.0 * rho).powf(1.0 / kappa);
            while (k_asym as f64) < need {
                k_asym *= 2;
                if k_asym > ANALYSIS_CAP {
                    return Err(Error::InvalidGenerator(format!(
                        "lower-order terms dominate beyond index {ANALYSIS_CAP}"
                    )));
                }
            }
        }
        // beyond k_asym, |z_k| >= 15/16 |ℓ| k^P; make that clear eps too
        while 15.0 / 16.0 * lead_abs * (k_asym as f64).powf(p) < self.eps {
            k_asym *= 2;
            if k_asym > ANALYSIS_CAP {
                return Err(Error::InvalidGenerator(format!(
                    "eps {} not cleared by the growth envelope before index {ANALYSIS_CAP}",
                    self.eps
                )));
            }
        }

        let mut c_lower = 15.0 / 16.0 * lead_abs;
        let scan = k_asym.max(SORT_PREFIX + 1);
        let mut prev: Option<Complex64> = None;
        for k in 1..scan {
            let z = self.atom(k);
            let r = z.norm();
            if k < k_asym || r < self.eps {
                if !(r >= self.eps) {
                    return Err(Error::EpsGapViolated { index: k, modulus: r, eps: self.eps });
                }
                c_lower = c_lower.min(r / (k as f64).powf(p));
            }
            if k <= SORT_PREFIX {
                if let Some(q) = prev {
                    let rq = q.norm();
                    if r < rq || (r == rq && z.arg() < q.arg()) {
                        return Err(Error::InvalidGenerator(format!(
                            "atoms must be ordered by nondecreasing modulus (index {k})"
                        )));
                    }
                }
                prev = Some(z);
            }
        }
        let c_upper: f64 = terms.iter().map(|(c, _)| c.norm()).sum();
        Ok(Growth {
            leading,
            exponent: p,
            rho,
            kappa,
            asymptotic_from: k_asym,
            c_lower,
            c_upper,
        })
    }
}
