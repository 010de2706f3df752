//! One-dimensional extension subspaces `C = ℂ·(ξ, αW*ξ)`: the Möbius maps
//! between `(γ, α)` and the line parameters `(t, s)`, the collinearity
//! classifier, and a brute-force oracle for the normality condition
//! `(α − ᾱγ)Zξ = (γW* − I)ξ`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{AtomGenerator, AtomRule, PowerSum, Slope};
use crate::model::DiscreteModel;
use crate::summation::{power_tail_bound, sum_range, UNIT_ROUNDOFF};

/// Default number of points in the γ-grid of [`oracle_scan`].
pub const DEFAULT_GRID: usize = 10_000;
/// Default number of atoms summed explicitly by the oracle.
pub const DEFAULT_TERMS: u64 = 1 << 16;

/// A point `γ = e^{iθ}` of the unit circle, stored by its angle
/// `θ ∈ (−π, π]` so that `|γ| = 1` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleParam {
    angle: f64,
}

impl CircleParam {
    pub fn from_angle(theta: f64) -> Self {
        let mut a = theta.rem_euclid(2.0 * PI);
        if a > PI {
            a -= 2.0 * PI;
        }
        CircleParam { angle: a }
    }

    /// Accepts `γ` with `||γ| − 1| ≤ 1e−12`.
    pub fn from_complex(gamma: Complex64) -> Result<Self> {
        if !((gamma.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidElement(format!("|γ| = {} is not 1", gamma.norm())));
        }
        Ok(Self::from_angle(gamma.arg()))
    }

    pub fn one() -> Self {
        CircleParam { angle: 0.0 }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    fn half(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle / 2.0)
    }

    /// Shortest angular distance to `other`.
    pub fn distance(&self, other: &CircleParam) -> f64 {
        let d = (self.angle - other.angle).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }
}

/// `t_γ = i(γ+1)/(γ−1)`, with `t_1 = ∞`. Evaluated as `cot(θ/2)`.
pub fn t_from_gamma(gamma: &CircleParam) -> Slope {
    let h = gamma.angle / 2.0;
    if gamma.angle == 0.0 {
        Slope::Infinite
    } else if gamma.angle == PI {
        Slope::Finite(0.0)
    } else {
        Slope::Finite(h.cos() / h.sin())
    }
}

/// The literal complex formula `i(γ+1)(γ−1)⁻¹`; `None` at `γ = 1`.
pub fn t_from_gamma_raw(gamma: Complex64) -> Option<Complex64> {
    let d = gamma - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some(Complex64::new(0.0, 1.0) * (gamma + 1.0) / d)
}

/// `γ = (t+i)/(t−i)`, with `γ = 1` at `t = ∞`.
pub fn gamma_from_t(t: Slope) -> CircleParam {
    match t {
        Slope::Infinite => CircleParam::one(),
        Slope::Finite(t) => CircleParam::from_angle(2.0 * 1.0f64.atan2(t)),
    }
}

/// `s_{γ,α} = (α − ᾱγ)/(γ − 1)`, with `s_{1,α} = Im α`.
/// Evaluated as `Im(α e^{−iθ/2}) / sin(θ/2)`.
pub fn s_from(gamma: &CircleParam, alpha: Complex64) -> Result<f64> {
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaZero);
    }
    if gamma.angle == 0.0 {
        return Ok(alpha.im);
    }
    let h = gamma.half();
    Ok((alpha * h.conj()).im / (gamma.angle / 2.0).sin())
}

/// The literal complex formula `(α − ᾱγ)(γ−1)⁻¹`; `None` at `γ = 1`.
pub fn s_from_raw(gamma: Complex64, alpha: Complex64) -> Option<Complex64> {
    let d = gamma - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some((alpha - alpha.conj() * gamma) / d)
}

/// The member of the α-family of `(t, s)` selected by `parameter`:
/// `α = bt − s + ib` for finite `t` (parameter `b`), `α = a + is` for
/// `t = ∞` (parameter `a`).
pub fn alpha_family(t: Slope, s: f64, parameter: f64) -> Result<Complex64> {
    let alpha = match t {
        Slope::Finite(t) => Complex64::new(parameter * t - s, parameter),
        Slope::Infinite => Complex64::new(parameter, s),
    };
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaZero);
    }
    Ok(alpha)
}

/// Human-readable form of the α-family, e.g. `a - i` or `(2b - 3) + bi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFamily {
    pub t: Slope,
    pub s: f64,
    /// Name of the free real parameter.
    pub parameter: String,
    pub description: String,
}

impl AlphaFamily {
    pub fn new(t: Slope, s: f64) -> Self {
        let (parameter, description) = match t {
            Slope::Infinite => {
                let d = if s == 0.0 {
                    "a".to_string()
                } else {
                    format!("a {} {}i", sign(s), coef(s.abs()))
                };
                ("a", d)
            }
            Slope::Finite(t) => {
                let re = match (t == 0.0, s == 0.0) {
                    (true, true) => "0".to_string(),
                    (true, false) => format!("{}", -s),
                    (false, true) => format!("{}b", coef(t)),
                    (false, false) => format!("({}b {} {})", coef(t), sign(-s), s.abs()),
                };
                ("b", format!("{re} + bi"))
            }
        };
        AlphaFamily { t, s, parameter: parameter.into(), description }
    }

    pub fn member(&self, parameter: f64) -> Result<Complex64> {
        alpha_family(self.t, self.s, parameter)
    }
}

fn sign(x: f64) -> &'static str {
    if x < 0.0 {
        "-"
    } else {
        "+"
    }
}

fn coef(x: f64) -> String {
    if x == 1.0 {
        String::new()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for AlphaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certification {
    /// Decided from the generator or from an explicit witness.
    Exact,
    /// Collinearity checked on the atoms `1..=n` only.
    VerifiedToIndex { n: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    /// All atoms lie on `x − ty = s`; the normal extensions are the
    /// subspaces `ℂ·(ξ, αW*ξ)` with `α` in the family.
    LineFamily {
        t: Slope,
        s: f64,
        gamma: CircleParam,
        family: AlphaFamily,
        certification: Certification,
    },
    /// No line carries the support; `R*` is the only normal extension.
    CanonicalOnly {
        certification: Certification,
        /// Three indices whose atoms are not collinear.
        witness: Option<[u64; 3]>,
    },
}

impl Classification {
    pub fn line(&self) -> Option<(Slope, f64)> {
        match self {
            Classification::LineFamily { t, s, .. } => Some((*t, *s)),
            Classification::CanonicalOnly { .. } => None,
        }
    }

    pub fn certification(&self) -> Certification {
        match self {
            Classification::LineFamily { certification, .. }
            | Classification::CanonicalOnly { certification, .. } => *certification,
        }
    }

    fn line_family(t: Slope, s: f64, certification: Certification) -> Self {
        Classification::LineFamily {
            t,
            s,
            gamma: gamma_from_t(t),
            family: AlphaFamily::new(t, s),
            certification,
        }
    }
}

/// Number of atoms a fitted line is checked against.
fn verify_depth(model: &DiscreteModel) -> u64 {
    model.tolerance().truncation_cap.min(DEFAULT_TERMS)
}

/// Decides whether the atoms in the support of `ξ` are collinear.
pub fn classify(model: &DiscreteModel) -> Result<Classification> {
    match &model.generator().rule {
        AtomRule::Line { t, s, .. } => return Ok(Classification::line_family(*t, *s, Certification::Exact)),
        AtomRule::ShiftedReal { alpha, .. } => {
            return Ok(Classification::line_family(Slope::Infinite, -alpha.im, Certification::Exact))
        }
        AtomRule::Generic { .. } => {}
    }
    let n = verify_depth(model);
    let support: Vec<(u64, Complex64)> = (1..=n)
        .map(|k| (k, model.atom(k)))
        .filter(|&(k, z)| model.xi().entry(k, z) != Complex64::new(0.0, 0.0))
        .collect();
    let (k1, z1) = *support.first().ok_or(Error::AmbiguousSupport)?;
    let &(k2, z2) = support.iter().find(|(_, z)| *z != z1).ok_or(Error::AmbiguousSupport)?;
    let (t, s) = if z1.im == z2.im {
        (Slope::Infinite, -z1.im)
    } else {
        let t = (z2.re - z1.re) / (z2.im - z1.im);
        (Slope::Finite(t), z1.re - t * z1.im)
    };
    let tol = model.tolerance().residual_tol;
    for &(k, z) in &support {
        let d = match t {
            Slope::Infinite => z.im + s,
            Slope::Finite(t) => z.re - t * z.im - s,
        };
        if d.abs() > tol * z.norm().max(1.0) {
            return Ok(Classification::CanonicalOnly {
                certification: Certification::Exact,
                witness: Some([k1, k2, k]),
            });
        }
    }
    Ok(Classification::line_family(t, s, Certification::VerifiedToIndex { n }))
}

/// A residual summed over `1..=terms`: the true value lies in
/// `[value − rounding, value + bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResidual {
    pub value: f64,
    pub bound: f64,
    pub terms: u64,
}

/// `Σ_i A_i k^{e_i}` dominating `|ξ_k|` beyond the finite part.
fn xi_envelope(model: &DiscreteModel) -> Vec<(f64, f64)> {
    let g = model.growth();
    model
        .xi()
        .tail()
        .iter()
        .map(|t| (t.coef.norm() * g.envelope(t.modulus), g.exponent * f64::from(t.modulus) - t.decay))
        .collect()
}

/// `sqrt(Σ_{k>n} (Σ_i A_i k^{e_i})²)` by Minkowski; infinite when some
/// exponent is not square summable.
fn tail_norm(terms: &[(f64, f64)], n: u64) -> f64 {
    terms
        .iter()
        .filter(|(a, _)| *a != 0.0)
        .map(|&(a, e)| if -2.0 * e > 1.0 { a * power_tail_bound(-2.0 * e, n).sqrt() } else { f64::INFINITY })
        .sum()
}

fn product(a: &[(f64, f64)], b: &[(f64, f64)], shift: f64, scale: f64) -> Vec<(f64, f64)> {
    a.iter()
        .flat_map(|&(x, e)| b.iter().map(move |&(y, f)| (x * y * scale, e + f + shift)))
        .collect()
}

fn effective_terms(model: &DiscreteModel, n: u64) -> u64 {
    n.max(model.xi().max_finite_index()).max(1)
}

/// `‖(α − ᾱγ)Zξ − (γW* − I)ξ‖`, summed over the first `n` atoms with a
/// bound on the rest.
pub fn oracle_residual(model: &DiscreteModel, gamma: &CircleParam, alpha: Complex64, n: u64) -> Result<OracleResidual> {
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaZero);
    }
    let n = effective_terms(model, n);
    let g = gamma.gamma();
    let lambda = alpha - alpha.conj() * g;
    let xi = model.xi();
    let acc = sum_range(model.execution(), 1, n, |k| {
        let z = model.atom(k);
        let x = xi.entry(k, z);
        let r = x * (lambda / z - g * z.conj() / z + 1.0);
        let mag = x.norm() * (lambda.norm() / z.norm() + 2.0);
        Complex64::new(r.norm_sqr(), mag * mag)
    });
    let s = acc.sum();
    let value = s.re.max(0.0).sqrt();
    // |B_k| ≤ Σ |λδ_{e,0} + c_j − γ c̄_j| k^{e_j}
    let bracket = PowerSum::new(
        model
            .generator()
            .power_sum()
            .terms()
            .iter()
            .map(|&(c, e)| (c - g * c.conj(), e))
            .chain([(lambda, 0.0)]),
    );
    let b: Vec<(f64, f64)> = bracket.terms().iter().map(|&(c, e)| (c.norm(), e)).collect();
    let growth = model.growth();
    let tail = tail_norm(&product(&b, &xi_envelope(model), -growth.exponent, 1.0 / growth.c_lower), n);
    let rounding = 16.0 * UNIT_ROUNDOFF * s.im.sqrt() + 4.0 * UNIT_ROUNDOFF * value;
    Ok(OracleResidual { value, bound: tail + rounding, terms: n })
}

/// The defect `x_k − t y_k − s` (or `−y_k − s` at `t = ∞`) as a power sum
/// in `k`, built from the generator so that exact lines give exact zeros.
fn line_defect(generator: &AtomGenerator, t: Slope, s: f64) -> PowerSum {
    let one = Complex64::new(1.0, 0.0);
    let konst = |c: f64| PowerSum::new([(one * c, 0.0)]);
    match (&generator.rule, t) {
        (AtomRule::Line { t: Slope::Finite(tg), s: sg, rule }, Slope::Finite(t)) => {
            rule.scale(one * (tg - t)).plus(&konst(sg - s))
        }
        (AtomRule::Line { t: Slope::Finite(_), .. }, Slope::Infinite)
        | (AtomRule::Line { t: Slope::Infinite, .. }, Slope::Infinite)
        | (AtomRule::ShiftedReal { .. }, Slope::Infinite)
        | (AtomRule::Generic { .. }, Slope::Infinite) => {
            let p = generator.power_sum();
            PowerSum::new(p.terms().iter().map(|&(c, e)| (-c.im * one, e))).plus(&konst(-s))
        }
        (AtomRule::Line { t: Slope::Infinite, s: sg, rule }, Slope::Finite(t)) => rule.plus(&konst(t * sg - s)),
        (AtomRule::ShiftedReal { alpha, abscissa }, Slope::Finite(t)) => {
            abscissa.plus(&konst(alpha.re - t * alpha.im - s))
        }
        (AtomRule::Generic { rule }, Slope::Finite(t)) => {
            let w = Complex64::new(1.0, t);
            PowerSum::new(rule.terms().iter().map(|&(c, e)| ((w * c).re * one, e))).plus(&konst(-s))
        }
    }
}

/// `‖(X − tY)ξ − sξ‖` with `X`, `Y` the real and imaginary parts of `R`
/// (`−Yξ − sξ` at `t = ∞`).
pub fn eigen_residual(model: &DiscreteModel, t: Slope, s: f64, n: u64) -> Result<OracleResidual> {
    let n = effective_terms(model, n);
    let q = line_defect(model.generator(), t, s);
    let xi = model.xi();
    let acc = sum_range(model.execution(), 1, n, |k| {
        let z = model.atom(k);
        let r = q.eval_real(k) * xi.entry(k, z);
        Complex64::new(r.norm_sqr(), 0.0)
    });
    let s2 = acc.sum().re;
    let qa: Vec<(f64, f64)> = q.terms().iter().map(|&(c, e)| (c.re.abs(), e)).collect();
    let tail = tail_norm(&product(&qa, &xi_envelope(model), 0.0, 1.0), n);
    let rounding = 16.0 * UNIT_ROUNDOFF * s2.max(0.0).sqrt();
    Ok(OracleResidual { value: s2.max(0.0).sqrt(), bound: tail + rounding, terms: n })
}

/// Truncated Gram data of `a = Zξ`, `w = W*ξ` and `ξ`.
struct OracleGram {
    aa: f64,
    ww: f64,
    xx: f64,
    wx: Complex64,
    wa: Complex64,
    xa: Complex64,
}

impl OracleGram {
    fn new(model: &DiscreteModel, n: u64) -> Self {
        let xi = model.xi();
        let exec = model.execution();
        let parts = |k: u64| {
            let z = model.atom(k);
            let x = xi.entry(k, z);
            (x / z, x * z.conj() / z, x)
        };
        let sum = |f: &(dyn Fn(Complex64, Complex64, Complex64) -> Complex64 + Sync)| {
            sum_range(exec, 1, n, |k| {
                let (a, w, x) = parts(k);
                f(a, w, x)
            })
            .sum()
        };
        OracleGram {
            aa: sum(&|a, _, _| Complex64::new(a.norm_sqr(), 0.0)).re,
            ww: sum(&|_, w, _| Complex64::new(w.norm_sqr(), 0.0)).re,
            xx: sum(&|_, _, x| Complex64::new(x.norm_sqr(), 0.0)).re,
            wx: sum(&|_, w, x| w * x.conj()),
            wa: sum(&|a, w, _| w * a.conj()),
            xa: sum(&|a, _, x| x * a.conj()),
        }
    }

    /// Least-squares `α` at `γ` and a lower bound on the minimized residual.
    fn solve(&self, gamma: &CircleParam) -> (Complex64, f64) {
        let g = gamma.gamma();
        let h = gamma.half();
        let i = Complex64::new(0.0, 1.0);
        // b = γw − ξ, c = i e^{iθ/2} a, λ = μ c/a with real μ
        let bc = (i * h).conj() * (g * self.wa - self.xa);
        let mu = bc.re / self.aa;
        let bb = self.ww + self.xx - 2.0 * (g * self.wx).re;
        let r2 = bb - bc.re * bc.re / self.aa;
        let err = 16.0 * UNIT_ROUNDOFF * (self.ww.sqrt() + self.xx.sqrt()).powi(2);
        let re = if mu == 0.0 { 1.0 } else { 0.0 };
        let alpha = h * Complex64::new(re, mu / 2.0);
        (alpha, (r2 - err).max(0.0).sqrt())
    }
}

/// The best `(γ, α)` found by the scan with its certified residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub gamma: CircleParam,
    pub alpha: Complex64,
    pub residual: OracleResidual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScan {
    pub grid: usize,
    pub terms: u64,
    /// Grid index of the smallest residual (ties go to the smallest angle).
    pub argmin: usize,
    /// Lower bound of the smallest grid residual.
    pub grid_min: f64,
    /// Refined minimizer near the grid argmin.
    pub best: ScanPoint,
    profile: Vec<f64>,
}

impl OracleScan {
    /// `θ_j = 2πj / grid`.
    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.grid as f64
    }

    /// Lower bounds of the minimized residual at each grid angle.
    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    /// Smallest grid residual farther than `radius` from `center`.
    pub fn min_outside(&self, center: &CircleParam, radius: f64) -> f64 {
        self.profile
            .iter()
            .enumerate()
            .filter(|(j, _)| CircleParam::from_angle(self.angle(*j)).distance(center) > radius)
            .map(|(_, r)| *r)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Minimizes the oracle residual over a uniform γ-grid, with the optimal
/// `α` at each γ, then refines around the best grid point.
pub fn oracle_scan(model: &DiscreteModel, grid: usize, terms: u64) -> Result<OracleScan> {
    if grid < 3 {
        return Err(Error::InvalidTolerance(format!("grid must have at least 3 points, got {grid}")));
    }
    let n = effective_terms(model, terms);
    let gram = OracleGram::new(model, n);
    let angle = |j: usize| 2.0 * PI * j as f64 / grid as f64;
    let profile: Vec<f64> = model
        .execution()
        .map_range(grid, |j| gram.solve(&CircleParam::from_angle(angle(j))).1);
    let (argmin, grid_min) = profile
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bj, bv), (j, &v)| if v < bv { (j, v) } else { (bj, bv) });

    let xi = model.xi();
    let direct = |theta: f64| {
        let gamma = CircleParam::from_angle(theta);
        let (alpha, _) = gram.solve(&gamma);
        let g = gamma.gamma();
        let lambda = alpha - alpha.conj() * g;
        sum_range(model.execution(), 1, n, |k| {
            let z = model.atom(k);
            let r = xi.entry(k, z) * (lambda / z - g * z.conj() / z + 1.0);
            Complex64::new(r.norm_sqr(), 0.0)
        })
        .sum()
        .re
    };
    let step = 2.0 * PI / grid as f64;
    let (mut lo, mut hi) = (angle(argmin) - step, angle(argmin) + step);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (direct(x1), direct(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = direct(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = direct(x2);
        }
    }
    let mut theta = (lo + hi) / 2.0;
    if direct(angle(argmin)) <= direct(theta) {
        theta = angle(argmin);
    }
    let gamma = CircleParam::from_angle(theta);
    let (alpha, _) = gram.solve(&gamma);
    let residual = oracle_residual(model, &gamma, alpha, n)?;
    Ok(OracleScan { grid, terms: n, argmin, grid_min, best: ScanPoint { gamma, alpha, residual }, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::AtomGenerator;
    use crate::model::build_model;
    use crate::vector::{ModelVector, TailTerm};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn xi(decay: f64) -> ModelVector {
        ModelVector::from_tail(vec![TailTerm::power(decay)])
    }

    fn shifted() -> DiscreteModel {
        let g = AtomGenerator::shifted_real(c(0.0, 1.0), PowerSum::index(), 0.5);
        build_model(g, xi(1.0)).unwrap()
    }

    fn line23() -> DiscreteModel {
        let g = AtomGenerator::line(Slope::Finite(2.0), 3.0, PowerSum::index(), 0.5);
        build_model(g, xi(1.0)).unwrap()
    }

    fn parabola() -> DiscreteModel {
        let g = AtomGenerator::generic(PowerSum::new([(c(0.0, 1.0), 2.0), (c(1.0, 0.0), 1.0)]), 0.5);
        build_model(g, xi(2.0)).unwrap()
    }

    fn slope(t: Slope) -> f64 {
        t.finite().expect("finite slope")
    }

    #[test]
    fn t_from_gamma_examples() {
        assert_eq!(t_from_gamma(&CircleParam::from_complex(c(-1.0, 0.0)).unwrap()), Slope::Finite(0.0));
        assert!((slope(t_from_gamma(&CircleParam::from_complex(c(0.0, 1.0)).unwrap())) - 1.0).abs() < 1e-15);
        assert_eq!(t_from_gamma(&CircleParam::one()), Slope::Infinite);
    }

    #[test]
    fn gamma_from_t_examples() {
        assert!((gamma_from_t(Slope::Finite(0.0)).gamma() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((gamma_from_t(Slope::Finite(1.0)).gamma() - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(gamma_from_t(Slope::Infinite).gamma(), c(1.0, 0.0));
    }

    #[test]
    fn s_from_examples() {
        assert_eq!(s_from(&CircleParam::one(), c(2.0, 5.0)).unwrap(), 5.0);
        let m1 = CircleParam::from_complex(c(-1.0, 0.0)).unwrap();
        assert!((s_from(&m1, c(1.0, 0.0)).unwrap() + 1.0).abs() < 1e-15);
        let i = CircleParam::from_complex(c(0.0, 1.0)).unwrap();
        assert!((s_from(&i, c(0.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(s_from(&i, c(0.0, 0.0)), Err(Error::AlphaZero)));
    }

    #[test]
    fn alpha_family_examples() {
        assert_eq!(alpha_family(Slope::Infinite, -1.0, 0.5).unwrap(), c(0.5, -1.0));
        assert_eq!(alpha_family(Slope::Finite(2.0), 3.0, 1.0).unwrap(), c(-1.0, 1.0));
        assert_eq!(alpha_family(Slope::Finite(0.0), 0.0, 1.0).unwrap(), c(0.0, 1.0));
        assert!(matches!(alpha_family(Slope::Finite(0.0), 0.0, 0.0), Err(Error::AlphaZero)));
        assert_eq!(AlphaFamily::new(Slope::Infinite, -1.0).description, "a - i");
        assert_eq!(AlphaFamily::new(Slope::Finite(2.0), 3.0).description, "(2b - 3) + bi");
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&shifted()).unwrap().line(), Some((Slope::Infinite, -1.0)));
        let l = classify(&line23()).unwrap();
        assert_eq!(l.line(), Some((Slope::Finite(2.0), 3.0)));
        assert_eq!(l.certification(), Certification::Exact);
        match classify(&parabola()).unwrap() {
            Classification::CanonicalOnly { witness: Some(w), .. } => assert_eq!(w, [1, 2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generic_line_is_verified_to_an_index() {
        // z_k = (2k + 3) + ik written as a generic power sum
        let g = AtomGenerator::generic(PowerSum::new([(c(2.0, 1.0), 1.0), (c(3.0, 0.0), 0.0)]), 0.5);
        let m = build_model(g, xi(1.0)).unwrap();
        let cl = classify(&m).unwrap();
        let (t, s) = cl.line().unwrap();
        assert!((slope(t) - 2.0).abs() < 1e-12 && (s - 3.0).abs() < 1e-12);
        assert!(matches!(cl.certification(), Certification::VerifiedToIndex { .. }));
    }

    #[test]
    fn oracle_examples() {
        let m = shifted();
        let r = oracle_residual(&m, &CircleParam::one(), c(0.0, -1.0), 4096).unwrap();
        assert!(r.value + r.bound < 1e-12, "{r:?}");
        let r = oracle_residual(&m, &CircleParam::one(), c(1.0, 0.0), 4096).unwrap();
        assert!(r.value > 1.0, "{r:?}");

        let m = line23();
        let gamma = gamma_from_t(Slope::Finite(2.0));
        let alpha = alpha_family(Slope::Finite(2.0), 3.0, 1.0).unwrap();
        let r = oracle_residual(&m, &gamma, alpha, 4096).unwrap();
        assert!(r.value + r.bound < 1e-12, "{r:?}");
    }

    #[test]
    fn eigen_residual_vanishes_on_lines_only() {
        let m = line23();
        let r = eigen_residual(&m, Slope::Finite(2.0), 3.0, 1024).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.bound < 1e-12);
        let r = eigen_residual(&m, Slope::Finite(2.0), 3.0 + 1e-6, 1024).unwrap();
        assert!(r.value > 1e-6);
        let r = eigen_residual(&m, Slope::Finite(2.0 + 1e-6), 3.0, 1024).unwrap();
        assert!(r.value > 1e-6);
        let r = eigen_residual(&shifted(), Slope::Infinite, -1.0, 1024).unwrap();
        assert!(r.value + r.bound < 1e-12);
    }

    #[test]
    fn scan_finds_the_line_and_rejects_the_parabola() {
        let m = line23();
        let scan = oracle_scan(&m, 2000, 1 << 12).unwrap();
        let target = gamma_from_t(Slope::Finite(2.0));
        assert!(scan.best.gamma.distance(&target) < 2.0 * PI / 2000.0);
        assert!(scan.best.residual.value < 1e-8, "{:?}", scan.best);

        let scan = oracle_scan(&parabola(), 2000, 1 << 12).unwrap();
        assert!(scan.grid_min > 1e-3, "{}", scan.grid_min);
    }

    #[test]
    fn scan_is_schedule_independent() {
        use crate::exec::Execution;
        let m = line23();
        let a = oracle_scan(&m.clone().with_execution(Execution::Sequential), 500, 1 << 10).unwrap();
        let b = oracle_scan(&m.with_execution(Execution::Parallel), 500, 1 << 10).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn mobius_round_trip(theta in -PI..PI) {
            let g = CircleParam::from_angle(theta);
            let back = gamma_from_t(t_from_gamma(&g));
            prop_assert!((back.gamma() - g.gamma()).norm() <= 1e-14);
        }

        #[test]
        fn family_members_reproduce_s(t in -50.0f64..50.0, s in -50.0f64..50.0, p in 0.1f64..10.0) {
            for t in [Slope::Finite(t), Slope::Infinite] {
                let alpha = alpha_family(t, s, p).unwrap();
                let got = s_from(&gamma_from_t(t), alpha).unwrap();
                prop_assert!((got - s).abs() <= 1e-9 * (1.0 + s.abs() + p * t.finite().unwrap_or(0.0).abs()));
            }
        }
    }
}
