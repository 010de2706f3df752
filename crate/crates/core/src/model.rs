//! Diagonal multiplication models over a discrete measure on ℂ.
//!
//! `R` multiplies by the atom `z_k`; `Z = R⁻¹`, `W = R(R*)⁻¹` and the phase
//! `U` are diagonal symbols. The kernel space is one-dimensional:
//! `N(A*) = ℂξ`, `N(B*) = ℂW*ξ`, with `ξ ∈ ℓ² \ D(R)`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generator::{AtomGenerator, Growth};
use crate::summation::{power_tail_bound, sum_range, zeta_tail, ComplexNeumaier, Enclosure, UNIT_ROUNDOFF};
use crate::symbol::{eval_parts, DiagonalSymbol};
use crate::vector::{ModelVector, TailTerm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub inner_product_tol: f64,
    pub residual_tol: f64,
    pub subspace_tol: f64,
    pub truncation_cap: u64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            inner_product_tol: 1e-12,
            residual_tol: 1e-8,
            subspace_tol: 1e-8,
            truncation_cap: 1 << 24,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !(pos(self.inner_product_tol) && pos(self.residual_tol) && pos(self.subspace_tol)) {
            return Err(Error::InvalidTolerance("tolerances must be positive and finite".into()));
        }
        if self.inner_product_tol > self.residual_tol {
            return Err(Error::InvalidTolerance(format!(
                "inner_product_tol {} exceeds residual_tol {}",
                self.inner_product_tol, self.residual_tol
            )));
        }
        if self.truncation_cap < 1024 {
            return Err(Error::InvalidTolerance("truncation_cap must be at least 1024".into()));
        }
        Ok(())
    }
}

/// Index of `Σ_{k≥start} u_k^phase |z_k|^modulus k^(−p)`, with the target
/// tolerance rounded down to a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MomentKey {
    phase: i32,
    modulus: i32,
    p_bits: u64,
    start: u64,
    tol_exp: i32,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub struct DiscreteModel {
    id: u64,
    generator: AtomGenerator,
    growth: Growth,
    xi: ModelVector,
    tolerance: Tolerance,
    exec: Execution,
    moments: Mutex<HashMap<MomentKey, Enclosure>>,
}

impl std::fmt::Debug for DiscreteModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteModel")
            .field("id", &self.id)
            .field("generator", &self.generator)
            .field("xi", &self.xi)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

impl Clone for DiscreteModel {
    fn clone(&self) -> Self {
        DiscreteModel {
            id: self.id,
            generator: self.generator.clone(),
            growth: self.growth,
            xi: self.xi.clone(),
            tolerance: self.tolerance,
            exec: self.exec,
            moments: Mutex::new(self.moments.lock().unwrap().clone()),
        }
    }
}

/// Validates the generator and ξ and builds the model.
pub fn build_model(generator: AtomGenerator, xi: ModelVector) -> Result<DiscreteModel> {
    DiscreteModel::new(generator, xi, Tolerance::default())
}

impl DiscreteModel {
    pub fn new(generator: AtomGenerator, xi: ModelVector, tolerance: Tolerance) -> Result<Self> {
        tolerance.validate()?;
        let growth = generator.analyze()?;
        let beta = generator.growth_exponent;
        if xi.is_zero() {
            return Err(Error::XiNotL2("xi must be nonzero".into()));
        }
        if let Some(t) = xi.tail().iter().find(|t| !t.square_summable_after(beta, 0)) {
            return Err(Error::XiNotL2(format!(
                "tail term with decay {} and |z|-degree {} is not square summable",
                t.decay, t.modulus
            )));
        }
        if xi.tail().iter().all(|t| t.square_summable_after(beta, 1)) {
            return Err(Error::XiInDomainOfR(
                "every tail term of xi survives multiplication by z".into(),
            ));
        }
        Ok(DiscreteModel {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            generator,
            growth,
            xi,
            tolerance,
            exec: Execution::default(),
            moments: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Result<Self> {
        tolerance.validate()?;
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn generator(&self) -> &AtomGenerator {
        &self.generator
    }

    pub fn growth(&self) -> &Growth {
        &self.growth
    }

    pub fn beta(&self) -> f64 {
        self.generator.growth_exponent
    }

    pub fn eps(&self) -> f64 {
        self.generator.eps
    }

    pub fn xi(&self) -> &ModelVector {
        &self.xi
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tolerance
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    #[inline]
    pub fn atom(&self, k: u64) -> Complex64 {
        self.generator.atom(k)
    }

    /// Bound on `‖Z‖ = sup 1/|z_k|`.
    pub fn regularity_constant(&self) -> f64 {
        1.0 / self.generator.eps
    }

    /// Basis of `N(A*)`: `[ξ]`.
    pub fn kernel_a_star(&self) -> Vec<ModelVector> {
        vec![self.xi.clone()]
    }

    /// Basis of `N(B*)`: `[W*ξ]`.
    pub fn kernel_b_star(&self) -> Vec<ModelVector> {
        vec![self.map(&DiagonalSymbol::w_conj(), &self.xi)]
    }

    pub fn is_square_summable(&self, v: &ModelVector) -> bool {
        v.tail().iter().all(|t| t.square_summable_after(self.beta(), 0))
    }

    /// Whether `v` lies in the maximal domain of multiplication by `symbol`.
    pub fn in_domain(&self, v: &ModelVector, symbol: &DiagonalSymbol) -> bool {
        v.tail().iter().all(|t| t.square_summable_after(self.beta(), symbol.degree()))
    }

    /// Entrywise product `symbol · v`.
    pub fn apply_symbol(&self, symbol: &DiagonalSymbol, v: &ModelVector) -> Result<ModelVector> {
        if symbol.degree() > 0 && !self.in_domain(v, symbol) {
            return Err(Error::DomainViolation {
                degree: symbol.degree(),
                detail: format!("symbol {symbol} applied to a vector outside its domain"),
            });
        }
        Ok(self.map(symbol, v))
    }

    /// Unchecked entrywise product; callers guarantee membership.
    pub(crate) fn map(&self, symbol: &DiagonalSymbol, v: &ModelVector) -> ModelVector {
        v.map_symbol(symbol, |k| self.generator.atom(k))
    }

    /// `⟨v, w⟩`, linear in `v`, with certified error at most `tol`.
    pub fn inner_product(&self, v: &ModelVector, w: &ModelVector, tol: f64) -> Result<Enclosure> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidTolerance(format!("inner product tolerance {tol}")));
        }
        for x in [v, w] {
            if !self.is_square_summable(x) {
                return Err(Error::NotSquareSummable(
                    "inner product of a vector outside l2".into(),
                ));
            }
        }
        let mut acc = ComplexNeumaier::default();
        let mut bound = 0.0;
        // finite part of v against all of w
        for (&k, &a) in v.finite_part() {
            let z = self.atom(k);
            let b = w.entry(k, z);
            acc.add(a * b.conj());
            bound += 8.0 * UNIT_ROUNDOFF * a.norm() * term_scale(w, k, z);
        }
        // tail of v against finite part of w
        for (&k, &b) in w.finite_part() {
            let z = self.atom(k);
            let a = v.tail_entry(k, z);
            acc.add(a * b.conj());
            bound += 8.0 * UNIT_ROUNDOFF * b.norm() * term_scale(v, k, z);
        }
        let pairs: Vec<(&TailTerm, &TailTerm)> = v
            .tail()
            .iter()
            .flat_map(|a| w.tail().iter().map(move |b| (a, b)))
            .collect();
        if !pairs.is_empty() {
            // one moment tolerance for all pairs, weighted so that Σ|c|·tol_m ≤ tol/2
            let weight: f64 = pairs.iter().map(|(a, b)| a.coef.norm() * b.coef.norm()).sum();
            let each = tol / (2.0 * weight);
            for (a, b) in pairs {
                let m = self.moment(
                    a.phase - b.phase,
                    a.modulus + b.modulus,
                    a.decay + b.decay,
                    a.start.max(b.start),
                    each,
                )?;
                let c = a.coef * b.coef.conj();
                acc.add(c * m.value);
                bound += c.norm() * m.bound + 4.0 * UNIT_ROUNDOFF * (c * m.value).norm();
            }
        }
        bound += acc.rounding_bound();
        Ok(Enclosure::new(acc.sum(), bound))
    }

    pub fn inner(&self, v: &ModelVector, w: &ModelVector) -> Result<Enclosure> {
        self.inner_product(v, w, self.tolerance.inner_product_tol)
    }

    /// `‖v‖²` as a real enclosure (imaginary part dropped).
    pub fn norm_sq(&self, v: &ModelVector) -> Result<(f64, f64)> {
        let e = self.inner(v, v)?;
        Ok((e.value.re, e.bound))
    }

    /// Gram matrix `H[l][j] = ⟨e_j, e_l⟩`, so that `⟨Σ a_j e_j, Σ b_l e_l⟩ = b^H H a`.
    pub fn gram(&self, vs: &[ModelVector]) -> Result<Vec<Vec<Enclosure>>> {
        let n = vs.len();
        let mut h = vec![vec![Enclosure::ZERO; n]; n];
        for l in 0..n {
            for j in l..n {
                let e = self.inner(&vs[j], &vs[l])?;
                h[l][j] = e;
                h[j][l] = e.conj();
            }
        }
        Ok(h)
    }

    /// `Σ_{k≥start} u_k^n |z_k|^m k^(−p)` with certified error below `tol`.
    pub fn moment(&self, n: i32, m: i32, p: f64, start: u64, tol: f64) -> Result<Enclosure> {
        let tol_exp = tol.log2().floor() as i32;
        let key = MomentKey { phase: n, modulus: m, p_bits: p.to_bits(), start, tol_exp };
        if let Some(e) = self.moments.lock().unwrap().get(&key) {
            return Ok(*e);
        }
        let e = self.compute_moment(n, m, p, start, 2f64.powi(tol_exp))?;
        self.moments.lock().unwrap().insert(key, e);
        Ok(e)
    }

    fn compute_moment(&self, n: i32, m: i32, p: f64, start: u64, tol: f64) -> Result<Enclosure> {
        let q = p - self.growth.exponent * f64::from(m);
        if !(q > 1.0) {
            return Err(Error::NotSquareSummable(format!(
                "moment with |z|-degree {m} and decay {p} diverges"
            )));
        }
        let per_term = (16 + 4 * (n.abs() + m.abs())) as f64 * UNIT_ROUNDOFF;
        let term = |k: u64| {
            let z = self.generator.atom(k);
            let r = z.norm();
            eval_parts(n, m, z / r, r) * (k as f64).powf(-p)
        };
        let cap = self.tolerance.truncation_cap;
        let mut hi = start.saturating_sub(1).max(1024);
        let mut acc = sum_range(self.exec, start, hi, term);
        loop {
            let tail = self.moment_tail(n, m, q, hi);
            let floor = acc.rounding_bound() + per_term * acc.abs_sum();
            let bound = tail.bound + floor;
            // more terms cannot lower the rounding floor; once the truncation
            // error is below half the target the bound is reported as is
            if bound <= tol || (tail.bound <= tol / 2.0 && floor > tol / 2.0) {
                let sum = acc.sum() + tail.value;
                return Ok(Enclosure::new(sum, bound + 2.0 * UNIT_ROUNDOFF * sum.norm()));
            }
            if hi >= cap {
                return Err(Error::TailBoundFailure { bound, target: tol, cap });
            }
            let next = (hi * 2).min(cap);
            acc.merge(&sum_range(self.exec, hi + 1, next, term));
            hi = next;
        }
    }

    /// Enclosure of `Σ_{k>N} u_k^n |z_k|^m k^(−p)` with `q = p − P m`.
    ///
    /// Writing `z_k = ℓ k^P (1 + r_k)`, the summand is
    /// `ω^n |ℓ|^m k^(−q) (1+r_k)^a (1+r̄_k)^b` with `a = (n+m)/2`,
    /// `b = (m−n)/2`. The first-order expansion in `r_k` sums to Hurwitz
    /// zeta tails; the quadratic remainder is bounded through `|r_k| ≤ ρ k^(−κ)`.
    fn moment_tail(&self, n: i32, m: i32, q: f64, big_n: u64) -> Enclosure {
        let g = &self.growth;
        let envelope = g.envelope(m) * power_tail_bound(q, big_n);
        let plain = Enclosure::new(Complex64::new(0.0, 0.0), envelope);
        if g.rho > 0.0 && g.rho * ((big_n + 1) as f64).powf(-g.kappa) > 1.0 / 16.0 {
            return plain;
        }
        let a = f64::from(n + m) / 2.0;
        let b = f64::from(m - n) / 2.0;
        let lead = g.leading;
        let pre = g.omega().powi(n) * lead.norm().powi(m);
        let (z0, e0) = zeta_tail(q, big_n);
        let mut value = Complex64::new(z0, 0.0);
        let mut err = e0;
        let ps = self.generator.power_sum();
        for &(c, e) in &ps.terms()[1..] {
            let d = c / lead;
            let coef = a * d + b * d.conj();
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (zt, ze) = zeta_tail(q + g.exponent - e, big_n);
            value += coef * zt;
            err += coef.norm() * ze;
        }
        let s = a.abs() + b.abs();
        let c2 = (s * s + s) / 2.0 * (17.0f64 / 15.0).powf(s + 2.0);
        if c2 > 0.0 {
            err += c2 * g.rho * g.rho * power_tail_bound(q + 2.0 * g.kappa, big_n);
        }
        let value = pre * value;
        let err = pre.norm() * err + 8.0 * UNIT_ROUNDOFF * value.norm();
        if err < envelope {
            Enclosure::new(value, err)
        } else {
            plain
        }
    }
}

/// Largest modulus among the contributions to `w_k`, for rounding bounds.
fn term_scale(w: &ModelVector, k: u64, z: Complex64) -> f64 {
    let mut s = w.finite_part().get(&k).map_or(0.0, |c| c.norm());
    for t in w.tail() {
        s += t.eval(k, z).norm() * (1.0 + f64::from(t.phase.abs() + t.modulus.abs()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{PowerSum, Slope};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shifted() -> DiscreteModel {
        let g = AtomGenerator::shifted_real(c(0.0, 1.0), PowerSum::index(), 0.5);
        build_model(g, ModelVector::from_tail(vec![TailTerm::power(1.0)])).unwrap()
    }

    /// Backward brute-force summation with a crude monotone tail.
    fn brute<F: Fn(u64) -> Complex64>(f: F, upto: u64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for k in (1..=upto).rev() {
            s += f(k);
        }
        s
    }

    #[test]
    fn xi_norm_is_basel() {
        let m = shifted();
        let xi = m.xi().clone();
        let e = m.inner(&xi, &xi).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((e.value.re - exact).abs() <= e.bound + 1e-15);
        assert!(e.bound <= 1e-12);
    }

    #[test]
    fn w_xi_against_xi_matches_brute_force() {
        let m = shifted();
        let xi = m.xi().clone();
        let wxi = m.apply_symbol(&DiagonalSymbol::w(), &xi).unwrap();
        let e = m.inner(&wxi, &xi).unwrap();
        let n = 2_000_000u64;
        let f = |k: u64| {
            let z = c(k as f64, 1.0);
            z / z.conj() / (k as f64).powi(2)
        };
        // beyond n the summand is k^-2 up to O(k^-3)
        let s = brute(f, n) + zeta_tail(2.0, n).0;
        assert!((e.value - s).norm() <= 2.0 / (n as f64).powi(2) + 1e-12);
        assert!(e.bound <= 1e-12);
        let conj = m.inner(&xi, &wxi).unwrap();
        assert!((conj.value - e.value.conj()).norm() <= 2e-12);
    }

    #[test]
    fn disjoint_finite_vectors_are_orthogonal() {
        let m = shifted();
        let a = ModelVector::finite_only([(1, c(1.0, 2.0)), (3, c(0.5, 0.0))]);
        let b = ModelVector::finite_only([(2, c(4.0, -1.0))]);
        let e = m.inner(&a, &b).unwrap();
        assert_eq!(e.value, c(0.0, 0.0));
    }

    #[test]
    fn model_examples() {
        assert!(shifted().xi().tail().len() == 1);
        let real = AtomGenerator::generic(PowerSum::index(), 0.5);
        let xi2 = ModelVector::from_tail(vec![TailTerm::power(2.0)]);
        assert!(matches!(build_model(real.clone(), xi2), Err(Error::XiInDomainOfR(_))));
        let xi_half = ModelVector::from_tail(vec![TailTerm::power(0.5)]);
        assert!(matches!(build_model(real, xi_half), Err(Error::XiNotL2(_))));
    }

    #[test]
    fn apply_symbol_examples() {
        let m = shifted();
        let e1 = ModelVector::basis(1);
        let z = m.apply_symbol(&DiagonalSymbol::z_inv(), &e1).unwrap();
        let v = z.finite_part()[&1];
        assert!((v - 1.0 / c(1.0, 1.0)).norm() < 4.0 * f64::EPSILON);
        let err = m.apply_symbol(&DiagonalSymbol::z(), m.xi()).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { degree: 1, .. }));
        assert!(m.in_domain(&e1, &DiagonalSymbol::z()));
        assert!(!m.in_domain(m.xi(), &DiagonalSymbol::z()));
        assert!(m.in_domain(m.xi(), &DiagonalSymbol::z_inv()));
    }

    #[test]
    fn moments_with_phase_on_a_line() {
        let g = AtomGenerator::line(Slope::Finite(2.0), 3.0, PowerSum::index(), 1.0);
        let m = build_model(g, ModelVector::from_tail(vec![TailTerm::power(1.0)])).unwrap();
        for &(n, md, p) in &[(1, -1, 1.0), (2, 0, 2.0), (-3, 1, 3.5), (0, -2, 2.0)] {
            let e = m.moment(n, md, p, 1, 1e-13).unwrap();
            let upto = 3_000_000u64;
            let f = |k: u64| {
                let z = m.atom(k);
                eval_parts(n, md, z / z.norm(), z.norm()) * (k as f64).powf(-p)
            };
            let q = p - f64::from(md);
            let g = m.growth();
            let lead = g.omega().powi(n) * g.leading.norm().powi(md);
            let s = brute(f, upto) + lead * zeta_tail(q, upto).0;
            let tail = 20.0 * (1.0 + g.rho) * f64::from(n.abs() + md.abs() + 1) * g.envelope(md)
                * power_tail_bound(q + g.kappa, upto);
            assert!((e.value - s).norm() <= tail + e.bound + 1e-12, "n={n} m={md} p={p}");
        }
    }

    #[test]
    fn cache_reuses_moments() {
        let m = shifted();
        let a = m.moment(2, 0, 2.0, 1, 1e-12).unwrap();
        let b = m.moment(2, 0, 2.0, 1, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let seq = shifted().with_execution(Execution::Sequential);
        let par = shifted().with_execution(Execution::Parallel);
        let a = seq.moment(2, 0, 2.0, 1, 1e-13).unwrap();
        let b = par.moment(2, 0, 2.0, 1, 1e-13).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }

    #[test]
    fn tolerance_validation() {
        let mut t = Tolerance::default();
        assert!(t.validate().is_ok());
        t.inner_product_tol = 1.0;
        assert!(matches!(t.validate(), Err(Error::InvalidTolerance(_))));
    }
}
