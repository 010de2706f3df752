//! Vishik decomposition of `D(A*)` and `D(B*)`, boundary maps and the
//! Green identity of the boundary triplet.
//!
//! Elements are stored decomposed:
//! `x = x0 + (R*)⁻¹v1 + u1` with `x0 ∈ D(B)`, `v1 ∈ N(B*)`, `u1 ∈ N(A*)`, and
//! `y = y0 + R⁻¹u2 + v2` with `y0 ∈ D(A)`, `u2 ∈ N(A*)`, `v2 ∈ N(B*)`.
//! Kernel components are coefficient vectors in the model's kernel bases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DiscreteModel;
use crate::summation::Enclosure;
use crate::symbol::DiagonalSymbol;
use crate::vector::{ModelVector, TailTerm};

/// A member `x0` of `D(A) = D(B) = Z(I−P)ℋ`.
///
/// `defect` bounds the coefficient of `P(R x0)` in the kernel basis; it is
/// zero for exact presentations and carries the rounding of the projection
/// otherwise.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DomainElement {
    x0: ModelVector,
    defect: f64,
}

impl DomainElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `x0 = Z(I−P)h` for any `h ∈ ℓ²`.
    pub fn from_presentation(model: &DiscreteModel, h: &ModelVector) -> Result<Self> {
        if !model.is_square_summable(h) {
            return Err(Error::InvalidElement("presentation is not square summable".into()));
        }
        let xi = model.xi();
        let nxi = model.inner(xi, xi)?;
        let c = model.inner(h, xi)?.value / nxi.value.re;
        let g = h.sub(&xi.scale(c));
        let x0 = model.map(&DiagonalSymbol::z_inv(), &g);
        let defect = orthogonality_defect(model, &g, nxi)?;
        Ok(DomainElement { x0, defect })
    }

    /// Certifies a raw vector: `x0 ∈ D(R)` and `R x0 ⊥ ξ` within `subspace_tol`.
    pub fn from_vector(model: &DiscreteModel, x0: ModelVector) -> Result<Self> {
        if !model.in_domain(&x0, &DiagonalSymbol::z()) {
            return Err(Error::NotInDomain("x0 is not in the domain of R".into()));
        }
        let g = model.map(&DiagonalSymbol::z(), &x0);
        let xi = model.xi();
        let nxi = model.inner(xi, xi)?;
        let defect = orthogonality_defect(model, &g, nxi)?;
        let (gg, _) = model.norm_sq(&g)?;
        let rel = defect * nxi.value.re.sqrt() / gg.sqrt().max(f64::MIN_POSITIVE);
        if defect > 0.0 && rel > model.tolerance().subspace_tol {
            return Err(Error::NotInDomain(format!(
                "R x0 is not orthogonal to xi (relative defect {rel:e})"
            )));
        }
        Ok(DomainElement { x0, defect })
    }

    pub fn vector(&self) -> &ModelVector {
        &self.x0
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn is_zero(&self) -> bool {
        self.x0.is_zero()
    }
}

/// Upper bound on `|⟨g, ξ⟩| / ‖ξ‖²`.
fn orthogonality_defect(model: &DiscreteModel, g: &ModelVector, nxi: Enclosure) -> Result<f64> {
    if g.is_zero() {
        return Ok(0.0);
    }
    let p = model.inner(g, model.xi())?;
    Ok(p.upper() / (nxi.value.re - nxi.bound))
}

/// A point `(u, v)` of `𝒦 = N(A*) ⊕ N(B*)` in kernel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl BoundaryValue {
    pub fn new(u: Vec<Complex64>, v: Vec<Complex64>) -> Self {
        BoundaryValue { u, v }
    }

    pub fn zero(du: usize, dv: usize) -> Self {
        BoundaryValue { u: vec![Complex64::default(); du], v: vec![Complex64::default(); dv] }
    }

    /// Max-norm distance between coefficient vectors.
    pub fn distance(&self, other: &BoundaryValue) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Member of `D(A*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AStarElement {
    model_id: u64,
    pub x0: DomainElement,
    pub v1: Vec<Complex64>,
    pub u1: Vec<Complex64>,
}

/// Member of `D(B*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BStarElement {
    model_id: u64,
    pub y0: DomainElement,
    pub u2: Vec<Complex64>,
    pub v2: Vec<Complex64>,
}

fn check_dims(model: &DiscreteModel, u: &[Complex64], v: &[Complex64]) -> Result<()> {
    let (du, dv) = (model.kernel_a_star().len(), model.kernel_b_star().len());
    if u.len() != du || v.len() != dv {
        return Err(Error::InvalidElement(format!(
            "kernel coefficients have lengths ({}, {}), expected ({du}, {dv})",
            u.len(),
            v.len()
        )));
    }
    if u.iter().chain(v).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidElement("non-finite kernel coefficient".into()));
    }
    Ok(())
}

fn check_domain(model: &DiscreteModel, d: &DomainElement) -> Result<()> {
    if !model.in_domain(d.vector(), &DiagonalSymbol::z()) {
        return Err(Error::InvalidElement("domain component outside D(R)".into()));
    }
    Ok(())
}

impl AStarElement {
    pub fn new(
        model: &DiscreteModel,
        x0: DomainElement,
        v1: Vec<Complex64>,
        u1: Vec<Complex64>,
    ) -> Result<Self> {
        check_dims(model, &u1, &v1)?;
        check_domain(model, &x0)?;
        Ok(AStarElement { model_id: model.id(), x0, v1, u1 })
    }

    pub fn zero(model: &DiscreteModel) -> Self {
        let bv = BoundaryValue::zero(model.kernel_a_star().len(), model.kernel_b_star().len());
        AStarElement { model_id: model.id(), x0: DomainElement::zero(), v1: bv.v, u1: bv.u }
    }

    pub fn model_id(&self) -> u64 {
        self.model_id
    }

    /// The element as a vector of ℋ.
    pub fn to_vector(&self, model: &DiscreteModel) -> Result<ModelVector> {
        same_model(model, self.model_id)?;
        let zs = DiagonalSymbol::zbar_inv();
        let kb: Vec<ModelVector> =
            model.kernel_b_star().iter().map(|v| model.map(&zs, v)).collect();
        let ka = model.kernel_a_star();
        Ok(self
            .x0
            .vector()
            .add(&combine(&self.v1, &kb))
            .add(&combine(&self.u1, &ka)))
    }
}

impl BStarElement {
    pub fn new(
        model: &DiscreteModel,
        y0: DomainElement,
        u2: Vec<Complex64>,
        v2: Vec<Complex64>,
    ) -> Result<Self> {
        check_dims(model, &u2, &v2)?;
        check_domain(model, &y0)?;
        Ok(BStarElement { model_id: model.id(), y0, u2, v2 })
    }

    pub fn zero(model: &DiscreteModel) -> Self {
        let bv = BoundaryValue::zero(model.kernel_a_star().len(), model.kernel_b_star().len());
        BStarElement { model_id: model.id(), y0: DomainElement::zero(), u2: bv.u, v2: bv.v }
    }

    pub fn model_id(&self) -> u64 {
        self.model_id
    }

    pub fn to_vector(&self, model: &DiscreteModel) -> Result<ModelVector> {
        same_model(model, self.model_id)?;
        let z = DiagonalSymbol::z_inv();
        let ka: Vec<ModelVector> =
            model.kernel_a_star().iter().map(|v| model.map(&z, v)).collect();
        let kb = model.kernel_b_star();
        Ok(self
            .y0
            .vector()
            .add(&combine(&self.u2, &ka))
            .add(&combine(&self.v2, &kb)))
    }
}

pub(crate) fn combine(coefs: &[Complex64], basis: &[ModelVector]) -> ModelVector {
    ModelVector::combination(coefs.iter().copied().zip(basis))
}

fn same_model(model: &DiscreteModel, id: u64) -> Result<()> {
    if model.id() == id {
        Ok(())
    } else {
        Err(Error::ModelMismatch)
    }
}

/// `A*x = Bx0 + v1`, with `B` acting as `z̄` on `D(B)`.
pub fn astar_apply(model: &DiscreteModel, e: &AStarElement) -> Result<ModelVector> {
    same_model(model, e.model_id)?;
    check_dims(model, &e.u1, &e.v1)?;
    let bx0 = model.map(&DiagonalSymbol::zbar(), e.x0.vector());
    Ok(bx0.add(&combine(&e.v1, &model.kernel_b_star())))
}

/// `B*y = Ay0 + u2`, with `A` acting as `z` on `D(A)`.
pub fn bstar_apply(model: &DiscreteModel, e: &BStarElement) -> Result<ModelVector> {
    same_model(model, e.model_id)?;
    check_dims(model, &e.u2, &e.v2)?;
    let ay0 = model.map(&DiagonalSymbol::z(), e.y0.vector());
    Ok(ay0.add(&combine(&e.u2, &model.kernel_a_star())))
}

/// `Γ0(x, y) = (u1, v1)` and `Γ1(x, y) = (u2, −v2)`.
pub fn boundary_maps(ea: &AStarElement, eb: &BStarElement) -> Result<(BoundaryValue, BoundaryValue)> {
    if ea.model_id != eb.model_id {
        return Err(Error::ModelMismatch);
    }
    let g0 = BoundaryValue::new(ea.u1.clone(), ea.v1.clone());
    let g1 = BoundaryValue::new(eb.u2.clone(), eb.v2.iter().map(|v| -v).collect());
    Ok((g0, g1))
}

/// Elements with `x0 = y0 = 0` whose boundary values are `(g0, g1)`.
pub fn boundary_preimage(
    model: &DiscreteModel,
    g0: &BoundaryValue,
    g1: &BoundaryValue,
) -> Result<(AStarElement, BStarElement)> {
    let ea = AStarElement::new(model, DomainElement::zero(), g0.v.clone(), g0.u.clone())?;
    let eb = BStarElement::new(
        model,
        DomainElement::zero(),
        g1.u.clone(),
        g1.v.iter().map(|v| -v).collect(),
    )?;
    Ok((ea, eb))
}

/// Outcome of one Green-identity evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenResidual {
    /// `|LHS − RHS|` as computed.
    pub residual: f64,
    /// Certified bound on the computational error of `LHS − RHS`.
    pub bound: f64,
}

/// `b^H H a` for a Gram matrix `H[l][j] = ⟨e_j, e_l⟩`.
pub(crate) fn form(h: &[Vec<Enclosure>], a: &[Complex64], b: &[Complex64]) -> Enclosure {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for (l, bl) in b.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            terms.push(h[l][j].scale(aj * bl.conj()));
        }
    }
    terms.into_iter().sum()
}

fn coef_norm(c: &[Complex64]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn frobenius_upper(h: &[Vec<Enclosure>]) -> f64 {
    h.iter().flatten().map(|e| e.upper().powi(2)).sum::<f64>().sqrt()
}

/// Residual of the abstract Green identity
/// `⟨B*y,x'⟩ + ⟨A*x,y'⟩ − ⟨x,B*y'⟩ − ⟨y,A*x'⟩ = ⟨u2,u1'⟩ + ⟨v1,v2'⟩ − ⟨u1,u2'⟩ − ⟨v2,v1'⟩`.
pub fn green_residual(
    model: &DiscreteModel,
    pair1: (&AStarElement, &BStarElement),
    pair2: (&AStarElement, &BStarElement),
    tol: f64,
) -> Result<GreenResidual> {
    let (x, y) = pair1;
    let (xp, yp) = pair2;
    for id in [x.model_id, y.model_id, xp.model_id, yp.model_id] {
        same_model(model, id)?;
    }
    let ip = |a: &ModelVector, b: &ModelVector| model.inner_product(a, b, tol);
    let (xv, yv, xpv, ypv) =
        (x.to_vector(model)?, y.to_vector(model)?, xp.to_vector(model)?, yp.to_vector(model)?);
    let lhs = ip(&bstar_apply(model, y)?, &xpv)? + ip(&astar_apply(model, x)?, &ypv)?
        - ip(&xv, &bstar_apply(model, yp)?)?
        - ip(&yv, &astar_apply(model, xp)?)?;

    let ha = model.gram(&model.kernel_a_star())?;
    let hb = model.gram(&model.kernel_b_star())?;
    let rhs = form(&ha, &y.u2, &xp.u1) + form(&hb, &x.v1, &yp.v2)
        - form(&ha, &x.u1, &yp.u2)
        - form(&hb, &y.v2, &xp.v1);

    // a projection defect in x0 (resp. y0) shifts v1 (resp. u2)
    let ga = frobenius_upper(&ha);
    let gb = frobenius_upper(&hb);
    let defect = gb * (x.x0.defect() * coef_norm(&yp.v2) + xp.x0.defect() * coef_norm(&y.v2))
        + ga * (y.y0.defect() * coef_norm(&xp.u1) + yp.y0.defect() * coef_norm(&x.u1));

    let diff = lhs - rhs;
    Ok(GreenResidual { residual: diff.value.norm(), bound: diff.bound + defect })
}

/// Which summand of `D(A*)` a presented vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summand {
    DomainB,
    RstarInvKernelB,
    KernelA,
}

/// Splits an element of `D(A*)` into its tagged summands.
pub fn recompose(model: &DiscreteModel, e: &AStarElement) -> Result<Vec<(Summand, ModelVector)>> {
    same_model(model, e.model_id)?;
    let zs = DiagonalSymbol::zbar_inv();
    let kb: Vec<ModelVector> = model.kernel_b_star().iter().map(|v| model.map(&zs, v)).collect();
    Ok(vec![
        (Summand::DomainB, e.x0.vector().clone()),
        (Summand::RstarInvKernelB, combine(&e.v1, &kb)),
        (Summand::KernelA, combine(&e.u1, &model.kernel_a_star())),
    ])
}

/// Coefficients of `v` in `basis` by a Gram solve, rejecting `v` outside
/// the span (relative residual above `subspace_tol`).
fn span_coefficients(
    model: &DiscreteModel,
    v: &ModelVector,
    basis: &[ModelVector],
) -> Result<Vec<Complex64>> {
    if v.is_zero() {
        return Ok(vec![Complex64::default(); basis.len()]);
    }
    let h = model.gram(basis)?;
    let rhs: Vec<Complex64> =
        basis.iter().map(|b| model.inner(v, b).map(|e| e.value)).collect::<Result<_>>()?;
    let hm = crate::linalg::enclosure_matrix(&h);
    let coefs = crate::linalg::solve(&hm, &rhs)
        .ok_or_else(|| Error::NotInDomain("kernel basis is degenerate".into()))?;
    let resid = v.sub(&combine(&coefs, basis));
    let (r2, rb) = model.norm_sq(&resid)?;
    let (v2, _) = model.norm_sq(v)?;
    let rel = (r2.abs() - rb).max(0.0).sqrt() / v2.sqrt();
    if rel > model.tolerance().subspace_tol {
        return Err(Error::NotInDomain(format!(
            "summand is not in the tagged subspace (relative residual {rel:e})"
        )));
    }
    Ok(coefs)
}

/// Canonical triple of a sum of tagged summands of `D(A*)`.
pub fn redecompose(model: &DiscreteModel, parts: &[(Summand, ModelVector)]) -> Result<AStarElement> {
    let mut x0 = ModelVector::zero();
    let mut mid = ModelVector::zero();
    let mut ker = ModelVector::zero();
    for (tag, v) in parts {
        match tag {
            Summand::DomainB => x0 = x0.add(v),
            Summand::RstarInvKernelB => mid = mid.add(v),
            Summand::KernelA => ker = ker.add(v),
        }
    }
    let zs = DiagonalSymbol::zbar_inv();
    let kb: Vec<ModelVector> = model.kernel_b_star().iter().map(|v| model.map(&zs, v)).collect();
    let v1 = span_coefficients(model, &mid, &kb)?;
    let u1 = span_coefficients(model, &ker, &model.kernel_a_star())?;
    let x0 = if x0.is_zero() { DomainElement::zero() } else { DomainElement::from_vector(model, x0)? };
    AStarElement::new(model, x0, v1, u1)
}

fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Presentation `h`: a few finite entries plus a power-law tail.
fn random_presentation(rng: &mut ChaCha8Rng) -> ModelVector {
    let finite: Vec<(u64, Complex64)> = (1..=6).map(|k| (k, random_c(rng))).collect();
    let decay = if rng.gen_bool(0.5) { 1.0 } else { 1.5 };
    let tail = TailTerm::new(random_c(rng), DiagonalSymbol::identity(), decay, 1);
    ModelVector::new(finite, vec![tail])
}

fn random_coefs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_c(rng)).collect()
}

pub fn random_astar(model: &DiscreteModel, rng: &mut ChaCha8Rng) -> Result<AStarElement> {
    let h = random_presentation(rng);
    let x0 = DomainElement::from_presentation(model, &h)?;
    let v1 = random_coefs(rng, model.kernel_b_star().len());
    let u1 = random_coefs(rng, model.kernel_a_star().len());
    AStarElement::new(model, x0, v1, u1)
}

pub fn random_bstar(model: &DiscreteModel, rng: &mut ChaCha8Rng) -> Result<BStarElement> {
    let h = random_presentation(rng);
    let y0 = DomainElement::from_presentation(model, &h)?;
    let u2 = random_coefs(rng, model.kernel_a_star().len());
    let v2 = random_coefs(rng, model.kernel_b_star().len());
    BStarElement::new(model, y0, u2, v2)
}

pub fn random_pair(model: &DiscreteModel, rng: &mut ChaCha8Rng) -> Result<(AStarElement, BStarElement)> {
    Ok((random_astar(model, rng)?, random_bstar(model, rng)?))
}

/// Summary of a seeded batch of Green-identity checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenBatch {
    pub seed: u64,
    pub trials: usize,
    pub max_residual: f64,
    pub max_bound: f64,
    /// Largest `residual / bound` seen (0 when every bound is 0).
    pub max_ratio: f64,
    pub results: Vec<GreenResidual>,
}

/// Draws `trials` independent couples of random pairs from `seed` and
/// evaluates the Green residual for each. Elements are drawn sequentially;
/// the evaluation runs on the model's execution strategy.
pub fn green_check_batch(model: &DiscreteModel, trials: usize, seed: u64) -> Result<GreenBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut couples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let p1 = random_pair(model, &mut rng)?;
        let p2 = random_pair(model, &mut rng)?;
        couples.push((p1, p2));
    }
    let tol = model.tolerance().inner_product_tol;
    let results: Vec<Result<GreenResidual>> = model.execution().map(&couples, |(p1, p2)| {
        green_residual(model, (&p1.0, &p1.1), (&p2.0, &p2.1), tol)
    });
    let results: Vec<GreenResidual> = results.into_iter().collect::<Result<_>>()?;
    let max_residual = results.iter().map(|r| r.residual).fold(0.0, f64::max);
    let max_bound = results.iter().map(|r| r.bound).fold(0.0, f64::max);
    let max_ratio = results
        .iter()
        .map(|r| if r.bound > 0.0 { r.residual / r.bound } else if r.residual > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(GreenBatch { seed, trials, max_residual, max_bound, max_ratio, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{AtomGenerator, PowerSum};
    use crate::model::build_model;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model() -> DiscreteModel {
        let g = AtomGenerator::shifted_real(c(0.0, 1.0), PowerSum::index(), 0.5);
        build_model(g, ModelVector::from_tail(vec![TailTerm::power(1.0)])).unwrap()
    }

    fn dist(m: &DiscreteModel, a: &ModelVector, b: &ModelVector) -> f64 {
        let d = a.sub(b);
        if d.is_zero() {
            0.0
        } else {
            m.norm_sq(&d).unwrap().0.abs().sqrt()
        }
    }

    #[test]
    fn astar_examples() {
        let m = model();
        let x0 = DomainElement::from_presentation(&m, &ModelVector::basis(1)).unwrap();
        let e = AStarElement::new(&m, x0.clone(), vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        let want = m.apply_symbol(&DiagonalSymbol::zbar(), x0.vector()).unwrap();
        assert!(dist(&m, &astar_apply(&m, &e).unwrap(), &want) < 1e-14);

        let kb = m.kernel_b_star()[0].clone();
        let e = AStarElement::new(&m, DomainElement::zero(), vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(astar_apply(&m, &e).unwrap(), kb);

        let e = AStarElement::new(&m, DomainElement::zero(), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(astar_apply(&m, &e).unwrap().is_zero());
    }

    #[test]
    fn bstar_examples() {
        let m = model();
        let y0 = DomainElement::from_presentation(&m, &ModelVector::basis(2)).unwrap();
        let e = BStarElement::new(&m, y0.clone(), vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        let want = m.apply_symbol(&DiagonalSymbol::z(), y0.vector()).unwrap();
        assert!(dist(&m, &bstar_apply(&m, &e).unwrap(), &want) < 1e-14);

        let e = BStarElement::new(&m, DomainElement::zero(), vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(bstar_apply(&m, &e).unwrap(), m.xi().clone());

        let e = BStarElement::new(&m, DomainElement::zero(), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(bstar_apply(&m, &e).unwrap().is_zero());
    }

    #[test]
    fn boundary_map_examples() {
        let m = model();
        let one = vec![c(1.0, 0.0)];
        let zero = vec![c(0.0, 0.0)];
        let ea = AStarElement::new(&m, DomainElement::zero(), one.clone(), one.clone()).unwrap();
        let (g0, g1) = boundary_maps(&ea, &BStarElement::zero(&m)).unwrap();
        assert_eq!(g0, BoundaryValue::new(one.clone(), one.clone()));
        assert_eq!(g1, BoundaryValue::new(zero.clone(), zero.clone()));

        let eb = BStarElement::new(&m, DomainElement::zero(), one.clone(), one.clone()).unwrap();
        let (g0, g1) = boundary_maps(&AStarElement::zero(&m), &eb).unwrap();
        assert_eq!(g0, BoundaryValue::new(zero.clone(), zero));
        assert_eq!(g1, BoundaryValue::new(one, vec![c(-1.0, 0.0)]));

        let other = model();
        assert_eq!(
            boundary_maps(&AStarElement::zero(&m), &BStarElement::zero(&other)),
            Err(Error::ModelMismatch)
        );
    }

    #[test]
    fn wrong_dimension_is_invalid() {
        let m = model();
        let r = AStarElement::new(&m, DomainElement::zero(), vec![], vec![c(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::InvalidElement(_))));
    }

    #[test]
    fn green_zero_and_core() {
        let m = model();
        let z = (&AStarElement::zero(&m), &BStarElement::zero(&m));
        let r = green_residual(&m, z, z, 1e-12).unwrap();
        assert_eq!(r.residual, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dom = |rng: &mut ChaCha8Rng| DomainElement::from_presentation(&m, &random_presentation(rng)).unwrap();
        let zero = vec![c(0.0, 0.0)];
        let x = AStarElement::new(&m, dom(&mut rng), zero.clone(), zero.clone()).unwrap();
        let y = BStarElement::new(&m, dom(&mut rng), zero.clone(), zero.clone()).unwrap();
        let xp = AStarElement::new(&m, dom(&mut rng), zero.clone(), zero.clone()).unwrap();
        let yp = BStarElement::new(&m, dom(&mut rng), zero.clone(), zero).unwrap();
        let r = green_residual(&m, (&x, &y), (&xp, &yp), 1e-12).unwrap();
        assert!(r.residual <= 2e-12 + r.bound, "{r:?}");
    }

    #[test]
    fn green_batch_is_certified_and_reproducible() {
        let m = model();
        let a = green_check_batch(&m, 12, 42).unwrap();
        assert!(a.max_bound <= 1e-8);
        assert!(a.max_ratio <= 10.0, "{a:?}");
        let b = green_check_batch(&m, 12, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn redecompose_round_trip() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = random_astar(&m, &mut rng).unwrap();
        let parts = recompose(&m, &e).unwrap();
        let back = redecompose(&m, &parts).unwrap();
        assert_eq!(back.x0.vector(), e.x0.vector());
        for (a, b) in back.v1.iter().zip(&e.v1).chain(back.u1.iter().zip(&e.u1)) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn zero_vector_redecomposes_to_zero() {
        let m = model();
        let e = redecompose(&m, &[]).unwrap();
        assert!(e.x0.is_zero());
        assert_eq!(e.v1, vec![c(0.0, 0.0)]);
        assert_eq!(e.u1, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn mistagged_summand_is_rejected() {
        let m = model();
        // ξ tagged as an element of (R*)^{-1} N(B*) = ℂ Zξ
        let r = redecompose(&m, &[(Summand::RstarInvKernelB, m.xi().clone())]);
        assert!(matches!(r, Err(Error::NotInDomain(_))));
        // e_1 is not in D(B): R e_1 is not orthogonal to ξ
        let r = redecompose(&m, &[(Summand::DomainB, ModelVector::basis(1))]);
        assert!(matches!(r, Err(Error::NotInDomain(_))));
    }
}
