//! Extension subspaces `C ⊆ 𝒦`, the dual `C′`, the operators `T_C`,
//! `S_{C′}` and the normality decision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::DiscreteModel;
use crate::symbol::DiagonalSymbol;
use crate::vector::ModelVector;
use crate::vishik::{astar_apply, bstar_apply, combine, AStarElement, BStarElement, BoundaryValue};

/// The boundary space `𝒦 = N(A*) ⊕ N(B*)` described by the Gram matrices of
/// the two kernel bases, `H[l][j] = ⟨e_j, e_l⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpace {
    ha: CMat,
    hb: CMat,
    /// `L^H` for `diag(ha, hb) = L L^H`; maps coordinates to an orthonormal frame.
    whiten: CMat,
}

impl BoundarySpace {
    pub fn new(ha: CMat, hb: CMat) -> Result<Self> {
        if !ha.is_square() || !hb.is_square() {
            return Err(Error::DimensionMismatch("kernel Gram matrices must be square".into()));
        }
        let k = linalg::block_diag(&ha, &hb);
        let l = linalg::cholesky(&k).ok_or(Error::DependentBasis { det: 0.0 })?;
        Ok(BoundarySpace { ha, hb, whiten: l.adjoint() })
    }

    pub fn from_model(model: &DiscreteModel) -> Result<Self> {
        let ha = linalg::enclosure_matrix(&model.gram(&model.kernel_a_star())?);
        let hb = linalg::enclosure_matrix(&model.gram(&model.kernel_b_star())?);
        Self::new(ha, hb)
    }

    pub fn ha(&self) -> &CMat {
        &self.ha
    }

    pub fn hb(&self) -> &CMat {
        &self.hb
    }

    pub fn dim_u(&self) -> usize {
        self.ha.nrows()
    }

    pub fn dim_v(&self) -> usize {
        self.hb.nrows()
    }

    pub fn dim(&self) -> usize {
        self.dim_u() + self.dim_v()
    }

    fn column(&self, b: &BoundaryValue) -> Vec<Complex64> {
        b.u.iter().chain(&b.v).copied().collect()
    }

    fn split(&self, w: &[Complex64]) -> BoundaryValue {
        BoundaryValue::new(w[..self.dim_u()].to_vec(), w[self.dim_u()..].to_vec())
    }

    fn check(&self, b: &BoundaryValue) -> Result<()> {
        if b.u.len() != self.dim_u() || b.v.len() != self.dim_v() {
            return Err(Error::DimensionMismatch(format!(
                "boundary value has shape ({}, {}), space is ({}, {})",
                b.u.len(),
                b.v.len(),
                self.dim_u(),
                self.dim_v()
            )));
        }
        Ok(())
    }

    /// `⟨a, b⟩_𝒦`.
    pub fn inner(&self, a: &BoundaryValue, b: &BoundaryValue) -> Complex64 {
        form(&self.ha, &a.u, &b.u) + form(&self.hb, &a.v, &b.v)
    }
}

fn form(h: &CMat, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut s = Complex64::default();
    for (l, bl) in b.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            s += h[(l, j)] * aj * bl.conj();
        }
    }
    s
}

/// A subspace `C ⊆ 𝒦` given by a linearly independent basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSubspace {
    basis: Vec<BoundaryValue>,
}

impl ExtensionSubspace {
    /// Validates shapes and independence: the normalized Gram determinant
    /// in the `𝒦` metric must exceed `tol`.
    pub fn new(space: &BoundarySpace, basis: Vec<BoundaryValue>, tol: f64) -> Result<Self> {
        for b in &basis {
            space.check(b)?;
        }
        if basis.len() > space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} basis vectors in a space of dimension {}",
                basis.len(),
                space.dim()
            )));
        }
        let n = basis.len();
        let g = CMat::from_fn(n, n, |i, j| space.inner(&basis[j], &basis[i]));
        let d: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
        if d.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::DependentBasis { det: 0.0 });
        }
        let normalized = CMat::from_fn(n, n, |i, j| g[(i, j)] / (d[i] * d[j]).sqrt());
        let det = if n == 0 { 1.0 } else { normalized.determinant().re };
        if !(det > tol) {
            return Err(Error::DependentBasis { det });
        }
        Ok(ExtensionSubspace { basis })
    }

    pub fn zero() -> Self {
        ExtensionSubspace { basis: Vec::new() }
    }

    pub fn full(space: &BoundarySpace) -> Self {
        let n = space.dim();
        let basis = (0..n)
            .map(|i| {
                let mut w = vec![Complex64::default(); n];
                w[i] = Complex64::new(1.0, 0.0);
                space.split(&w)
            })
            .collect();
        ExtensionSubspace { basis }
    }

    pub fn basis(&self) -> &[BoundaryValue] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates as columns `(u; v)`.
    pub fn matrix(&self, space: &BoundarySpace) -> CMat {
        let cols: Vec<Vec<Complex64>> = self.basis.iter().map(|b| space.column(b)).collect();
        CMat::from_fn(space.dim(), cols.len(), |i, j| cols[j][i])
    }

    /// Relative `𝒦`-distance of `w` from `C` (0 for `w = 0`).
    pub fn distance(&self, space: &BoundarySpace, w: &BoundaryValue) -> Result<f64> {
        space.check(w)?;
        let x = &space.whiten * CMat::from_column_slice(space.dim(), 1, &space.column(w));
        let n = x.norm();
        if n == 0.0 {
            return Ok(0.0);
        }
        if self.dim() == 0 {
            return Ok(1.0);
        }
        let p = linalg::projector(&(&space.whiten * self.matrix(space)));
        Ok((&x - &p * &x).norm() / n)
    }

    /// Coefficients of `w` in the basis (least squares in the `𝒦` metric).
    pub fn coefficients(&self, space: &BoundarySpace, w: &BoundaryValue) -> Vec<Complex64> {
        let a = &space.whiten * self.matrix(space);
        let x = &space.whiten * CMat::from_column_slice(space.dim(), 1, &space.column(w));
        let c = linalg::pinv(&a) * x;
        c.column(0).iter().copied().collect()
    }

    /// Projector distance to another subspace in the `𝒦` metric.
    pub fn distance_to(&self, space: &BoundarySpace, other: &ExtensionSubspace) -> f64 {
        let p = linalg::projector(&(&space.whiten * self.matrix(space)));
        let q = linalg::projector(&(&space.whiten * other.matrix(space)));
        linalg::max_abs(&(p - q))
    }
}

/// The map `C: N(B*) → N(A*)` whose graph `{(Cv, v)}` is an extension subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphOperator {
    #[serde(with = "linalg::matrix_serde")]
    matrix: CMat,
}

impl GraphOperator {
    pub fn new(space: &BoundarySpace, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != space.dim_u() || matrix.ncols() != space.dim_v() {
            return Err(Error::DimensionMismatch(format!(
                "graph operator is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim_u(),
                space.dim_v()
            )));
        }
        Ok(GraphOperator { matrix })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn graph(&self, space: &BoundarySpace) -> ExtensionSubspace {
        let basis = (0..space.dim_v())
            .map(|l| {
                let u = self.matrix.column(l).iter().copied().collect();
                let mut v = vec![Complex64::default(); space.dim_v()];
                v[l] = Complex64::new(1.0, 0.0);
                BoundaryValue::new(u, v)
            })
            .collect();
        ExtensionSubspace { basis }
    }

    /// The Hilbert-space adjoint `C* = H_B⁻¹ C^H H_A`.
    pub fn adjoint(&self, space: &BoundarySpace) -> CMat {
        let rhs = self.matrix.adjoint() * &space.ha;
        linalg::solve_mat(&space.hb, &rhs).expect("kernel Gram matrix is positive definite")
    }
}

/// `C′ = {(u2, v2): ⟨v1, v2⟩ = ⟨u1, u2⟩ for all (u1, v1) ∈ C}`.
pub fn cprime(space: &BoundarySpace, c: &ExtensionSubspace) -> ExtensionSubspace {
    let n = space.dim();
    let rows: Vec<Vec<Complex64>> = c
        .basis
        .iter()
        .map(|b| {
            let hu = &space.ha * CMat::from_column_slice(b.u.len(), 1, &b.u);
            let hv = &space.hb * CMat::from_column_slice(b.v.len(), 1, &b.v);
            hu.iter().map(|x| -x.conj()).chain(hv.iter().map(|x| x.conj())).collect()
        })
        .collect();
    let m = CMat::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let basis = linalg::nullspace(&m).iter().map(|w| space.split(w)).collect();
    ExtensionSubspace { basis }
}

fn check_membership(space: &BoundarySpace, c: &ExtensionSubspace, w: &BoundaryValue, tol: f64) -> Result<()> {
    let residual = c.distance(space, w)?;
    if residual > tol {
        return Err(Error::NotInExtensionDomain { residual });
    }
    Ok(())
}

/// `T_C = A*` restricted to `{x: Γ0 x ∈ C}`.
pub fn t_c_apply(model: &DiscreteModel, c: &ExtensionSubspace, e: &AStarElement) -> Result<ModelVector> {
    let space = BoundarySpace::from_model(model)?;
    let w = BoundaryValue::new(e.u1.clone(), e.v1.clone());
    check_membership(&space, c, &w, model.tolerance().subspace_tol)?;
    astar_apply(model, e)
}

/// `S_{C′} = B*` restricted to `{y: (u2, v2) ∈ C′}`; this is `(T_C)*`.
pub fn s_cprime_apply(model: &DiscreteModel, c: &ExtensionSubspace, e: &BStarElement) -> Result<ModelVector> {
    let space = BoundarySpace::from_model(model)?;
    let dual = cprime(&space, c);
    let w = BoundaryValue::new(e.u2.clone(), e.v2.clone());
    check_membership(&space, &dual, &w, model.tolerance().subspace_tol)?;
    bstar_apply(model, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotNormalReason {
    /// The two boundary subspaces of ℋ differ.
    DomainMismatch,
    /// Matched pairs violate `‖v1‖ = ‖u2‖`.
    NormMismatch,
    /// `dim C ≠ dim C′`.
    DegenerateDim,
}

/// Residual magnitudes behind a verdict, each with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormalityResiduals {
    /// Largest squared sine of the angle between a basis vector of one
    /// boundary subspace and the other subspace.
    pub subspace: f64,
    pub subspace_bound: f64,
    /// Relative mismatch of the matched norm forms.
    pub norm: f64,
    pub norm_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NormalityVerdict {
    Normal {
        /// Isometry `u2 ↦ v1` between matched kernel components.
        #[serde(with = "linalg::matrix_serde")]
        witness: CMat,
        /// `Y_j = Σ_i T[i][j] X_i` between the basis images of `C′` and `C`.
        #[serde(with = "linalg::matrix_serde")]
        matching: CMat,
        residuals: NormalityResiduals,
    },
    NotNormal {
        reason: NotNormalReason,
        residuals: NormalityResiduals,
    },
}

impl NormalityVerdict {
    pub fn is_normal(&self) -> bool {
        matches!(self, NormalityVerdict::Normal { .. })
    }

    pub fn residuals(&self) -> &NormalityResiduals {
        match self {
            NormalityVerdict::Normal { residuals, .. } | NormalityVerdict::NotNormal { residuals, .. } => residuals,
        }
    }
}

/// `{(R*)⁻¹v + u}` for each basis vector `(u, v)`.
fn images_a(model: &DiscreteModel, c: &ExtensionSubspace) -> Vec<ModelVector> {
    let zs = DiagonalSymbol::zbar_inv();
    let kb: Vec<ModelVector> = model.kernel_b_star().iter().map(|v| model.map(&zs, v)).collect();
    let ka = model.kernel_a_star();
    c.basis.iter().map(|b| combine(&b.v, &kb).add(&combine(&b.u, &ka))).collect()
}

/// `{R⁻¹u + v}` for each basis vector `(u, v)`.
fn images_b(model: &DiscreteModel, c: &ExtensionSubspace) -> Vec<ModelVector> {
    let z = DiagonalSymbol::z_inv();
    let ka: Vec<ModelVector> = model.kernel_a_star().iter().map(|v| model.map(&z, v)).collect();
    let kb = model.kernel_b_star();
    c.basis.iter().map(|b| combine(&b.u, &ka).add(&combine(&b.v, &kb))).collect()
}

/// Squared sines of `ys` against `span(xs)` and the least-squares matching.
struct Projection {
    matching: CMat,
    sin2: f64,
    bound: f64,
}

fn project(model: &DiscreteModel, xs: &[ModelVector], ys: &[ModelVector]) -> Result<Projection> {
    let gx = model.gram(xs)?;
    let gy = model.gram(ys)?;
    let cross: Vec<Vec<_>> = (0..xs.len())
        .map(|l| ys.iter().map(|y| model.inner(y, &xs[l])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let a = linalg::enclosure_matrix(&gx);
    let b = linalg::enclosure_matrix(&cross);
    let t = linalg::solve_mat(&a, &b)
        .ok_or_else(|| Error::DependentBasis { det: 0.0 })?;
    let (da, db) = (linalg::bound_norm(&gx), linalg::bound_norm(&cross));
    let mut sin2 = 0.0f64;
    let mut bound = 0.0f64;
    for j in 0..ys.len() {
        let tj = t.column(j);
        let yy = gy[j][j].value.re;
        let proj = (tj.adjoint() * &a * tj)[(0, 0)].re;
        let tn = tj.norm();
        sin2 = sin2.max((yy - proj) / yy);
        bound = bound.max((da * tn * tn + 2.0 * db * tn + gy[j][j].bound) / yy);
    }
    Ok(Projection { matching: t, sin2, bound })
}

/// Largest squared sine between the spans of `xs` and `ys`, both ways.
pub(crate) fn span_distance(model: &DiscreteModel, xs: &[ModelVector], ys: &[ModelVector]) -> Result<(f64, f64)> {
    let a = project(model, xs, ys)?;
    let b = project(model, ys, xs)?;
    Ok((a.sin2.max(b.sin2), a.bound.max(b.bound)))
}

/// Decides whether `T_C` is normal: the boundary subspaces of `C` and `C′`
/// must coincide and matched pairs must satisfy `‖v1‖ = ‖u2‖`.
pub fn check_normal(model: &DiscreteModel, c: &ExtensionSubspace) -> Result<NormalityVerdict> {
    let space = BoundarySpace::from_model(model)?;
    let dual = cprime(&space, c);
    let tol = model.tolerance();
    if c.dim() != dual.dim() {
        return Ok(NormalityVerdict::NotNormal {
            reason: NotNormalReason::DegenerateDim,
            residuals: NormalityResiduals::default(),
        });
    }
    let xs = images_a(model, c);
    let ys = images_b(model, &dual);
    let fwd = project(model, &xs, &ys)?;
    let back = project(model, &ys, &xs)?;
    let mut res = NormalityResiduals {
        subspace: fwd.sin2.max(back.sin2),
        subspace_bound: fwd.bound.max(back.bound),
        ..Default::default()
    };
    if res.subspace > tol.subspace_tol {
        return Ok(NormalityVerdict::NotNormal { reason: NotNormalReason::DomainMismatch, residuals: res });
    }

    let t = fwd.matching;
    let v1 = column_block(c, |b| &b.v, space.dim_v());
    let u2 = column_block(&dual, |b| &b.u, space.dim_u());
    let m1 = t.adjoint() * (v1.adjoint() * space.hb() * &v1) * &t;
    let m2 = u2.adjoint() * space.ha() * &u2;
    let scale = linalg::max_abs(&m1).max(linalg::max_abs(&m2)).max(f64::MIN_POSITIVE);
    res.norm = linalg::max_abs(&(&m1 - &m2)) / scale;
    res.norm_bound = 4.0 * res.subspace_bound + 16.0 * f64::EPSILON;
    if res.norm > tol.residual_tol {
        return Ok(NormalityVerdict::NotNormal { reason: NotNormalReason::NormMismatch, residuals: res });
    }
    let witness = &v1 * &t * linalg::pinv(&u2);
    Ok(NormalityVerdict::Normal { witness, matching: t, residuals: res })
}

fn column_block<'a>(c: &'a ExtensionSubspace, f: impl Fn(&'a BoundaryValue) -> &'a Vec<Complex64>, rows: usize) -> CMat {
    CMat::from_fn(rows, c.dim(), |i, j| f(&c.basis[j])[i])
}

/// For a normal `T_C`, rewrites `z ∈ D(T_C)` as an element of `D(S_{C′})`
/// with the same domain component, using the matching of the verdict.
pub fn normal_partner(
    model: &DiscreteModel,
    c: &ExtensionSubspace,
    verdict: &NormalityVerdict,
    e: &AStarElement,
) -> Result<BStarElement> {
    let NormalityVerdict::Normal { matching, .. } = verdict else {
        return Err(Error::DimensionMismatch("no matching for a non-normal extension".into()));
    };
    let space = BoundarySpace::from_model(model)?;
    let dual = cprime(&space, c);
    let w = BoundaryValue::new(e.u1.clone(), e.v1.clone());
    check_membership(&space, c, &w, model.tolerance().subspace_tol)?;
    let coefs = c.coefficients(&space, &w);
    let d = linalg::solve(matching, &coefs)
        .ok_or_else(|| Error::DependentBasis { det: 0.0 })?;
    let mut u2 = vec![Complex64::default(); space.dim_u()];
    let mut v2 = vec![Complex64::default(); space.dim_v()];
    for (dj, b) in d.iter().zip(dual.basis()) {
        for (x, y) in u2.iter_mut().zip(&b.u) {
            *x += dj * y;
        }
        for (x, y) in v2.iter_mut().zip(&b.v) {
            *x += dj * y;
        }
    }
    BStarElement::new(model, e.x0.clone(), u2, v2)
}

/// Solves `R⁻¹u2 + C*u2 = (R*)⁻¹Uu2 + CUu2` column by column. Returns `U`
/// when the system is consistent, `U` is isometric from `N(A*)` onto
/// `N(B*)`, and the kernels have equal dimension.
pub fn boundary_isometry(model: &DiscreteModel, g: &GraphOperator) -> Result<Option<CMat>> {
    let space = BoundarySpace::from_model(model)?;
    if space.dim_u() != space.dim_v() {
        return Ok(None);
    }
    let tol = model.tolerance();
    let cstar = g.adjoint(&space);
    let zs = DiagonalSymbol::zbar_inv();
    let z = DiagonalSymbol::z_inv();
    let ka = model.kernel_a_star();
    let kb = model.kernel_b_star();
    let zkb: Vec<ModelVector> = kb.iter().map(|v| model.map(&zs, v)).collect();
    let zka: Vec<ModelVector> = ka.iter().map(|v| model.map(&z, v)).collect();
    // X_l = (R*)⁻¹ e_l + C e_l, Y_j = R⁻¹ e_j + C* e_j
    let xs: Vec<ModelVector> = (0..space.dim_v())
        .map(|l| {
            let col: Vec<Complex64> = g.matrix().column(l).iter().copied().collect();
            zkb[l].add(&combine(&col, &ka))
        })
        .collect();
    let ys: Vec<ModelVector> = (0..space.dim_u())
        .map(|j| {
            let col: Vec<Complex64> = cstar.column(j).iter().copied().collect();
            zka[j].add(&combine(&col, &kb))
        })
        .collect();
    let p = project(model, &xs, &ys)?;
    if p.sin2 > tol.subspace_tol {
        return Ok(None);
    }
    let u = p.matching;
    let iso = u.adjoint() * space.hb() * &u;
    let scale = linalg::max_abs(space.ha()).max(f64::MIN_POSITIVE);
    if linalg::max_abs(&(iso - space.ha())) / scale > tol.residual_tol {
        return Ok(None);
    }
    Ok(Some(u))
}
