//! Polar decomposition `R = U|R|` of the diagonal model and the unitary
//! `W = R(R*)⁻¹ = U²` with its kernel identities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extensions::span_distance;
use crate::model::DiscreteModel;
use crate::symbol::DiagonalSymbol;
use crate::vector::ModelVector;

/// Symbols of the polar decomposition and the kernel of `T*`, where
/// `T = |R|` restricted to `D(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarData {
    /// `U = z/|z|`.
    pub phase: DiagonalSymbol,
    /// `|R| = |z|`; also the symbol of `T`.
    pub modulus: DiagonalSymbol,
    /// `|R|⁻¹`, bounded by `1/eps`.
    pub modulus_inv: DiagonalSymbol,
    /// `W = z/z̄`.
    pub w: DiagonalSymbol,
    /// Basis of `N(T*) = U*N(A*)`.
    pub kernel_t_star: Vec<ModelVector>,
}

pub fn polar_decompose(model: &DiscreteModel) -> PolarData {
    let phase = DiagonalSymbol::phase_u();
    let kernel_t_star = model
        .kernel_a_star()
        .iter()
        .map(|v| model.map(&phase.adjoint(), v))
        .collect();
    PolarData {
        phase,
        modulus: DiagonalSymbol::abs(),
        modulus_inv: DiagonalSymbol::abs_inv(),
        w: w_operator(model),
        kernel_t_star,
    }
}

/// `W` with `W R* = R`.
pub fn w_operator(_model: &DiscreteModel) -> DiagonalSymbol {
    DiagonalSymbol::w()
}

fn dist(model: &DiscreteModel, a: &ModelVector, b: &ModelVector) -> Result<f64> {
    let (n, bound) = model.norm_sq(&a.sub(b))?;
    Ok((n.max(0.0) + bound).sqrt())
}

/// Largest `‖U|R|v − Rv‖` and `‖|R|Uv − Rv‖` over `samples`, which must lie
/// in `D(R)`.
pub fn polar_residual(model: &DiscreteModel, samples: &[ModelVector]) -> Result<f64> {
    let p = polar_decompose(model);
    let mut worst = 0.0f64;
    for v in samples {
        let rv = model.apply_symbol(&DiagonalSymbol::z(), v)?;
        let a = model.map(&p.phase, &model.apply_symbol(&p.modulus, v)?);
        let b = model.apply_symbol(&p.modulus, &model.map(&p.phase, v))?;
        worst = worst.max(dist(model, &a, &rv)?).max(dist(model, &b, &rv)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WResiduals {
    /// Largest `‖W R* v − R v‖` over the samples.
    pub w_rstar: f64,
    /// Largest `|‖Wv‖² − ‖v‖²|` over the samples.
    pub isometry: f64,
    /// `W = U²` as symbols.
    pub is_phase_squared: bool,
    /// `W` commutes with `Z` and `Z*` as symbols.
    pub commutes: bool,
}

pub fn w_residuals(model: &DiscreteModel, samples: &[ModelVector]) -> Result<WResiduals> {
    let w = w_operator(model);
    let u = DiagonalSymbol::phase_u();
    let z = DiagonalSymbol::z_inv();
    let zs = DiagonalSymbol::zbar_inv();
    let mut out = WResiduals {
        w_rstar: 0.0,
        isometry: 0.0,
        is_phase_squared: w == u * u,
        commutes: w * z == z * w && w * zs == zs * w,
    };
    for v in samples {
        let rv = model.apply_symbol(&DiagonalSymbol::z(), v)?;
        let wr = model.map(&w, &model.apply_symbol(&DiagonalSymbol::zbar(), v)?);
        out.w_rstar = out.w_rstar.max(dist(model, &wr, &rv)?);
        let (a, ba) = model.norm_sq(&model.map(&w, v))?;
        let (b, bb) = model.norm_sq(v)?;
        out.isometry = out.isometry.max((a - b).abs() + ba + bb);
    }
    Ok(out)
}

/// Squared sine between two spans and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpanResidual {
    pub sin2: f64,
    pub bound: f64,
}

impl SpanResidual {
    pub fn holds(&self, tol: f64) -> bool {
        self.sin2 <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRelations {
    /// `N(A*)` against `U N(T*)`.
    pub a_from_t: SpanResidual,
    /// `N(B*)` against `U* N(T*)`.
    pub b_from_t: SpanResidual,
    /// `N(A*)` against `W N(B*)`.
    pub w_maps_b_to_a: SpanResidual,
    /// `(R*)⁻¹N(B*)` against `R⁻¹N(A*)`.
    pub inverse_images: SpanResidual,
}

impl KernelRelations {
    pub fn max_sin2(&self) -> f64 {
        [self.a_from_t, self.b_from_t, self.w_maps_b_to_a, self.inverse_images]
            .iter()
            .map(|r| r.sin2)
            .fold(0.0, f64::max)
    }
}

pub fn kernel_relations(model: &DiscreteModel) -> Result<KernelRelations> {
    let p = polar_decompose(model);
    let ka = model.kernel_a_star();
    let kb = model.kernel_b_star();
    let map = |s: &DiagonalSymbol, vs: &[ModelVector]| -> Vec<ModelVector> {
        vs.iter().map(|v| model.map(s, v)).collect()
    };
    let span = |xs: &[ModelVector], ys: &[ModelVector]| -> Result<SpanResidual> {
        let (sin2, bound) = span_distance(model, xs, ys)?;
        Ok(SpanResidual { sin2, bound })
    };
    Ok(KernelRelations {
        a_from_t: span(&ka, &map(&p.phase, &p.kernel_t_star))?,
        b_from_t: span(&kb, &map(&p.phase.adjoint(), &p.kernel_t_star))?,
        w_maps_b_to_a: span(&ka, &map(&p.w, &kb))?,
        inverse_images: span(
            &map(&DiagonalSymbol::zbar_inv(), &kb),
            &map(&DiagonalSymbol::z_inv(), &ka),
        )?,
    })
}

/// `|U_k − z_k/|z_k||` style spot check: entrywise phase at index `k`.
pub fn phase_at(model: &DiscreteModel, k: u64) -> Complex64 {
    DiagonalSymbol::phase_u().eval(model.atom(k))
}
