//! Diagonal symbols: functions of the atom `z` acting entrywise.
//!
//! Every generator of the symbol monoid (`z`, `z̄`, their inverses, `|z|`,
//! `|z|⁻¹`, `z/|z|`, `z̄/|z|`) has the form `(z/|z|)^n · |z|^m`, so each
//! symbol is stored canonically as `scale · u^n · |z|^m` with `u = z/|z|`.
//! Products, inverses and adjoints are then exact integer arithmetic.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSymbol {
    pub scale: Complex64,
    /// Exponent of the phase `u = z/|z|`.
    pub phase: i32,
    /// Exponent of `|z|`; this is the growth degree.
    pub modulus: i32,
}

impl DiagonalSymbol {
    pub const fn new(scale: Complex64, phase: i32, modulus: i32) -> Self {
        DiagonalSymbol { scale, phase, modulus }
    }

    const fn unit(phase: i32, modulus: i32) -> Self {
        Self::new(Complex64::new(1.0, 0.0), phase, modulus)
    }

    pub const fn identity() -> Self {
        Self::unit(0, 0)
    }

    pub const fn scalar(c: Complex64) -> Self {
        Self::new(c, 0, 0)
    }

    /// `z`, the symbol of R.
    pub const fn z() -> Self {
        Self::unit(1, 1)
    }

    /// `z̄`, the symbol of R*.
    pub const fn zbar() -> Self {
        Self::unit(-1, 1)
    }

    /// `z⁻¹`, the symbol of Z = R⁻¹.
    pub const fn z_inv() -> Self {
        Self::unit(-1, -1)
    }

    /// `z̄⁻¹`, the symbol of Z*.
    pub const fn zbar_inv() -> Self {
        Self::unit(1, -1)
    }

    /// `|z|`.
    pub const fn abs() -> Self {
        Self::unit(0, 1)
    }

    pub const fn abs_inv() -> Self {
        Self::unit(0, -1)
    }

    /// `z/|z|`, the phase U.
    pub const fn phase_u() -> Self {
        Self::unit(1, 0)
    }

    /// `z̄/|z|`, the phase U*.
    pub const fn phase_u_conj() -> Self {
        Self::unit(-1, 0)
    }

    /// `z/z̄`, the unitary W.
    pub const fn w() -> Self {
        Self::unit(2, 0)
    }

    /// `z̄/z`, W*.
    pub const fn w_conj() -> Self {
        Self::unit(-2, 0)
    }

    /// `z^a · z̄^b · |z|^c`.
    pub fn from_exponents(a: i32, b: i32, c: i32) -> Self {
        Self::unit(a - b, a + b + c)
    }

    /// Parses the names used in model files.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "identity" | "1" => Self::identity(),
            "z" => Self::z(),
            "zbar" => Self::zbar(),
            "z_inv" => Self::z_inv(),
            "zbar_inv" => Self::zbar_inv(),
            "abs" => Self::abs(),
            "abs_inv" => Self::abs_inv(),
            "u" => Self::phase_u(),
            "u_conj" => Self::phase_u_conj(),
            "w" => Self::w(),
            "w_conj" => Self::w_conj(),
            _ => return None,
        })
    }

    /// Net `|z|`-homogeneity.
    pub fn degree(&self) -> i32 {
        self.modulus
    }

    pub fn is_unimodular(&self) -> bool {
        self.modulus == 0 && (self.scale.norm() - 1.0).abs() <= 4.0 * f64::EPSILON
    }

    /// Symbol of the adjoint operator (entrywise complex conjugate).
    pub fn adjoint(&self) -> Self {
        Self::new(self.scale.conj(), -self.phase, self.modulus)
    }

    /// Symbol of the inverse operator; `None` for a zero scale.
    pub fn inverse(&self) -> Option<Self> {
        if self.scale == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(Self::new(self.scale.inv(), -self.phase, -self.modulus))
    }

    pub fn powi(&self, k: i32) -> Self {
        Self::new(self.scale.powi(k), self.phase * k, self.modulus * k)
    }

    /// Same symbol with unit scale.
    pub fn unscaled(&self) -> Self {
        Self::unit(self.phase, self.modulus)
    }

    /// Evaluates at an atom `z ≠ 0`.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        eval_parts(self.phase, self.modulus, z / r, r) * self.scale
    }

    /// Exact symbol-level equality (scales compared within `tol`).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.phase == other.phase
            && self.modulus == other.modulus
            && (self.scale - other.scale).norm() <= tol
    }
}

/// `u^n · r^m` with the phase computed by repeated multiplication.
#[inline]
pub(crate) fn eval_parts(n: i32, m: i32, u: Complex64, r: f64) -> Complex64 {
    let ph = match n {
        0 => Complex64::new(1.0, 0.0),
        1 => u,
        -1 => u.conj(),
        _ if n > 0 => u.powi(n),
        _ => u.conj().powi(-n),
    };
    let md = match m {
        0 => 1.0,
        1 => r,
        -1 => 1.0 / r,
        _ => r.powi(m),
    };
    ph * md
}

impl Mul for DiagonalSymbol {
    type Output = DiagonalSymbol;
    fn mul(self, rhs: DiagonalSymbol) -> DiagonalSymbol {
        DiagonalSymbol::new(
            self.scale * rhs.scale,
            self.phase + rhs.phase,
            self.modulus + rhs.modulus,
        )
    }
}

impl Default for DiagonalSymbol {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Display for DiagonalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.scale != Complex64::new(1.0, 0.0) {
            parts.push(format!("({})", self.scale));
        }
        match self.phase {
            0 => {}
            1 => parts.push("u".into()),
            n => parts.push(format!("u^{n}")),
        }
        match self.modulus {
            0 => {}
            1 => parts.push("|z|".into()),
            m => parts.push(format!("|z|^{m}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn named_symbols_evaluate_to_their_formulas() {
        let z = c(3.0, -4.0);
        let cases = [
            (DiagonalSymbol::z(), z),
            (DiagonalSymbol::zbar(), z.conj()),
            (DiagonalSymbol::z_inv(), 1.0 / z),
            (DiagonalSymbol::zbar_inv(), 1.0 / z.conj()),
            (DiagonalSymbol::abs(), c(5.0, 0.0)),
            (DiagonalSymbol::phase_u(), z / 5.0),
            (DiagonalSymbol::w(), z / z.conj()),
            (DiagonalSymbol::w_conj(), z.conj() / z),
        ];
        for (s, want) in cases {
            let got = s.eval(z);
            assert_relative_eq!(got.re, want.re, epsilon = 1e-15);
            assert_relative_eq!(got.im, want.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn w_is_u_squared_and_commutes_with_z() {
        let u = DiagonalSymbol::phase_u();
        assert_eq!(u * u, DiagonalSymbol::w());
        let z = DiagonalSymbol::z_inv();
        assert_eq!(z * DiagonalSymbol::w(), DiagonalSymbol::w() * z);
        // Z* W* = Z
        assert_eq!(DiagonalSymbol::zbar_inv() * DiagonalSymbol::w_conj(), z);
    }

    #[test]
    fn from_exponents_matches_named() {
        assert_eq!(DiagonalSymbol::from_exponents(1, 0, 0), DiagonalSymbol::z());
        assert_eq!(DiagonalSymbol::from_exponents(0, 1, 0), DiagonalSymbol::zbar());
        assert_eq!(DiagonalSymbol::from_exponents(1, -1, 0), DiagonalSymbol::w());
        assert_eq!(DiagonalSymbol::from_exponents(1, 0, -1), DiagonalSymbol::phase_u());
        assert_eq!(DiagonalSymbol::from_exponents(-1, 0, 0), DiagonalSymbol::z_inv());
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(DiagonalSymbol::identity().to_string(), "1");
        assert_eq!(DiagonalSymbol::z().to_string(), "u·|z|");
        assert_eq!(DiagonalSymbol::w_conj().to_string(), "u^-2");
    }

    fn arb_symbol() -> impl Strategy<Value = DiagonalSymbol> {
        (-3i32..=3, -3i32..=3, 0.1f64..3.0, -3.0f64..3.0)
            .prop_map(|(n, m, r, th)| DiagonalSymbol::new(Complex64::from_polar(r, th), n, m))
    }

    proptest! {
        #[test]
        fn composition_adds_degrees(a in arb_symbol(), b in arb_symbol()) {
            prop_assert_eq!((a * b).degree(), a.degree() + b.degree());
        }

        #[test]
        fn composition_is_pointwise_product(
            a in arb_symbol(), b in arb_symbol(),
            r in 0.5f64..4.0, th in -3.1f64..3.1,
        ) {
            let z = Complex64::from_polar(r, th);
            let lhs = (a * b).eval(z);
            let rhs = a.eval(z) * b.eval(z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn adjoint_is_conjugate(a in arb_symbol(), r in 0.5f64..4.0, th in -3.1f64..3.1) {
            let z = Complex64::from_polar(r, th);
            let d = a.adjoint().eval(z) - a.eval(z).conj();
            prop_assert!(d.norm() <= 1e-12 * (1.0 + a.eval(z).norm()));
        }

        #[test]
        fn unimodular_symbols_have_unit_modulus(n in -6i32..=6, r in 0.5f64..50.0, th in -3.1f64..3.1) {
            let s = DiagonalSymbol::phase_u().powi(n);
            prop_assert!(s.is_unimodular());
            let v = s.eval(Complex64::from_polar(r, th));
            prop_assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }
}
