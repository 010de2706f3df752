//! Compensated summation, enclosures and power-series tails.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;

/// Unit roundoff for f64.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Terms per independently summed block. Fixed so that block boundaries do
/// not depend on the execution strategy.
pub const CHUNK: u64 = 1 << 16;

/// A complex value together with a rigorous bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub value: Complex64,
    pub bound: f64,
}

impl Enclosure {
    pub const ZERO: Enclosure = Enclosure {
        value: Complex64::new(0.0, 0.0),
        bound: 0.0,
    };

    pub fn new(value: Complex64, bound: f64) -> Self {
        Enclosure { value, bound }
    }

    pub fn exact(value: Complex64) -> Self {
        Enclosure { value, bound: 0.0 }
    }

    pub fn conj(self) -> Self {
        Enclosure::new(self.value.conj(), self.bound)
    }

    pub fn scale(self, c: Complex64) -> Self {
        let v = self.value * c;
        Enclosure::new(v, self.bound * c.norm() + 2.0 * UNIT_ROUNDOFF * v.norm())
    }

    /// Largest modulus compatible with the enclosure.
    pub fn upper(self) -> f64 {
        self.value.norm() + self.bound
    }

    /// Whether zero lies inside the enclosure.
    pub fn contains_zero(self) -> bool {
        self.value.norm() <= self.bound
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        let v = self.value + rhs.value;
        Enclosure::new(v, self.bound + rhs.bound + UNIT_ROUNDOFF * v.norm())
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: Enclosure) -> Enclosure {
        self + (-rhs)
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure::new(-self.value, self.bound)
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        let v = self.value * rhs.value;
        let b = self.value.norm() * rhs.bound
            + rhs.value.norm() * self.bound
            + self.bound * rhs.bound
            + 2.0 * UNIT_ROUNDOFF * v.norm();
        Enclosure::new(v, b)
    }
}

impl std::iter::Sum for Enclosure {
    fn sum<I: Iterator<Item = Enclosure>>(iter: I) -> Enclosure {
        let mut acc = ComplexNeumaier::default();
        let mut bound = 0.0;
        for e in iter {
            acc.add(e.value);
            bound += e.bound;
        }
        Enclosure::new(acc.sum(), bound + acc.rounding_bound())
    }
}

/// Neumaier (improved Kahan) summation on real and imaginary parts, also
/// tracking the sum of moduli for the rounding bound.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexNeumaier {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    abs: f64,
    count: u64,
}

#[inline]
fn two_sum(s: f64, c: &mut f64, x: f64) -> f64 {
    let t = s + x;
    if s.abs() >= x.abs() {
        *c += (s - t) + x;
    } else {
        *c += (x - t) + s;
    }
    t
}

impl ComplexNeumaier {
    #[inline]
    pub fn add(&mut self, x: Complex64) {
        self.re = two_sum(self.re, &mut self.re_c, x.re);
        self.im = two_sum(self.im, &mut self.im_c, x.im);
        self.abs += x.norm();
        self.count += 1;
    }

    pub fn merge(&mut self, other: &ComplexNeumaier) {
        self.re = two_sum(self.re, &mut self.re_c, other.re);
        self.im = two_sum(self.im, &mut self.im_c, other.im);
        self.re_c += other.re_c;
        self.im_c += other.im_c;
        self.abs += other.abs;
        self.count += other.count + 1;
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs
    }

    /// Bound on the accumulated summation error: `2u|S| + 4 n u^2 sum|x|`
    /// per component, doubled for the complex split.
    pub fn rounding_bound(&self) -> f64 {
        let u = UNIT_ROUNDOFF;
        2.0 * (2.0 * u * self.sum().norm() + 4.0 * (self.count as f64 + 1.0) * u * u * self.abs)
    }
}

/// Sums `f(k)` for `k` in `lo..=hi` in fixed blocks, reduced in block order.
///
/// Returns the compensated sum and the accumulator (for the moduli sum).
pub fn sum_range<F>(exec: Execution, lo: u64, hi: u64, f: F) -> ComplexNeumaier
where
    F: Fn(u64) -> Complex64 + Sync + Send,
{
    let mut total = ComplexNeumaier::default();
    if hi < lo {
        return total;
    }
    let blocks = ((hi - lo) / CHUNK + 1) as usize;
    let partials = exec.map_range(blocks, |b| {
        let a = lo + b as u64 * CHUNK;
        let e = (a + CHUNK - 1).min(hi);
        let mut acc = ComplexNeumaier::default();
        for k in a..=e {
            acc.add(f(k));
        }
        acc
    });
    for p in &partials {
        total.merge(p);
    }
    total
}

const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `sum_{k > n} k^(-p)` for real `p > 1`, with an absolute error bound.
///
/// Explicit summation up to a cut-off, then Euler-Maclaurin with the
/// remainder bounded by twice the first omitted correction.
pub fn zeta_tail(p: f64, n: u64) -> (f64, f64) {
    assert!(p > 1.0, "zeta_tail needs p > 1, got {p}");
    let cut = (32.0f64).max((2.0 * p).ceil()) as u64;
    let mut head = 0.0;
    let mut head_abs = 0.0;
    let mut c = 0.0;
    let mut a = n;
    if n < cut {
        for k in (n + 1..=cut).rev() {
            let t = (k as f64).powf(-p);
            head = two_sum(head, &mut c, t);
            head_abs += t;
        }
        a = cut;
    }
    let af = a as f64;
    let mut s = af.powf(1.0 - p) / (p - 1.0) - 0.5 * af.powf(-p);
    // rising factorial (p)_{2j-1} / (2j)! times a^{-p-2j+1}
    let mut fac = p / 2.0 * af.powf(-p - 1.0);
    let mut last = 0.0;
    let inv_a2 = 1.0 / (af * af);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j + 1;
        let term = b * fac;
        if j == BERNOULLI.len() {
            last = term.abs();
            break;
        }
        s += term;
        let m = 2 * j as u64;
        // advance to (p)_{2j+1}/(2j+2)!
        fac *= (p + m as f64 - 1.0) * (p + m as f64) / ((m + 1) as f64 * (m + 2) as f64) * inv_a2;
    }
    let value = head + c + s;
    let err = 2.0 * last + 8.0 * UNIT_ROUNDOFF * (head_abs + s.abs());
    (value, err)
}

/// `sum_{k > n} k^(-s) <= n^(1-s)/(s-1)` for `s > 1`, `n >= 1`.
pub fn power_tail_bound(s: f64, n: u64) -> f64 {
    debug_assert!(s > 1.0);
    (n as f64).powf(1.0 - s) / (s - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tail(p: f64, n: u64, upto: u64) -> f64 {
        // summed backwards for accuracy
        let mut s = 0.0;
        for k in (n + 1..=upto).rev() {
            s += (k as f64).powf(-p);
        }
        s
    }

    #[test]
    fn zeta_two_from_zero_is_basel() {
        let (v, e) = zeta_tail(2.0, 0);
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v - exact).abs() <= e + 1e-15, "{v} vs {exact}");
        assert!(e < 1e-14);
    }

    #[test]
    fn zeta_tail_matches_truncated_sum_plus_integral_tail() {
        for &(p, n) in &[(3.0, 5u64), (2.5, 100), (4.0, 1000), (6.5, 0)] {
            let (v, e) = zeta_tail(p, n);
            let m = 200_000u64;
            let lo = brute_tail(p, n, m);
            let hi = lo + power_tail_bound(p, m);
            assert!(v >= lo - e - 1e-15 && v <= hi + e + 1e-15, "p={p} n={n}");
        }
    }

    #[test]
    fn zeta_three_value() {
        let (v, _) = zeta_tail(3.0, 0);
        assert!((v - 1.202_056_903_159_594_2).abs() < 1e-14);
    }

    #[test]
    fn neumaier_beats_naive_on_cancellation() {
        let mut acc = ComplexNeumaier::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            acc.add(Complex64::new(x, -x));
        }
        assert_eq!(acc.sum(), Complex64::new(2.0, -2.0));
    }

    #[test]
    fn chunked_sum_is_schedule_independent() {
        let f = |k: u64| Complex64::new(1.0 / (k as f64).powi(2), (k as f64).sin() / k as f64);
        let a = sum_range(Execution::Sequential, 1, 300_000, f).sum();
        let b = sum_range(Execution::Parallel, 1, 300_000, f).sum();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn enclosure_arithmetic_widens() {
        let a = Enclosure::new(Complex64::new(1.0, 0.0), 1e-10);
        let b = Enclosure::new(Complex64::new(0.0, 2.0), 1e-10);
        let p = a * b;
        assert!(p.bound >= 3e-10);
        assert!((a + b).bound >= 2e-10);
    }
}
