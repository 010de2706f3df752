//! Sequences in ℓ² given by a finite part plus power-law tail rules.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::symbol::{eval_parts, DiagonalSymbol};

/// Entries `coef · u_k^phase · |z_k|^modulus · k^(−decay)` for `k ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTerm {
    pub coef: Complex64,
    pub phase: i32,
    pub modulus: i32,
    pub decay: f64,
    pub start: u64,
}

impl TailTerm {
    pub fn new(coef: Complex64, symbol: DiagonalSymbol, decay: f64, start: u64) -> Self {
        TailTerm {
            coef: coef * symbol.scale,
            phase: symbol.phase,
            modulus: symbol.modulus,
            decay,
            start: start.max(1),
        }
    }

    /// `k^(−decay)` for `k ≥ 1`, the plain power-law sequence.
    pub fn power(decay: f64) -> Self {
        Self::new(Complex64::new(1.0, 0.0), DiagonalSymbol::identity(), decay, 1)
    }

    pub fn symbol(&self) -> DiagonalSymbol {
        DiagonalSymbol::new(Complex64::new(1.0, 0.0), self.phase, self.modulus)
    }

    fn key(&self) -> (i32, i32, u64, u64) {
        (self.phase, self.modulus, self.decay.to_bits(), self.start)
    }

    /// Whether `symbol · term` is square summable when `|z_k| = Θ(k^β)`.
    pub fn square_summable_after(&self, beta: f64, symbol_degree: i32) -> bool {
        2.0 * (self.decay - beta * f64::from(self.modulus + symbol_degree)) > 1.0
    }

    #[inline]
    pub fn eval(&self, k: u64, z: Complex64) -> Complex64 {
        if k < self.start {
            return Complex64::new(0.0, 0.0);
        }
        let r = z.norm();
        self.coef * eval_parts(self.phase, self.modulus, z / r, r) * (k as f64).powf(-self.decay)
    }
}

/// A vector of ℓ²(ℕ), indices starting at 1. Entry `k` is the finite part at
/// `k` plus the sum of all tail terms active at `k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelVector {
    finite: BTreeMap<u64, Complex64>,
    tail: Vec<TailTerm>,
}

impl ModelVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(finite: impl IntoIterator<Item = (u64, Complex64)>, tail: Vec<TailTerm>) -> Self {
        let mut v = ModelVector { finite: BTreeMap::new(), tail };
        for (k, c) in finite {
            assert!(k >= 1, "indices start at 1");
            *v.finite.entry(k).or_default() += c;
        }
        v.normalize();
        v
    }

    /// The unit vector `e_k`.
    pub fn basis(k: u64) -> Self {
        Self::new([(k, Complex64::new(1.0, 0.0))], Vec::new())
    }

    pub fn finite_only(entries: impl IntoIterator<Item = (u64, Complex64)>) -> Self {
        Self::new(entries, Vec::new())
    }

    pub fn from_tail(tail: Vec<TailTerm>) -> Self {
        Self::new([], tail)
    }

    pub fn finite_part(&self) -> &BTreeMap<u64, Complex64> {
        &self.finite
    }

    pub fn tail(&self) -> &[TailTerm] {
        &self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_empty() && self.tail.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_empty()
    }

    /// Largest index carried by the finite part.
    pub fn max_finite_index(&self) -> u64 {
        self.finite.keys().next_back().copied().unwrap_or(0)
    }

    fn normalize(&mut self) {
        self.finite.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        self.tail.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut out: Vec<TailTerm> = Vec::with_capacity(self.tail.len());
        for t in self.tail.drain(..) {
            match out.last_mut() {
                Some(last) if last.key() == t.key() => last.coef += t.coef,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coef != Complex64::new(0.0, 0.0));
        self.tail = out;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut v = self.clone();
        v.finite.values_mut().for_each(|x| *x *= c);
        v.tail.iter_mut().for_each(|t| t.coef *= c);
        v.normalize();
        v
    }

    pub fn add(&self, other: &ModelVector) -> Self {
        let mut v = self.clone();
        for (&k, &c) in &other.finite {
            *v.finite.entry(k).or_default() += c;
        }
        v.tail.extend_from_slice(&other.tail);
        v.normalize();
        v
    }

    pub fn sub(&self, other: &ModelVector) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Linear combination `Σ c_i v_i`.
    pub fn combination<'a>(terms: impl IntoIterator<Item = (Complex64, &'a ModelVector)>) -> Self {
        let mut acc = ModelVector::zero();
        for (c, v) in terms {
            acc = acc.add(&v.scale(c));
        }
        acc
    }

    /// Entry `k` given the atom `z_k`.
    #[inline]
    pub fn entry(&self, k: u64, z: Complex64) -> Complex64 {
        let mut s = self.finite.get(&k).copied().unwrap_or_default();
        for t in &self.tail {
            s += t.eval(k, z);
        }
        s
    }

    /// Tail part only, at index `k`.
    #[inline]
    pub fn tail_entry(&self, k: u64, z: Complex64) -> Complex64 {
        self.tail.iter().map(|t| t.eval(k, z)).sum()
    }

    /// Multiplies by a symbol: finite entries exactly, tail terms by symbol
    /// bookkeeping. The atom lookup is only used for the finite part.
    pub(crate) fn map_symbol(&self, s: &DiagonalSymbol, atom: impl Fn(u64) -> Complex64) -> Self {
        let finite = self.finite.iter().map(|(&k, &c)| (k, c * s.eval(atom(k))));
        let tail = self
            .tail
            .iter()
            .map(|t| TailTerm {
                coef: t.coef * s.scale,
                phase: t.phase + s.phase,
                modulus: t.modulus + s.modulus,
                ..*t
            })
            .collect();
        Self::new(finite, tail)
    }

    /// Restriction to the finite part (drops all tails).
    pub fn finite_projection(&self) -> Self {
        ModelVector { finite: self.finite.clone(), tail: Vec::new() }
    }
}
