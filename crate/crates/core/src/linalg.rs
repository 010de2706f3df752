//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::summation::Enclosure;

pub type CMat = DMatrix<Complex64>;

pub fn enclosure_matrix(h: &[Vec<Enclosure>]) -> CMat {
    let n = h.len();
    let m = h.first().map_or(0, Vec::len);
    CMat::from_fn(n, m, |i, j| h[i][j].value)
}

/// Frobenius norm of the entrywise error bounds.
pub fn bound_norm(h: &[Vec<Enclosure>]) -> f64 {
    h.iter().flatten().map(|e| e.bound * e.bound).sum::<f64>().sqrt()
}

pub fn solve(a: &CMat, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let rhs = CMat::from_column_slice(b.len(), 1, b);
    solve_mat(a, &rhs).map(|x| x.column(0).iter().copied().collect())
}

pub fn solve_mat(a: &CMat, b: &CMat) -> Option<CMat> {
    if a.nrows() == 0 {
        return Some(CMat::zeros(0, b.ncols()));
    }
    a.clone().lu().solve(b)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // ⟨a, b⟩ = b^H a
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Projects `v` off the orthonormal vectors `q`, twice for stability.
fn orthogonalize(v: &mut [Complex64], q: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in q {
            let c = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

/// Orthonormal basis of the column span of `m` (modified Gram-Schmidt),
/// dropping columns whose residual falls below `rtol` times the largest
/// column norm.
pub fn orthonormal_columns(m: &CMat, rtol: f64) -> Vec<Vec<Complex64>> {
    let scale = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v: Vec<Complex64> = m.column(j).iter().copied().collect();
        orthogonalize(&mut v, &q);
        let n = norm(&v);
        if n > rtol * scale && n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
            q.push(v);
        }
    }
    q
}

/// Orthonormal completion of `q` to a basis of ℂⁿ; returns only the added
/// vectors. Standard basis vectors are chosen greedily by largest residual.
pub fn complete_basis(q: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let mut all: Vec<Vec<Complex64>> = q.to_vec();
    let mut added = Vec::new();
    while all.len() < n {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for i in 0..n {
            let mut e = vec![Complex64::default(); n];
            e[i] = Complex64::new(1.0, 0.0);
            orthogonalize(&mut e, &all);
            let r = norm(&e);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, e));
            }
        }
        let (r, mut e) = best.expect("n > 0");
        e.iter_mut().for_each(|x| *x /= r);
        all.push(e.clone());
        added.push(e);
    }
    added
}

/// Null space of `m` (rows assumed independent) as orthonormal columns.
pub fn nullspace(m: &CMat) -> Vec<Vec<Complex64>> {
    let rows = orthonormal_columns(&m.adjoint(), 1e-13);
    complete_basis(&rows, m.ncols())
}

/// Orthogonal projector onto the span of the given columns.
pub fn projector(cols: &CMat) -> CMat {
    let q = orthonormal_columns(cols, 1e-13);
    let n = cols.nrows();
    let mut p = CMat::zeros(n, n);
    for v in &q {
        let c = CMat::from_column_slice(n, 1, v);
        p += &c * c.adjoint();
    }
    p
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(h: &CMat) -> Option<CMat> {
    let herm = (h + h.adjoint()).scale(0.5);
    herm.cholesky().map(|c| c.l())
}

/// Block diagonal matrix `diag(a, b)`.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows() + b.nrows();
    let mut m = CMat::zeros(n, n);
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

pub fn pinv(m: &CMat) -> CMat {
    if m.is_empty() {
        return m.transpose();
    }
    m.clone().pseudo_inverse(1e-13 * max_abs(m).max(f64::MIN_POSITIVE)).expect("eps is nonnegative")
}

/// Rows-of-columns serialization for reports.
pub mod matrix_serde {
    use super::CMat;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMat) -> Vec<Vec<Complex64>> {
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Option<CMat> {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return None;
        }
        Some(CMat::from_fn(n, c, |i, j| rows[i][j]))
    }

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows: Vec<Vec<Complex64>> = Vec::deserialize(d)?;
        from_rows(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nullspace_of_a_row() {
        let m = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 1.0)]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((m[(0, 0)] * v[0] + m[(0, 1)] * v[1]).norm() < 1e-15);
    }

    #[test]
    fn block_diag_layout() {
        let a = CMat::from_element(1, 1, c(2.0, 0.0));
        let b = CMat::from_element(2, 2, c(3.0, 0.0));
        let m = block_diag(&a, &b);
        assert_eq!(m[(0, 0)], c(2.0, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
        assert_eq!(m[(2, 1)], c(3.0, 0.0));
    }

    proptest! {
        #[test]
        fn nullspace_is_orthonormal_and_annihilated(
            entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
            rows in 1usize..4,
        ) {
            let n = 4;
            let m = CMat::from_fn(rows, n, |i, j| {
                let (a, b) = entries[(i * n + j) % entries.len()];
                c(a, b + 0.1 * i as f64)
            });
            let rank = orthonormal_columns(&m.adjoint(), 1e-13).len();
            let ns = nullspace(&m);
            prop_assert_eq!(ns.len(), n - rank);
            for v in &ns {
                let col = CMat::from_column_slice(n, 1, v);
                prop_assert!(max_abs(&(&m * &col)) < 1e-12);
                prop_assert!((norm(v) - 1.0).abs() < 1e-12);
            }
        }
    }
}
