//! Dense square complex matrices.
//!
//! Entries are stored row-major with 0-based indices; the matrix unit
//! `e_{i,j}` of the documentation (1-based) is `ComplexMatrix::unit(n, i-1, j-1)`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, ONE)
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    /// The matrix unit with a single 1 at `(i, j)` (0-based).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &c) in entries.iter().enumerate() {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    /// Builds a matrix from row-major entries; `None` unless the length is a square.
    pub fn from_row_major(data: Vec<C64>) -> Option<Self> {
        let dim = libm::sqrt(data.len() as f64) as usize;
        let dim = (dim.saturating_sub(1)..=dim + 1).find(|d| d * d == data.len())?;
        Some(ComplexMatrix { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|c| c.norm_sqr()).sum::<f64>())
    }

    /// Frobenius norm of `self - other`; an upper bound for the operator-norm distance.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        libm::sqrt(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>())
    }

    /// Frobenius distance of `self` from the identity.
    pub fn distance_from_identity(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut x = self.data[i * n + j];
                if i == j {
                    x -= ONE;
                }
                acc += x.norm_sqr();
            }
        }
        libm::sqrt(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let gram = self.adjoint().mul_ref(self);
        let eig = crate::linalg::eigen::hermitian_eigen(&gram);
        libm::sqrt(eig.values.last().copied().unwrap_or(0.0).max(0.0))
    }

    pub fn mul_ref(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product of mismatched sizes");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(rk) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    /// `self^* · rhs` without materialising the adjoint.
    pub fn adjoint_mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for k in 0..n {
            for i in 0..n {
                let a = self.data[k * n + i].conj();
                if a == ZERO {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                let row = &mut out[i * n..(i + 1) * n];
                for (o, &b) in row.iter_mut().zip(rk) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    /// Frobenius norm of `u^* u - 1`, computed without allocating the product twice.
    pub fn unitarity_defect_frobenius(&self) -> f64 {
        self.adjoint_mul(self).distance_from_identity()
    }

    /// Kronecker product with the convention that `x ⊗ 1_n` is block diagonal
    /// with `n` copies of `x`: the second factor carries the outer block index,
    /// entry `[(i2·m + i1), (j2·m + j1)] = a[i1, j1] · b[i2, j2]`.
    pub fn tensor(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let m = self.dim;
        let n = b.dim;
        let d = m * n;
        let mut out = Self::zeros(d);
        for i2 in 0..n {
            for j2 in 0..n {
                let bv = b.data[i2 * n + j2];
                if bv == ZERO {
                    continue;
                }
                for i1 in 0..m {
                    let row = (i2 * m + i1) * d + j2 * m;
                    for j1 in 0..m {
                        out.data[row + j1] = self.data[i1 * m + j1] * bv;
                    }
                }
            }
        }
        out
    }

    /// `self ⊗ 1_n`: `n` diagonal copies of `self`.
    pub fn amplify(&self, n: usize) -> ComplexMatrix {
        let m = self.dim;
        let d = m * n;
        let mut out = Self::zeros(d);
        for blk in 0..n {
            for i in 0..m {
                let dst = (blk * m + i) * d + blk * m;
                out.data[dst..dst + m].copy_from_slice(&self.data[i * m..(i + 1) * m]);
            }
        }
        out
    }

    /// `diag(self, b)`.
    pub fn direct_sum(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let m = self.dim;
        let d = m + b.dim;
        let mut out = Self::zeros(d);
        out.set_block(0, 0, self);
        out.set_block(m, m, b);
        out
    }

    /// `self ⊕ 1_extra`.
    pub fn pad_identity(&self, extra: usize) -> ComplexMatrix {
        let m = self.dim;
        let mut out = Self::identity(m + extra);
        out.set_block(0, 0, self);
        out
    }

    /// Square sub-block of side `size` whose upper-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> ComplexMatrix {
        let n = self.dim;
        let mut out = Self::zeros(size);
        for i in 0..size {
            let src = (row + i) * n + col;
            out.data[i * size..(i + 1) * size].copy_from_slice(&self.data[src..src + size]);
        }
        out
    }

    pub fn set_block(&mut self, row: usize, col: usize, b: &ComplexMatrix) {
        let n = self.dim;
        let s = b.dim;
        for i in 0..s {
            let dst = (row + i) * n + col;
            self.data[dst..dst + s].copy_from_slice(&b.data[i * s..(i + 1) * s]);
        }
    }

    /// Conjugation by the permutation sending basis index `perm[i]` to `i`:
    /// `out[i, j] = self[perm[i], perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> ComplexMatrix {
        let n = self.dim;
        assert_eq!(perm.len(), n);
        Self::from_fn(n, |i, j| self.data[perm[i] * n + perm[j]])
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i * self.dim + j]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, &c) in col.iter().enumerate() {
            self.data[i * self.dim + j] = c;
        }
    }

    /// Determinant via LU factorisation with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            let inv = ONE / pivot;
            for i in k + 1..n {
                let f = a[i * n + k] * inv;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        det
    }

    /// Integer power of a unitary; negative exponents use the adjoint.
    pub fn unitary_pow(&self, k: i64) -> ComplexMatrix {
        let base = if k < 0 { self.adjoint() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.dim);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        acc
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.distance(&self.adjoint()) <= tol
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] + self.data[j * n + i].conj()).norm_sqr();
            }
        }
        libm::sqrt(acc) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        crate::linalg::unitary::unitarity_defect(self) <= tol
    }

    pub fn is_special_unitary(&self, tol: f64) -> bool {
        self.is_unitary(tol) && (self.determinant() - ONE).norm() <= tol
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.mul_ref(self).distance(self) <= tol
    }

    /// Frobenius norm of `self·p − p·self`.
    pub fn commutator_norm(&self, p: &ComplexMatrix) -> f64 {
        self.mul_ref(p).distance(&p.mul_ref(self))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.mul_ref(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn amplification_is_block_diagonal() {
        let x = ComplexMatrix::from_fn(2, |i, j| c(i as f64 + 1.0, j as f64));
        let t = x.tensor(&ComplexMatrix::identity(2));
        let mut expected = ComplexMatrix::zeros(4);
        expected.set_block(0, 0, &x);
        expected.set_block(2, 2, &x);
        assert_eq!(t, expected);
        assert_eq!(x.amplify(2), expected);
    }

    #[test]
    fn identity_tensor_identity() {
        let t = ComplexMatrix::identity(2).tensor(&ComplexMatrix::identity(3));
        assert_eq!(t, ComplexMatrix::identity(6));
    }

    #[test]
    fn unit_tensor_unit_by_enumeration() {
        // e_{1,2} ⊗ e_{2,1} (1-based): a has (0,1), b has (1,0).
        let a = ComplexMatrix::unit(2, 0, 1);
        let b = ComplexMatrix::unit(2, 1, 0);
        let t = a.tensor(&b);
        let mut hits = Vec::new();
        for i2 in 0..2 {
            for i1 in 0..2 {
                for j2 in 0..2 {
                    for j1 in 0..2 {
                        let v = t[(i2 * 2 + i1, j2 * 2 + j1)];
                        let expect = a[(i1, j1)] * b[(i2, j2)];
                        assert_eq!(v, expect);
                        if v != ZERO {
                            hits.push((i2 * 2 + i1, j2 * 2 + j1));
                        }
                    }
                }
            }
        }
        assert_eq!(hits, [(2, 1)]);
    }

    #[test]
    fn direct_sum_cases() {
        let u = ComplexMatrix::from_fn(3, |i, j| c(i as f64, j as f64));
        assert_eq!(u.direct_sum(&ComplexMatrix::identity(0)), u);
        let s = ComplexMatrix::identity(2).direct_sum(&ComplexMatrix::identity(3));
        assert_eq!(s, ComplexMatrix::identity(5));
        let e = ComplexMatrix::unit(2, 0, 0);
        let s = e.direct_sum(&e);
        let nonzero: Vec<_> =
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| s[(i, j)] != ZERO).collect();
        assert_eq!(nonzero, [(0, 0), (2, 2)]);
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(ComplexMatrix::identity(4).determinant(), ONE);
        let z = C64::from_polar(1.0, 0.7);
        let d = ComplexMatrix::diag(&[z, ONE]).determinant();
        assert!((d - z).norm() < 1e-15);
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((m.determinant() + ONE).norm() < 1e-15);
    }

    #[test]
    fn op_norm_of_scaled_identity() {
        let m = ComplexMatrix::scalar(3, c(0.0, 2.0));
        assert!((m.op_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_power_is_adjoint_power() {
        let z = C64::from_polar(1.0, 0.3);
        let u = ComplexMatrix::diag(&[z, z.conj()]);
        let p = u.unitary_pow(-3);
        assert!((p[(0, 0)] - C64::from_polar(1.0, -0.9)).norm() < 1e-14);
        assert_eq!(u.unitary_pow(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn from_row_major_rejects_non_square() {
        assert!(ComplexMatrix::from_row_major(vec![ZERO; 5]).is_none());
        assert_eq!(ComplexMatrix::from_row_major(vec![ZERO; 9]).unwrap().dim(), 3);
    }
}
