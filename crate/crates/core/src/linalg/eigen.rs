//! Eigendecompositions for Hermitian and unitary matrices.
//!
//! Hermitian matrices are diagonalised with the cyclic complex Jacobi method.
//! Unitaries are reduced to two commuting Hermitian problems: the real part of
//! a rotated copy `e^{-iα}u` separates eigenvalues by `cos(θ-α)`, and clusters
//! that stay unresolved (mirror pairs `θ-α ≈ -(θ'-α)`) are split by the
//! imaginary part restricted to the cluster. Results are deterministic and
//! ordered by ascending eigen-phase.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{ComplexMatrix, C64, ZERO};

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// Eigen-phases in `(-π, π]`, ascending.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `phases`.
    pub vectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 80;
const ROTATION_ANGLE: f64 = 0.612_345_678_9;
const CLUSTER_GAP: f64 = 1e-3;

pub fn hermitian_eigen(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.dim();
    // Symmetrise so that rounding noise in the input cannot stall the sweeps.
    let mut a = ComplexMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 || r <= 1e-20 * scale {
        return;
    }
    let n = a.dim();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    let g00 = C64::new(c, 0.0);
    let g01 = C64::new(s, 0.0);
    let g10 = phase.conj() * (-s);
    let g11 = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g00 + akq * g10;
        a[(k, q)] = akp * g01 + akq * g11;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Eigendecomposition of a unitary (more generally, of a normal) matrix.
pub fn unitary_eigen(u: &ComplexMatrix) -> UnitaryEigen {
    let n = u.dim();
    if n == 0 {
        return UnitaryEigen { phases: Vec::new(), vectors: ComplexMatrix::zeros(0) };
    }
    let rot = C64::from_polar(1.0, -ROTATION_ANGLE);
    let ru = u.scale(rot);
    let re_part = ComplexMatrix::from_fn(n, |i, j| (ru[(i, j)] + ru[(j, i)].conj()) * 0.5);
    let stage1 = hermitian_eigen(&re_part);
    let mut vectors = stage1.vectors;

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && stage1.values[end] - stage1.values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            split_cluster(u, rot, &mut vectors, start, end);
        }
        start = end;
    }

    let mut phases = Vec::with_capacity(n);
    for c in 0..n {
        let col = vectors.column(c);
        let uc = apply(u, &col);
        let lambda: C64 = col.iter().zip(&uc).map(|(a, b)| a.conj() * b).sum();
        phases.push(libm::atan2(lambda.im, lambda.re));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| phases[i].total_cmp(&phases[j]).then(i.cmp(&j)));
    let sorted_phases = order.iter().map(|&i| phases[i]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, |r, c| vectors[(r, order[c])]);
    UnitaryEigen { phases: sorted_phases, vectors: sorted_vectors }
}

fn apply(m: &ComplexMatrix, x: &[C64]) -> Vec<C64> {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

fn split_cluster(u: &ComplexMatrix, rot: C64, vectors: &mut ComplexMatrix, start: usize, end: usize) {
    let n = u.dim();
    let k = end - start;
    let basis: Vec<Vec<C64>> = (start..end).map(|c| vectors.column(c)).collect();
    let images: Vec<Vec<C64>> = basis.iter().map(|b| apply(u, b)).collect();
    // Restriction of e^{-iα}u to the (approximately invariant) cluster subspace.
    let restricted =
        ComplexMatrix::from_fn(k, |i, j| basis[i].iter().zip(&images[j]).map(|(a, b)| a.conj() * b).sum::<C64>() * rot);
    let half_i = C64::new(0.0, 0.5);
    let im_part = ComplexMatrix::from_fn(k, |i, j| (restricted[(i, j)] - restricted[(j, i)].conj()) * half_i.conj());
    let inner = hermitian_eigen(&im_part);
    let mut fresh = vec![vec![ZERO; n]; k];
    for (c, col) in fresh.iter_mut().enumerate() {
        for (b, basis_vec) in basis.iter().enumerate() {
            let w = inner.vectors[(b, c)];
            for (x, &y) in col.iter_mut().zip(basis_vec) {
                *x += y * w;
            }
        }
    }
    for (c, col) in fresh.iter().enumerate() {
        vectors.set_column(start + c, col);
    }
}

/// `V · diag(values) · V^*` for a column-orthonormal `V`.
pub fn reconstruct(vectors: &ComplexMatrix, values: &[C64]) -> ComplexMatrix {
    let n = vectors.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (c, &val) in values.iter().enumerate() {
        if val == ZERO {
            continue;
        }
        for i in 0..n {
            let vi = vectors[(i, c)] * val;
            if vi == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, c)].conj();
            }
        }
    }
    out
}

/// Rank of a (near-)projection: number of eigenvalues above one half.
pub fn projection_rank(p: &ComplexMatrix) -> usize {
    hermitian_eigen(p).values.iter().filter(|&&v| v > 0.5).count()
}
