//! Path sequences in `SU_n` and the elementary maps they induce.
//!
//! For a sequence `(W_1, …, W_n)` the elementary map is
//! `W(u; t) = Π_j [1 + (u − 1) ⊗ W_j(t)* e_jj W_j(t)]`, with the factors
//! multiplied in ascending `j`. Each projection `W_j* e_jj W_j` has rank one,
//! so a factor is applied as a rank-one update instead of a dense product.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::linalg::{ComplexMatrix, Geodesic, C64, ONE, ZERO};

/// `n` paths in `SU_n`, each sampled at `t = i/T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSequence {
    n: usize,
    paths: Vec<Vec<ComplexMatrix>>,
}

/// The planar rotation by `angle` in the `(0, j)` coordinate plane.
pub fn planar_rotation(n: usize, j: usize, angle: f64) -> ComplexMatrix {
    let mut w = ComplexMatrix::identity(n);
    if j == 0 {
        return w;
    }
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    w[(0, 0)] = C64::new(c, 0.0);
    w[(0, j)] = C64::new(s, 0.0);
    w[(j, 0)] = C64::new(-s, 0.0);
    w[(j, j)] = C64::new(c, 0.0);
    w
}

impl PathSequence {
    pub fn new(paths: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let n = paths.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a path sequence needs n ≥ 1".into()));
        }
        let len = paths[0].len();
        if len < 2 {
            return Err(Error::InvalidArgument("paths need a positive resolution".into()));
        }
        for p in &paths {
            if p.len() != len {
                return Err(Error::SizeMismatch(format!("path lengths {} and {len} differ", p.len())));
            }
            if let Some(bad) = p.iter().find(|w| w.dim() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
            }
        }
        Ok(PathSequence { n, paths })
    }

    /// `W_1 ≡ 1` and, for `j > 1`, the rotation by `πt/2` in the `(1, j)` plane.
    pub fn standard(n: usize, resolution: usize) -> Result<Self> {
        if n == 0 || resolution == 0 {
            return Err(Error::InvalidArgument(format!("standard sequence needs n, T ≥ 1 (got {n}, {resolution})")));
        }
        let paths = (0..n)
            .map(|j| {
                (0..=resolution).map(|i| planar_rotation(n, j, PI * i as f64 / (2.0 * resolution as f64))).collect()
            })
            .collect();
        Ok(PathSequence { n, paths })
    }

    /// The sequence `V_i ⊗ W_j` of degree `mn`, entry `j·m + i`.
    ///
    /// With this ordering the induced elementary map equals the composition
    /// `W(V(u; t); t)` exactly.
    pub fn composite(v: &PathSequence, w: &PathSequence) -> Result<Self> {
        if v.resolution() != w.resolution() {
            return Err(Error::SizeMismatch(format!("resolutions {} and {} differ", v.resolution(), w.resolution())));
        }
        let mut paths = Vec::with_capacity(v.n * w.n);
        for wj in &w.paths {
            for vi in &v.paths {
                paths.push(vi.iter().zip(wj).map(|(a, b)| a.tensor(b)).collect());
            }
        }
        Ok(PathSequence { n: v.n * w.n, paths })
    }

    /// Conjugates every sample by the fixed unitary `c`: `W_j ↦ c* W_j c`.
    pub fn conjugated(&self, c: &ComplexMatrix) -> Self {
        let paths = self.paths.iter().map(|p| p.iter().map(|w| c.adjoint_mul(&w.mul_ref(c))).collect()).collect();
        PathSequence { n: self.n, paths }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.paths[0].len() - 1
    }

    pub fn sample(&self, j: usize, i: usize) -> &ComplexMatrix {
        &self.paths[j][i]
    }

    pub fn path(&self, j: usize) -> &[ComplexMatrix] {
        &self.paths[j]
    }

    /// `W_j(t)` for arbitrary `t`: grid samples verbatim, geodesic
    /// interpolation in between (exact for one-parameter subgroups).
    pub fn at(&self, j: usize, t: f64) -> ComplexMatrix {
        let res = self.resolution();
        let x = t.clamp(0.0, 1.0) * res as f64;
        let i = libm::floor(x) as usize;
        let frac = x - i as f64;
        if i >= res {
            return self.paths[j][res].clone();
        }
        if frac <= 0.0 {
            return self.paths[j][i].clone();
        }
        Geodesic::closed(&self.paths[j][i], &self.paths[j][i + 1]).at(frac)
    }

    /// All `W_j(t)` at once.
    pub fn values_at(&self, t: f64) -> Vec<ComplexMatrix> {
        (0..self.n).map(|j| self.at(j, t)).collect()
    }

    pub fn values_at_index(&self, i: usize) -> Vec<ComplexMatrix> {
        self.paths.iter().map(|p| p[i].clone()).collect()
    }

    /// `max_j ‖W_j(1)* e_jj W_j(1) − e_11‖`.
    pub fn endpoint_law_defect(&self) -> f64 {
        let res = self.resolution();
        (0..self.n).map(|j| endpoint_law_defect(&self.paths[j][res], j)).fold(0.0, f64::max)
    }

    /// `max_j ‖W_j(0) − 1‖`.
    pub fn start_defect(&self) -> f64 {
        self.paths.iter().map(|p| p[0].distance_from_identity()).fold(0.0, f64::max)
    }

    /// `max |det W_j(t) − 1|` over all samples.
    pub fn det_defect(&self) -> f64 {
        self.paths.iter().flat_map(|p| p.iter()).map(|w| (w.determinant() - ONE).norm()).fold(0.0, f64::max)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.paths.iter().flat_map(|p| p.iter()).map(ComplexMatrix::unitarity_defect_frobenius).fold(0.0, f64::max)
    }

    /// Largest of the three sequence-law defects.
    pub fn law_defect(&self) -> f64 {
        self.endpoint_law_defect().max(self.start_defect()).max(self.det_defect())
    }

    pub fn max_step_jump(&self) -> f64 {
        self.paths.iter().flat_map(|p| p.windows(2).map(|w| w[1].distance(&w[0]))).fold(0.0, f64::max)
    }

    /// Largest sample-wise distance to another sequence of the same shape.
    pub fn distance(&self, other: &PathSequence) -> f64 {
        if self.n != other.n || self.resolution() != other.resolution() {
            return f64::INFINITY;
        }
        self.paths
            .iter()
            .zip(&other.paths)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.distance(y)))
            .fold(0.0, f64::max)
    }
}

/// `‖w* e_jj w − e_11‖` (0-based `j`).
pub fn endpoint_law_defect(w: &ComplexMatrix, j: usize) -> f64 {
    let n = w.dim();
    let proj = rank_one_projection(&rank_one_vector(w, j));
    proj.distance(&ComplexMatrix::unit(n, 0, 0))
}

/// `r` with `w* e_jj w = r r*`, i.e. the conjugated `j`-th row of `w`.
pub fn rank_one_vector(w: &ComplexMatrix, j: usize) -> Vec<C64> {
    (0..w.dim()).map(|a| w[(j, a)].conj()).collect()
}

fn rank_one_projection(r: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(r.len(), |a, b| r[a] * r[b].conj())
}

/// Right-multiplies `x` (size `n·D`) by `1 + (u − 1) ⊗ r r*`.
fn apply_factor(x: &mut ComplexMatrix, u_minus_one: &ComplexMatrix, r: &[C64], z: &mut [C64], q: &mut [C64]) {
    let d = u_minus_one.dim();
    let width = x.dim();
    let um = u_minus_one.as_slice();
    for row in x.as_mut_slice().chunks_exact_mut(width) {
        z.fill(ZERO);
        for (a, &ra) in r.iter().enumerate() {
            if ra == ZERO {
                continue;
            }
            for (zv, &xv) in z.iter_mut().zip(&row[a * d..(a + 1) * d]) {
                *zv += xv * ra;
            }
        }
        q.fill(ZERO);
        for (alpha, &zv) in z.iter().enumerate() {
            if zv == ZERO {
                continue;
            }
            for (qv, &m) in q.iter_mut().zip(&um[alpha * d..(alpha + 1) * d]) {
                *qv += zv * m;
            }
        }
        for (b, &rb) in r.iter().enumerate() {
            if rb == ZERO {
                continue;
            }
            let rbc = rb.conj();
            for (xv, &qv) in row[b * d..(b + 1) * d].iter_mut().zip(q.iter()) {
                *xv += qv * rbc;
            }
        }
    }
}

/// The vectors `r_j` of the rank-one projections `W_j* e_jj W_j`.
pub fn rank_one_vectors(values: &[ComplexMatrix]) -> Vec<Vec<C64>> {
    values.iter().enumerate().map(|(j, w)| rank_one_vector(w, j)).collect()
}

/// One fibre of the elementary map, given the sequence values `W_j(t)`.
pub fn elementary_fiber(u: &ComplexMatrix, values: &[ComplexMatrix]) -> ComplexMatrix {
    elementary_fiber_with(u, &rank_one_vectors(values))
}

fn elementary_fiber_with(u: &ComplexMatrix, vectors: &[Vec<C64>]) -> ComplexMatrix {
    let n = vectors.len();
    let d = u.dim();
    let mut u_minus_one = u.clone();
    for i in 0..d {
        u_minus_one[(i, i)] -= ONE;
    }
    let mut x = ComplexMatrix::identity(n * d);
    if u_minus_one.max_abs() == 0.0 {
        return x;
    }
    let (mut z, mut q) = (vec![ZERO; d], vec![ZERO; d]);
    for r in vectors {
        apply_factor(&mut x, &u_minus_one, r, &mut z, &mut q);
    }
    x
}

/// The elementary map induced by a path sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMap {
    seq: PathSequence,
}

impl ElementaryMap {
    pub fn new(seq: PathSequence) -> Self {
        ElementaryMap { seq }
    }

    pub fn standard(n: usize, resolution: usize) -> Result<Self> {
        PathSequence::standard(n, resolution).map(ElementaryMap::new)
    }

    pub fn sequence(&self) -> &PathSequence {
        &self.seq
    }

    pub fn degree(&self) -> usize {
        self.seq.degree()
    }

    pub fn resolution(&self) -> usize {
        self.seq.resolution()
    }

    /// `W(u; t)` for the given sequence values; `u` is not re-validated.
    pub fn eval_with(u: &AlgebraElement, values: &[ComplexMatrix]) -> AlgebraElement {
        let vectors = rank_one_vectors(values);
        u.map(u.amp() * values.len(), |f| elementary_fiber_with(f, &vectors))
    }

    /// `W(u; t)` at an arbitrary parameter.
    pub fn eval(&self, u: &AlgebraElement, t: f64, tol: f64) -> Result<AlgebraElement> {
        check_unitary(u, tol)?;
        Ok(Self::eval_with(u, &self.seq.values_at(t)))
    }

    /// `W(u; i/T)` at a grid index.
    pub fn eval_index(&self, u: &AlgebraElement, i: usize, tol: f64) -> Result<AlgebraElement> {
        check_unitary(u, tol)?;
        Ok(Self::eval_with(u, &self.seq.values_at_index(i)))
    }

    /// The full image path `t ↦ W(u; t)` on the sequence grid.
    pub fn image(&self, u: &AlgebraElement, tol: f64) -> Result<GridPath> {
        check_unitary(u, tol)?;
        GridPath::from_fn(self.resolution(), |i| Ok(Self::eval_with(u, &self.seq.values_at_index(i))))
    }
}

pub(crate) fn check_unitary(u: &AlgebraElement, tol: f64) -> Result<()> {
    let defect = u.unitarity_defect();
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// The composition `γ(u; t) = W(V(u; t); t)` of a degree-`m` map `V` and a
/// degree-`n` map `W` acting on `M_m`, with both of its evaluators.
#[derive(Debug, Clone)]
pub struct ComposedMap {
    inner: ElementaryMap,
    outer: ElementaryMap,
    product: ElementaryMap,
}

impl ComposedMap {
    pub fn new(inner: ElementaryMap, outer: ElementaryMap) -> Result<Self> {
        let product = ElementaryMap::new(PathSequence::composite(inner.sequence(), outer.sequence())?);
        Ok(ComposedMap { inner, outer, product })
    }

    pub fn inner(&self) -> &ElementaryMap {
        &self.inner
    }

    pub fn outer(&self) -> &ElementaryMap {
        &self.outer
    }

    /// The induced elementary map of degree `mn`.
    pub fn product(&self) -> &ElementaryMap {
        &self.product
    }

    /// `W(V(u; s); t)`; with `s = t` this is the direct evaluation of `γ`.
    pub fn eval_direct(&self, u: &AlgebraElement, s: f64, t: f64) -> AlgebraElement {
        let v = ElementaryMap::eval_with(u, &self.inner.sequence().values_at(s));
        ElementaryMap::eval_with(&v, &self.outer.sequence().values_at(t))
    }

    /// Product-formula evaluation through the induced sequence.
    pub fn eval_product(&self, u: &AlgebraElement, t: f64) -> AlgebraElement {
        ElementaryMap::eval_with(u, &self.product.sequence().values_at(t))
    }

    /// Largest disagreement of the two evaluators over the grid.
    pub fn dual_evaluation_defect(&self, u: &AlgebraElement) -> f64 {
        let res = self.product.resolution();
        (0..=res)
            .map(|i| {
                let t = i as f64 / res as f64;
                self.eval_direct(u, t, t).distance(&self.eval_product(u, t))
            })
            .fold(0.0, f64::max)
    }
}

/// Composes two elementary maps, returning the induced degree-`mn` map.
pub fn gamma_compose(v: &ElementaryMap, w: &ElementaryMap) -> Result<ComposedMap> {
    ComposedMap::new(v.clone(), w.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseAlgebra;
    use crate::grid::dd_check;

    fn sample_unitary(d: usize) -> ComplexMatrix {
        let h = ComplexMatrix::from_fn(d, |i, j| {
            let x = (i * 7 + j * 3) as f64;
            C64::new(libm::cos(x), if i == j { 0.0 } else { libm::sin(x) * if i < j { 1.0 } else { -1.0 } })
        });
        crate::linalg::exp_i_hermitian(&h, 0.8)
    }

    #[test]
    fn standard_sequence_small_cases() {
        let one = PathSequence::standard(1, 4).unwrap();
        assert!(one.path(0).iter().all(|w| *w == ComplexMatrix::identity(1)));
        let two = PathSequence::standard(2, 4).unwrap();
        let end = two.sample(1, 4);
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(end.distance(&expected) < 1e-15);
        assert!(endpoint_law_defect(end, 1) < 1e-15);
    }

    #[test]
    fn rotation_has_unit_determinant() {
        for k in 0..=8 {
            let w = planar_rotation(3, 2, k as f64 * 0.37);
            assert!((w.determinant() - ONE).norm() < 1e-14);
            assert!(crate::linalg::unitarity_defect(&w) < 1e-14);
        }
    }

    #[test]
    fn elementary_endpoints() {
        let u = AlgebraElement::constant(BaseAlgebra::Matrices(2), 1, &sample_unitary(2)).unwrap();
        let e = ElementaryMap::standard(3, 8).unwrap();
        let w0 = e.eval_index(&u, 0, 1e-9).unwrap();
        let w1 = e.eval_index(&u, 8, 1e-9).unwrap();
        assert!(w0.distance(&u.tensor_identity(3)) < 1e-14);
        assert!(w1.distance(&u.pow(3).pad_identity(2)) < 1e-13);
        let image = e.image(&u, 1e-9).unwrap();
        assert!(dd_check(image, 1, 3, 1e-12).is_ok());
    }

    #[test]
    fn rank_one_update_matches_dense_formula() {
        let u = sample_unitary(2);
        let seq = PathSequence::standard(3, 8).unwrap();
        let values = seq.values_at(0.3);
        let fast = elementary_fiber(&u, &values);
        let mut dense = ComplexMatrix::identity(6);
        let um1 = &u - &ComplexMatrix::identity(2);
        for (j, w) in values.iter().enumerate() {
            let proj = w.adjoint_mul(&ComplexMatrix::unit(3, j, j).mul_ref(w));
            dense = dense.mul_ref(&(&ComplexMatrix::identity(6) + &um1.tensor(&proj)));
        }
        assert!(fast.distance(&dense) < 1e-14);
    }

    #[test]
    fn basepoint_is_preserved() {
        let one = AlgebraElement::identity(BaseAlgebra::Scalars, 1);
        let e = ElementaryMap::standard(4, 8).unwrap();
        for i in 0..=8 {
            assert!(e.eval_index(&one, i, 1e-9).unwrap().is_identity());
        }
    }

    #[test]
    fn interpolation_is_exact_for_rotations() {
        let seq = PathSequence::standard(3, 4).unwrap();
        let w = seq.at(2, 0.3);
        assert!(w.distance(&planar_rotation(3, 2, 0.3 * PI / 2.0)) < 1e-14);
    }
}
