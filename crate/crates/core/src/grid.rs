//! Paths sampled on a uniform grid of `[0, 1]` and dimension drop elements.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::AlgebraElement;
use crate::error::{Endpoint, Error, Result};
use crate::linalg::ComplexMatrix;

/// Samples at `t = i/T`, `i = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    samples: Vec<AlgebraElement>,
}

impl GridPath {
    pub fn new(samples: Vec<AlgebraElement>) -> Result<Self> {
        let first = samples.first().ok_or_else(|| Error::InvalidArgument("a path needs at least one sample".into()))?;
        if samples.len() < 2 {
            return Err(Error::InvalidArgument("a path needs a positive resolution".into()));
        }
        for s in &samples[1..] {
            if s.base() != first.base() || s.dim() != first.dim() {
                return Err(Error::SizeMismatch(format!(
                    "sample in M_{}({}) next to M_{}({})",
                    s.amp(),
                    s.base(),
                    first.amp(),
                    first.base()
                )));
            }
        }
        Ok(GridPath { samples })
    }

    /// Evaluates `f` at every grid index.
    pub fn from_fn(resolution: usize, f: impl FnMut(usize) -> Result<AlgebraElement>) -> Result<Self> {
        let samples = (0..=resolution).map(f).collect::<Result<Vec<_>>>()?;
        GridPath::new(samples)
    }

    pub fn constant(x: &AlgebraElement, resolution: usize) -> Self {
        GridPath { samples: alloc::vec![x.clone(); resolution.max(1) + 1] }
    }

    pub fn resolution(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn sample(&self, i: usize) -> &AlgebraElement {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[AlgebraElement] {
        &self.samples
    }

    pub fn first(&self) -> &AlgebraElement {
        &self.samples[0]
    }

    pub fn last(&self) -> &AlgebraElement {
        &self.samples[self.samples.len() - 1]
    }

    pub fn amp(&self) -> usize {
        self.samples[0].amp()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    /// `‖sample(i+1) − sample(i)‖`, fibrewise Frobenius.
    pub fn step_jump(&self, i: usize) -> f64 {
        self.samples[i + 1].distance(&self.samples[i])
    }

    /// Continuity modulus: the largest adjacent jump.
    pub fn max_step_jump(&self) -> f64 {
        (0..self.resolution()).map(|i| self.step_jump(i)).fold(0.0, f64::max)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.samples.iter().map(AlgebraElement::unitarity_defect_bound).fold(0.0, f64::max)
    }

    /// Largest sample-wise distance to a path of the same resolution.
    pub fn distance(&self, other: &GridPath) -> f64 {
        if self.resolution() != other.resolution() {
            return f64::INFINITY;
        }
        self.samples.iter().zip(&other.samples).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    pub fn map(&self, mut f: impl FnMut(&AlgebraElement) -> AlgebraElement) -> Self {
        GridPath { samples: self.samples.iter().map(&mut f).collect() }
    }
}

/// A path whose endpoints have the block forms `a ⊗ 1_n` and `b ⊗ 1_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionDropElement {
    path: GridPath,
    m: usize,
    n: usize,
    recovered_a: AlgebraElement,
    recovered_b: AlgebraElement,
    boundary_defect: f64,
}

impl DimensionDropElement {
    pub fn path(&self) -> &GridPath {
        &self.path
    }

    pub fn into_path(self) -> GridPath {
        self.path
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `M_m`-slot element `a` with `f(0) = a ⊗ 1_n`.
    pub fn recovered_a(&self) -> &AlgebraElement {
        &self.recovered_a
    }

    /// The `M_n`-slot element `b` with `f(1) = b ⊗ 1_m`.
    pub fn recovered_b(&self) -> &AlgebraElement {
        &self.recovered_b
    }

    pub fn boundary_defect(&self) -> f64 {
        self.boundary_defect
    }
}

/// Splits `x` as `a ⊗ 1_copies`: returns the first diagonal block and the
/// largest deviation of the remaining blocks from the expected pattern.
pub fn tensor_identity_split(x: &ComplexMatrix, copies: usize) -> (ComplexMatrix, f64) {
    let size = x.dim() / copies;
    let a = x.block(0, 0, size);
    let mut defect: f64 = 0.0;
    for bi in 0..copies {
        for bj in 0..copies {
            if bi == 0 && bj == 0 {
                continue;
            }
            let mut sq = 0.0;
            for i in 0..size {
                for j in 0..size {
                    let v = x[(bi * size + i, bj * size + j)];
                    let target = if bi == bj { a[(i, j)] } else { crate::linalg::ZERO };
                    sq += (v - target).norm_sqr();
                }
            }
            defect = defect.max(libm::sqrt(sq));
        }
    }
    (a, defect)
}

fn split_element(x: &AlgebraElement, copies: usize) -> (AlgebraElement, f64) {
    let mut defect: f64 = 0.0;
    let mut fibers = Vec::with_capacity(x.fibers().len());
    for f in x.fibers() {
        let (a, d) = tensor_identity_split(f, copies);
        defect = defect.max(d);
        fibers.push(a);
    }
    (AlgebraElement::from_parts(x.base(), x.amp() / copies, fibers), defect)
}

/// Checks the boundary conditions of `M_d(A) ⊗ Z_{m,n}` on a sampled path.
pub fn dd_check(f: GridPath, m: usize, n: usize, boundary_tol: f64) -> Result<DimensionDropElement> {
    let (a, b, defect) = dd_defects(&f, m, n)?;
    if defect.0 > boundary_tol {
        return Err(Error::BoundaryViolation { endpoint: Endpoint::Start, defect: defect.0 });
    }
    if defect.1 > boundary_tol {
        return Err(Error::BoundaryViolation { endpoint: Endpoint::End, defect: defect.1 });
    }
    Ok(DimensionDropElement { path: f, m, n, recovered_a: a, recovered_b: b, boundary_defect: defect.0.max(defect.1) })
}

/// Boundary defects at both ends without enforcing a tolerance.
pub fn dd_defects(f: &GridPath, m: usize, n: usize) -> Result<(AlgebraElement, AlgebraElement, (f64, f64))> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("degrees ({m},{n}) must be positive")));
    }
    if !f.amp().is_multiple_of(m * n) {
        return Err(Error::DimensionMismatch { expected: m * n, found: f.amp() });
    }
    let (a, d0) = split_element(f.first(), n);
    let (b, d1) = split_element(f.last(), m);
    Ok((a, b, (d0, d1)))
}

/// `t ↦ u ⊗ 1_{mn}`, the image of `u` under the unital embedding.
pub fn iota_embed(u: &AlgebraElement, m: usize, n: usize, resolution: usize) -> Result<DimensionDropElement> {
    let value = u.tensor_identity(m * n);
    dd_check(GridPath::constant(&value, resolution), m, n, 0.0)
}

/// `u ⊕ 1_{k−1}`.
pub fn mu_k(u: &AlgebraElement, k: usize) -> Result<AlgebraElement> {
    if k == 0 {
        return Err(Error::InvalidArgument("mu_k needs k ≥ 1".into()));
    }
    Ok(u.pad_identity(k - 1))
}

/// Which half of a concatenation a grid index falls in, and where.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    /// Sample `2i` of the first path.
    First(usize),
    /// Sample `2T − 2i` of the second path.
    Second(usize),
}

/// Sample-index arithmetic for `(f ∗ g)(i/T)`; `T` must be even.
pub fn star_index(i: usize, resolution: usize) -> Half {
    if 2 * i <= resolution {
        Half::First(2 * i)
    } else {
        Half::Second(2 * resolution - 2 * i)
    }
}

/// `(f ∗ g)(t) = f(2t)` on the first half and `g(2 − 2t)` on the second.
///
/// `f` must have the form `a ⊗ 1_n` at `t = 0` and `g` the form `b ⊗ 1_m`
/// there; both must agree at `t = 1`.
pub fn star_concat(
    f: &GridPath,
    g: &GridPath,
    m: usize,
    n: usize,
    glue_tol: f64,
    boundary_tol: f64,
) -> Result<DimensionDropElement> {
    let t = f.resolution();
    if g.resolution() != t {
        return Err(Error::SizeMismatch(format!("resolutions {t} and {} differ", g.resolution())));
    }
    if !t.is_multiple_of(2) {
        return Err(Error::OddResolution(t));
    }
    if f.dim() != g.dim() || f.first().base() != g.first().base() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: g.dim() });
    }
    let glue = f.last().distance(g.last());
    if glue > glue_tol {
        return Err(Error::GlueMismatch { defect: glue });
    }
    dd_check(star_join(f, g)?, m, n, boundary_tol)
}

/// The concatenated path alone, without glue or boundary checks.
pub fn star_join(f: &GridPath, g: &GridPath) -> Result<GridPath> {
    let t = f.resolution();
    if g.resolution() != t {
        return Err(Error::SizeMismatch(format!("resolutions {t} and {} differ", g.resolution())));
    }
    if !t.is_multiple_of(2) {
        return Err(Error::OddResolution(t));
    }
    let samples = (0..=t)
        .map(|i| match star_index(i, t) {
            Half::First(j) => f.sample(j).clone(),
            Half::Second(j) => g.sample(j).clone(),
        })
        .collect();
    GridPath::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseAlgebra;
    use crate::linalg::{C64, ONE};

    fn winding_loop(g: usize) -> AlgebraElement {
        AlgebraElement::from_fn(BaseAlgebra::CircleLoops(1, g), 1, |z| ComplexMatrix::scalar(1, z)).unwrap()
    }

    #[test]
    fn iota_of_winding_loop_is_six_copies() {
        let u = winding_loop(16);
        let e = iota_embed(&u, 2, 3, 4).unwrap();
        assert_eq!(e.boundary_defect(), 0.0);
        for s in e.path().samples() {
            for (g, f) in s.fibers().iter().enumerate() {
                assert_eq!(*f, ComplexMatrix::scalar(6, u.base().point(g)));
            }
        }
        assert_eq!(*e.recovered_a(), u.tensor_identity(2));
        assert_eq!(*e.recovered_b(), u.tensor_identity(3));
    }

    #[test]
    fn corrupted_endpoint_is_rejected() {
        let base = BaseAlgebra::Scalars;
        let bad = AlgebraElement::constant(base, 6, &ComplexMatrix::unit(6, 0, 1)).unwrap();
        let good = AlgebraElement::identity(base, 6);
        let path = GridPath::new(alloc::vec![bad, good]).unwrap();
        match dd_check(path, 2, 3, 1e-9) {
            Err(Error::BoundaryViolation { endpoint: Endpoint::Start, defect }) => assert!(defect > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_corrupted_block_is_detected() {
        let mut x = ComplexMatrix::identity(6);
        x[(5, 5)] = C64::new(0.0, 1.0);
        let (_, defect) = tensor_identity_split(&x, 3);
        assert!(defect > 1.0);
    }

    #[test]
    fn mu_k_pads_with_identity() {
        let u = winding_loop(8);
        let v = mu_k(&u, 2).unwrap();
        for (g, f) in v.fibers().iter().enumerate() {
            assert_eq!(*f, ComplexMatrix::diag(&[u.base().point(g), ONE]));
        }
        assert_eq!(mu_k(&u, 1).unwrap(), u);
    }

    #[test]
    fn star_concat_checks_glue_and_parity() {
        let base = BaseAlgebra::Scalars;
        let one = AlgebraElement::identity(base, 6);
        let f = GridPath::constant(&one, 4);
        let h = star_concat(&f, &f, 2, 3, 1e-9, 1e-9).unwrap();
        assert_eq!(h.path().sample(2), f.last());
        let odd = GridPath::constant(&one, 3);
        assert!(matches!(star_concat(&odd, &odd, 2, 3, 1e-9, 1e-9), Err(Error::OddResolution(3))));
        let shifted = one.map(6, |x| x.scale_real(1.0 + 1e-8));
        let g = GridPath::new(alloc::vec![one.clone(); 4].into_iter().chain([shifted]).collect()).unwrap();
        assert!(matches!(star_concat(&f, &g, 2, 3, 1e-9, 1e-9), Err(Error::GlueMismatch { .. })));
    }
}
