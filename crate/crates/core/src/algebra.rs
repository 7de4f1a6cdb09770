//! Concrete unital base algebras and their matrix amplifications.
//!
//! An element of `M_d(A)` is stored fibrewise: one matrix of size `d·N` for a
//! point or matrix base, and `G` such matrices for loops over the circle,
//! sampled at `z_g = exp(2πi g/G)`. Inside a fibre the amplification index is
//! the outer one, so the entry `(i_d, i_N)` lives at row `i_d·N + i_N`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BaseAlgebra {
    Scalars,
    /// `M_N`.
    Matrices(usize),
    /// `C(S¹, M_N)` sampled at `G` equally spaced points.
    CircleLoops(usize, usize),
}

impl BaseAlgebra {
    /// Size `N` of a base fibre.
    pub fn fiber_dim(&self) -> usize {
        match *self {
            BaseAlgebra::Scalars => 1,
            BaseAlgebra::Matrices(n) | BaseAlgebra::CircleLoops(n, _) => n,
        }
    }

    /// Number of stored fibres.
    pub fn fiber_count(&self) -> usize {
        match *self {
            BaseAlgebra::CircleLoops(_, g) => g,
            _ => 1,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, BaseAlgebra::CircleLoops(..))
    }

    /// The base `M_k(A)`, with fibres `k` times larger.
    pub fn amplified(&self, k: usize) -> BaseAlgebra {
        match *self {
            BaseAlgebra::Scalars => BaseAlgebra::Matrices(k),
            BaseAlgebra::Matrices(n) => BaseAlgebra::Matrices(k * n),
            BaseAlgebra::CircleLoops(n, g) => BaseAlgebra::CircleLoops(k * n, g),
        }
    }

    /// Circle point of fibre `g` (1 for non-circle bases).
    pub fn point(&self, g: usize) -> C64 {
        match *self {
            BaseAlgebra::CircleLoops(_, count) => C64::from_polar(1.0, 2.0 * PI * (g % count) as f64 / count as f64),
            _ => C64::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaseAlgebra::Matrices(0) | BaseAlgebra::CircleLoops(0, _) => {
                Err(Error::InvalidArgument(format!("{self:?} has empty fibres")))
            }
            BaseAlgebra::CircleLoops(_, g) if g < 2 => {
                Err(Error::InvalidArgument(format!("circle grid {g} is too coarse")))
            }
            _ => Ok(()),
        }
    }
}

impl core::fmt::Display for BaseAlgebra {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BaseAlgebra::Scalars => f.write_str("scalars"),
            BaseAlgebra::Matrices(n) => write!(f, "matrices:{n}"),
            BaseAlgebra::CircleLoops(n, g) => write!(f, "circle:{n}:{g}"),
        }
    }
}

/// An element of `M_amp(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    base: BaseAlgebra,
    amp: usize,
    fibers: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(base: BaseAlgebra, amp: usize, fibers: Vec<ComplexMatrix>) -> Result<Self> {
        base.validate()?;
        if fibers.len() != base.fiber_count() {
            return Err(Error::SizeMismatch(format!("{} fibres supplied for base {base}", fibers.len())));
        }
        let dim = amp * base.fiber_dim();
        if let Some(bad) = fibers.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(AlgebraElement { base, amp, fibers })
    }

    pub(crate) fn from_parts(base: BaseAlgebra, amp: usize, fibers: Vec<ComplexMatrix>) -> Self {
        debug_assert_eq!(fibers.len(), base.fiber_count());
        AlgebraElement { base, amp, fibers }
    }

    pub fn identity(base: BaseAlgebra, amp: usize) -> Self {
        let dim = amp * base.fiber_dim();
        AlgebraElement::from_parts(base, amp, alloc::vec![ComplexMatrix::identity(dim); base.fiber_count()])
    }

    pub fn zero(base: BaseAlgebra, amp: usize) -> Self {
        let dim = amp * base.fiber_dim();
        AlgebraElement::from_parts(base, amp, alloc::vec![ComplexMatrix::zeros(dim); base.fiber_count()])
    }

    /// The same matrix at every fibre.
    pub fn constant(base: BaseAlgebra, amp: usize, m: &ComplexMatrix) -> Result<Self> {
        AlgebraElement::new(base, amp, alloc::vec![m.clone(); base.fiber_count()])
    }

    /// Builds fibres from the circle point (always 1 off the circle).
    pub fn from_fn(base: BaseAlgebra, amp: usize, mut f: impl FnMut(C64) -> ComplexMatrix) -> Result<Self> {
        let fibers = (0..base.fiber_count()).map(|g| f(base.point(g))).collect();
        AlgebraElement::new(base, amp, fibers)
    }

    pub fn base(&self) -> BaseAlgebra {
        self.base
    }

    pub fn amp(&self) -> usize {
        self.amp
    }

    /// Size of each fibre matrix.
    pub fn dim(&self) -> usize {
        self.amp * self.base.fiber_dim()
    }

    pub fn fibers(&self) -> &[ComplexMatrix] {
        &self.fibers
    }

    /// Fibre `g`, indexed cyclically.
    pub fn fiber(&self, g: usize) -> &ComplexMatrix {
        &self.fibers[g % self.fibers.len()]
    }

    pub fn into_fibers(self) -> Vec<ComplexMatrix> {
        self.fibers
    }

    /// Reads the same fibres as an element of `M_amp(base)`; the total
    /// fibre size must be unchanged.
    pub fn rebase(&self, base: BaseAlgebra, amp: usize) -> Result<Self> {
        if base.fiber_count() != self.base.fiber_count() || amp * base.fiber_dim() != self.dim() {
            return Err(Error::SizeMismatch(format!("cannot read M_{}({}) as M_{amp}({base})", self.amp, self.base)));
        }
        Ok(AlgebraElement::from_parts(base, amp, self.fibers.clone()))
    }

    /// Applies `f` to every fibre; the result lives in `M_amp(A)`.
    pub fn map(&self, amp: usize, f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Self {
        AlgebraElement::from_parts(self.base, amp, self.fibers.iter().map(f).collect())
    }

    fn check_compatible(&self, other: &AlgebraElement) -> Result<()> {
        if self.base != other.base {
            return Err(Error::SizeMismatch(format!("bases {} and {} differ", self.base, other.base)));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn zip_map(
        &self,
        other: &AlgebraElement,
        mut f: impl FnMut(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let fibers = self.fibers.iter().zip(&other.fibers).map(|(a, b)| f(a, b)).collect();
        Ok(AlgebraElement::from_parts(self.base, self.amp, fibers))
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<Self> {
        self.zip_map(other, |a, b| a.mul_ref(b))
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn adjoint(&self) -> Self {
        self.map(self.amp, ComplexMatrix::adjoint)
    }

    /// Integer power of a unitary (negative powers use the adjoint).
    pub fn pow(&self, k: i64) -> Self {
        self.map(self.amp, |f| f.unitary_pow(k))
    }

    /// `x ⊗ 1_n` in `M_{amp·n}(A)`.
    pub fn tensor_identity(&self, n: usize) -> Self {
        self.map(self.amp * n, |f| f.amplify(n))
    }

    /// `x ⊕ 1_extra` in `M_{amp+extra}(A)`.
    pub fn pad_identity(&self, extra: usize) -> Self {
        let n = self.base.fiber_dim();
        self.map(self.amp + extra, |f| f.pad_identity(extra * n))
    }

    /// `x ⊕ y` in `M_{amp+amp'}(A)`.
    pub fn direct_sum(&self, other: &AlgebraElement) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::SizeMismatch(format!("bases {} and {} differ", self.base, other.base)));
        }
        let fibers = self.fibers.iter().zip(&other.fibers).map(|(a, b)| a.direct_sum(b)).collect();
        Ok(AlgebraElement::from_parts(self.base, self.amp + other.amp, fibers))
    }

    /// Largest fibrewise Frobenius distance.
    pub fn distance(&self, other: &AlgebraElement) -> f64 {
        self.fibers
            .iter()
            .zip(&other.fibers)
            .map(|(a, b)| a.distance(b))
            .fold(if self.dim() == other.dim() { 0.0 } else { f64::INFINITY }, f64::max)
    }

    /// Largest fibrewise `‖x*x − 1‖` in operator norm.
    pub fn unitarity_defect(&self) -> f64 {
        self.fibers.iter().map(unitarity_defect).fold(0.0, f64::max)
    }

    /// Frobenius upper bound of [`Self::unitarity_defect`], much cheaper.
    pub fn unitarity_defect_bound(&self) -> f64 {
        self.fibers.iter().map(ComplexMatrix::unitarity_defect_frobenius).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.fibers.iter().all(|f| f.is_projection(tol))
    }

    /// Largest fibrewise `‖x x* x − x‖`.
    pub fn partial_isometry_defect(&self) -> f64 {
        self.fibers.iter().map(|f| f.mul_ref(&f.adjoint_mul(f)).distance(f)).fold(0.0, f64::max)
    }

    pub fn is_identity(&self) -> bool {
        self.fibers.iter().all(|f| *f == ComplexMatrix::identity(f.dim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_behave_like_one_by_one_matrices() {
        assert_eq!(BaseAlgebra::Scalars.fiber_dim(), BaseAlgebra::Matrices(1).fiber_dim());
        assert_eq!(BaseAlgebra::Scalars.amplified(3), BaseAlgebra::Matrices(3));
    }

    #[test]
    fn circle_sampling_wraps() {
        let base = BaseAlgebra::CircleLoops(1, 8);
        let z = AlgebraElement::from_fn(base, 1, |z| ComplexMatrix::scalar(1, z)).unwrap();
        assert_eq!(z.fiber(8), z.fiber(0));
        assert!((base.point(2) - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn matrix_amplification_matches_rebasing() {
        // M_2(M_3(A)) and M_6(A) share the fibre layout.
        let base = BaseAlgebra::Matrices(1);
        let x =
            AlgebraElement::constant(base, 6, &ComplexMatrix::from_fn(6, |i, j| C64::new(i as f64, j as f64))).unwrap();
        let y = x.rebase(base.amplified(3), 2).unwrap();
        assert_eq!(y.fibers(), x.fibers());
        assert!(x.rebase(base.amplified(4), 2).is_err());
    }

    #[test]
    fn rejects_wrong_fibre_count() {
        let base = BaseAlgebra::CircleLoops(1, 4);
        assert!(AlgebraElement::new(base, 1, alloc::vec![ComplexMatrix::identity(1)]).is_err());
    }
}
