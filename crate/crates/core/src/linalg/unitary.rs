//! Logarithms, exponentials and geodesics in the unitary group.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::eigen::{hermitian_eigen, reconstruct, unitary_eigen};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Operator-norm distance `‖u*u − 1‖`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let mut g = u.adjoint_mul(u);
    for i in 0..g.dim() {
        g[(i, i)] -= C64::new(1.0, 0.0);
    }
    g.op_norm()
}

/// `exp(i t h)` for Hermitian `h`.
pub fn exp_i_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let e = hermitian_eigen(h);
    let vals: Vec<C64> = e.values.iter().map(|&x| C64::from_polar(1.0, t * x)).collect();
    reconstruct(&e.vectors, &vals)
}

/// Exponential of a skew-Hermitian matrix.
pub fn exp_skew_hermitian(s: &ComplexMatrix) -> ComplexMatrix {
    // s = i h with h = -i s Hermitian.
    let h = s.scale(C64::new(0.0, -1.0));
    exp_i_hermitian(&h, 1.0)
}

/// Spectral form of a unitary logarithm: `L = V diag(i θ) V*`.
///
/// Keeping the eigenbasis makes `exp(t L)` cheap and exact for every `t`.
#[derive(Debug, Clone)]
pub struct SpectralLog {
    pub vectors: ComplexMatrix,
    pub phases: Vec<f64>,
}

impl SpectralLog {
    pub fn zero(dim: usize) -> Self {
        SpectralLog { vectors: ComplexMatrix::identity(dim), phases: alloc::vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    /// The skew-Hermitian matrix itself.
    pub fn matrix(&self) -> ComplexMatrix {
        let vals: Vec<C64> = self.phases.iter().map(|&p| C64::new(0.0, p)).collect();
        reconstruct(&self.vectors, &vals)
    }

    /// `exp(t L)`.
    pub fn exp_scaled(&self, t: f64) -> ComplexMatrix {
        let vals: Vec<C64> = self.phases.iter().map(|&p| C64::from_polar(1.0, t * p)).collect();
        reconstruct(&self.vectors, &vals)
    }

    pub fn max_phase(&self) -> f64 {
        self.phases.iter().fold(0.0_f64, |acc, p| acc.max(p.abs()))
    }
}

/// Principal logarithm with eigen-phases strictly inside `(−π + margin, π − margin)`.
pub fn spectral_log(u: &ComplexMatrix, tol: f64, branch_margin: f64) -> Result<SpectralLog> {
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    let e = unitary_eigen(u);
    if let Some(&phase) = e.phases.iter().find(|p| p.abs() > PI - branch_margin) {
        return Err(Error::BranchFailure { phase, margin: branch_margin });
    }
    Ok(SpectralLog { vectors: e.vectors, phases: e.phases })
}

/// Logarithm on the closed branch: phases in `(−π, π]`, with `−1` mapped to `+iπ`.
///
/// Used where any logarithm will do (for instance to contract a loop), never
/// where continuity in the input matters.
pub fn spectral_log_closed(u: &ComplexMatrix) -> SpectralLog {
    let e = unitary_eigen(u);
    let phases = e.phases.iter().map(|&p| if p <= -PI + 1e-12 { PI } else { p }).collect();
    SpectralLog { vectors: e.vectors, phases }
}

/// Principal logarithm of a unitary, as a skew-Hermitian matrix.
pub fn unitary_log(u: &ComplexMatrix, tol: f64, branch_margin: f64) -> Result<ComplexMatrix> {
    spectral_log(u, tol, branch_margin).map(|l| l.matrix())
}

/// The geodesic `u0 · exp(t · log(u0* u1))` as a reusable evaluator.
#[derive(Debug, Clone)]
pub struct Geodesic {
    start: ComplexMatrix,
    end: ComplexMatrix,
    log: SpectralLog,
}

impl Geodesic {
    pub fn new(u0: &ComplexMatrix, u1: &ComplexMatrix, tol: f64, branch_margin: f64) -> Result<Self> {
        if u0.dim() != u1.dim() {
            return Err(Error::DimensionMismatch { expected: u0.dim(), found: u1.dim() });
        }
        let rel = u0.adjoint_mul(u1);
        let log = spectral_log(&rel, tol, branch_margin)?;
        Ok(Geodesic { start: u0.clone(), end: u1.clone(), log })
    }

    /// Geodesic through the closed-branch logarithm; never fails for unitary input.
    pub fn closed(u0: &ComplexMatrix, u1: &ComplexMatrix) -> Self {
        let log = spectral_log_closed(&u0.adjoint_mul(u1));
        Geodesic { start: u0.clone(), end: u1.clone(), log }
    }

    /// Point at parameter `t`; the endpoints are returned verbatim.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        if t <= 0.0 {
            self.start.clone()
        } else if t >= 1.0 {
            self.end.clone()
        } else {
            self.start.mul_ref(&self.log.exp_scaled(t))
        }
    }

    pub fn log(&self) -> &SpectralLog {
        &self.log
    }
}

pub fn unitary_geodesic(
    u0: &ComplexMatrix,
    u1: &ComplexMatrix,
    t: f64,
    tol: f64,
    branch_margin: f64,
) -> Result<ComplexMatrix> {
    Geodesic::new(u0, u1, tol, branch_margin).map(|g| g.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    #[test]
    fn defect_of_scaled_identity() {
        let u = ComplexMatrix::scalar(2, C64::new(2.0, 0.0));
        assert!((unitarity_defect(&u) - 3.0).abs() < 1e-12);
        assert_eq!(unitarity_defect(&ComplexMatrix::identity(3)), 0.0);
    }

    #[test]
    fn log_of_quarter_turns() {
        let i = C64::new(0.0, 1.0);
        let u = ComplexMatrix::diag(&[i, -i]);
        let l = unitary_log(&u, 1e-9, 1e-6).unwrap();
        let expected = ComplexMatrix::diag(&[C64::new(0.0, PI / 2.0), C64::new(0.0, -PI / 2.0)]);
        assert!(l.distance(&expected) < 1e-12);
        assert!(unitary_log(&ComplexMatrix::identity(3), 1e-9, 1e-6).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn log_rejects_branch_point_and_non_unitary() {
        let minus = ComplexMatrix::scalar(2, -ONE);
        assert!(matches!(unitary_log(&minus, 1e-9, 1e-6), Err(Error::BranchFailure { .. })));
        let big = ComplexMatrix::scalar(2, C64::new(2.0, 0.0));
        assert!(matches!(unitary_log(&big, 1e-9, 1e-6), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn scalar_geodesic_midpoint() {
        let u1 = ComplexMatrix::scalar(1, C64::from_polar(1.0, PI / 2.0));
        let mid = unitary_geodesic(&ComplexMatrix::identity(1), &u1, 0.5, 1e-9, 1e-6).unwrap();
        assert!((mid[(0, 0)] - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_log_contracts_minus_one() {
        let g = Geodesic::closed(&ComplexMatrix::identity(2), &ComplexMatrix::scalar(2, -ONE));
        let mid = g.at(0.5);
        assert!(mid.distance(&ComplexMatrix::scalar(2, C64::new(0.0, 1.0))) < 1e-12);
    }
}
