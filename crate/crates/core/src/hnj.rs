//! The sets `H_{n,j} = { w ∈ SU_n : w* e_jj w = e_11 }` and paths inside them.
//!
//! Indices are 0-based: `j = 0` is the set fixing the first basis line.
//! `H_{n,0}` consists of the matrices `diag(det(w)^{-1}, w)` with `w ∈ U_{n−1}`,
//! and `H_{n,j} = v · H_{n,0}` for the fixed element `v = hnj_sample(n, j)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect, ComplexMatrix, Geodesic, ONE};
use crate::sequence::{endpoint_law_defect, planar_rotation};

/// The standard element of `H_{n,j}`: the quarter-turn in the `(0, j)` plane.
pub fn hnj_sample(n: usize, j: usize) -> ComplexMatrix {
    planar_rotation(n, j, core::f64::consts::FRAC_PI_2)
}

/// Largest of the unitarity, determinant and line-law defects of `w`.
pub fn hnj_defect(j: usize, w: &ComplexMatrix) -> f64 {
    if j >= w.dim() {
        return f64::INFINITY;
    }
    unitarity_defect(w).max((w.determinant() - ONE).norm()).max(endpoint_law_defect(w, j))
}

pub fn hnj_membership(n: usize, j: usize, w: &ComplexMatrix, tol: f64) -> bool {
    w.dim() == n && hnj_defect(j, w) <= tol
}

#[derive(Debug, Clone)]
enum Route {
    Constant,
    Direct(Geodesic),
    Waypoint(Geodesic, Geodesic),
}

/// A path in `H_{n,j}` between two of its elements.
#[derive(Debug, Clone)]
pub struct HnjPath {
    start: ComplexMatrix,
    end: ComplexMatrix,
    frame: ComplexMatrix,
    route: Route,
}

impl HnjPath {
    /// The point at parameter `t`; the endpoints are returned verbatim.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        if t <= 0.0 {
            return self.start.clone();
        }
        if t >= 1.0 {
            return self.end.clone();
        }
        let lower = match &self.route {
            Route::Constant => return self.start.clone(),
            Route::Direct(g) => g.at(t),
            Route::Waypoint(a, b) => {
                if t <= 0.5 {
                    a.at(2.0 * t)
                } else {
                    b.at(2.0 * t - 1.0)
                }
            }
        };
        self.frame.mul_ref(&compensated(&lower))
    }

    /// Samples at `t = i/T`.
    pub fn samples(&self, resolution: usize) -> Vec<ComplexMatrix> {
        (0..=resolution).map(|i| self.at(i as f64 / resolution as f64)).collect()
    }

    /// Whether the connection had to go through the identity waypoint.
    pub fn uses_waypoint(&self) -> bool {
        matches!(self.route, Route::Waypoint(..))
    }
}

/// `diag(det(w)^{-1}, w)`.
fn compensated(lower: &ComplexMatrix) -> ComplexMatrix {
    let det = lower.determinant();
    ComplexMatrix::scalar(1, ONE / det).direct_sum(lower)
}

/// Connects `w0` to `w1` inside `H_{n,j}`.
///
/// Both points are translated into `H_{n,0}`, where their `U_{n−1}` parts are
/// joined by a geodesic and the first diagonal entry compensates the
/// determinant. If the relative unitary has `−1` in its spectrum the route
/// goes through the identity; if that also fails, the closed-branch
/// logarithm is used.
pub fn hnj_connect(
    n: usize,
    j: usize,
    w0: &ComplexMatrix,
    w1: &ComplexMatrix,
    tol: f64,
    branch_margin: f64,
) -> Result<HnjPath> {
    for w in [w0, w1] {
        let defect = if w.dim() == n { hnj_defect(j, w) } else { f64::INFINITY };
        if defect > tol {
            return Err(Error::NotInHnj { n, j, defect });
        }
    }
    let frame = hnj_sample(n, j);
    let route = if n == 1 || w0 == w1 {
        Route::Constant
    } else {
        let lower0 = frame.adjoint_mul(w0).block(1, 1, n - 1);
        let lower1 = frame.adjoint_mul(w1).block(1, 1, n - 1);
        match Geodesic::new(&lower0, &lower1, tol, branch_margin) {
            Ok(g) => Route::Direct(g),
            Err(Error::BranchFailure { .. }) => {
                let id = ComplexMatrix::identity(n - 1);
                match (Geodesic::new(&lower0, &id, tol, branch_margin), Geodesic::new(&id, &lower1, tol, branch_margin))
                {
                    (Ok(a), Ok(b)) => Route::Waypoint(a, b),
                    _ => Route::Direct(Geodesic::closed(&lower0, &lower1)),
                }
            }
            Err(e) => return Err(e),
        }
    };
    Ok(HnjPath { start: w0.clone(), end: w1.clone(), frame, route })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn membership_examples() {
        assert!(hnj_membership(3, 0, &ComplexMatrix::identity(3), 1e-12));
        assert!(hnj_membership(3, 1, &hnj_sample(3, 1), 1e-12));
        assert!(!hnj_membership(3, 1, &ComplexMatrix::identity(3), 1e-6));
    }

    #[test]
    fn twisted_connection_stays_inside() {
        let theta = 0.7;
        let twist = ComplexMatrix::diag(&[C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta)]);
        let w0 = hnj_sample(2, 1);
        let w1 = twist.mul_ref(&w0);
        assert!(hnj_membership(2, 1, &w1, 1e-12));
        let path = hnj_connect(2, 1, &w0, &w1, 1e-9, 1e-6).unwrap();
        let samples = path.samples(32);
        assert_eq!(samples[0], w0);
        assert_eq!(samples[32], w1);
        for w in &samples {
            assert!(hnj_defect(1, w) < 1e-10);
        }
    }

    #[test]
    fn antipodal_points_use_the_waypoint() {
        // Lower parts 1 and −1 in U_2 sit on the branch cut of each other.
        let w0 = ComplexMatrix::identity(3);
        let w1 = ComplexMatrix::diag(&[ONE, -ONE, -ONE]);
        let path = hnj_connect(3, 0, &w0, &w1, 1e-9, 1e-6).unwrap();
        for w in path.samples(16) {
            assert!(hnj_defect(0, &w) < 1e-10);
        }
        assert!(!path.uses_waypoint() || path.at(0.5).distance(&w0) < 1e-12);
    }

    #[test]
    fn non_members_are_rejected() {
        let w = ComplexMatrix::identity(2);
        assert!(matches!(hnj_connect(2, 1, &w, &hnj_sample(2, 1), 1e-9, 1e-6), Err(Error::NotInHnj { .. })));
    }
}
