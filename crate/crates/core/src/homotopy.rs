//! Homotopies of paths with fixed endpoints, and of path sequences.
//!
//! Two paths `P`, `Q` in `SU_n` with common endpoints are joined by
//! `H(s, t) = P(t)·exp(s·L(t))`, where `L(t)` is a logarithm of `P(t)*Q(t)`
//! obtained by following the eigen-phases continuously in `t`. Its value at
//! `t = 1` is a logarithm of the identity, i.e. `2πi·N` in some basis. When
//! `N ≠ 0` the loop `s ↦ exp(s·L(1))` is contracted by folding its diagonal
//! entries into one slot, and the contraction is spread along `t`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::certificate::{run_stage, Endpoints, HomotopyCertificate, Limits, Slice, SliceVerdict, StageReport};
use crate::error::{Error, Result};
use crate::hnj::{hnj_connect, HnjPath};
use crate::linalg::unitary::spectral_log_closed;
use crate::linalg::{unitary_eigen, ComplexMatrix, Geodesic, SpectralLog, C64};
use crate::sequence::{planar_rotation, PathSequence};

fn wrap_angle(x: f64) -> f64 {
    let mut y = libm::fmod(x + PI, TAU);
    if y < 0.0 {
        y += TAU;
    }
    y - PI
}

/// Logarithms of `samples[i]` whose eigen-phases vary continuously in `i`.
///
/// Eigenvalues of adjacent samples are matched greedily by phase distance;
/// a match at distance `π/2` or more is reported as ambiguous.
pub fn unwrap_logs(samples: &[ComplexMatrix]) -> Result<Vec<SpectralLog>> {
    let mut out: Vec<SpectralLog> = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return Ok(out);
    };
    out.push(spectral_log_closed(first));
    for (index, u) in samples.iter().enumerate().skip(1) {
        let prev = &out[index - 1].phases;
        let e = unitary_eigen(u);
        let d = e.phases.len();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
        for (k, &theta) in e.phases.iter().enumerate() {
            for (l, &phi) in prev.iter().enumerate() {
                pairs.push((wrap_angle(theta - phi).abs(), k, l));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used_k = alloc::vec![false; d];
        let mut used_l = alloc::vec![false; d];
        let mut phases = alloc::vec![0.0; d];
        let mut assigned = 0;
        for (dist, k, l) in pairs {
            if used_k[k] || used_l[l] {
                continue;
            }
            if dist >= FRAC_PI_2 {
                return Err(Error::UnwrapFailure { index, distance: dist });
            }
            used_k[k] = true;
            used_l[l] = true;
            phases[k] = prev[l] + wrap_angle(e.phases[k] - prev[l]);
            assigned += 1;
            if assigned == d {
                break;
            }
        }
        out.push(SpectralLog { vectors: e.vectors, phases });
    }
    Ok(out)
}

/// Midpoint refinement of a sampled path (geodesic midpoints).
pub fn refine(samples: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * samples.len());
    for w in samples.windows(2) {
        out.push(w[0].clone());
        out.push(Geodesic::closed(&w[0], &w[1]).at(0.5));
    }
    if let Some(last) = samples.last() {
        out.push(last.clone());
    }
    out
}

/// Contraction of the based loop `s ↦ V·diag(e^{isφ_k})·V*` with `Σφ_k = 0`.
///
/// `at(s, τ)` equals the loop at `τ = 0` and the identity at `τ = 1`; every
/// stage rotates one diagonal entry into the first slot through the plane
/// rotation joining the two basis vectors, which keeps the determinant fixed.
#[derive(Debug, Clone)]
pub struct LoopFold {
    basis: ComplexMatrix,
    phases: Vec<f64>,
}

impl LoopFold {
    pub fn new(basis: ComplexMatrix, phases: Vec<f64>) -> Self {
        LoopFold { basis, phases }
    }

    /// Integer windings `φ_k / 2π` of the loop.
    pub fn windings(&self) -> Vec<i64> {
        self.phases.iter().map(|p| libm::round(p / TAU) as i64).collect()
    }

    pub fn loop_at(&self, s: f64) -> ComplexMatrix {
        let vals: Vec<C64> = self.phases.iter().map(|&p| C64::from_polar(1.0, s * p)).collect();
        crate::linalg::reconstruct(&self.basis, &vals)
    }

    /// The diagonal part of the contraction, before the change of basis.
    pub fn diagonal_at(&self, s: f64, tau: f64) -> ComplexMatrix {
        let d = self.phases.len();
        let x: Vec<C64> = self.phases.iter().map(|&p| C64::from_polar(1.0, s * p)).collect();
        if d <= 1 {
            let p = self.phases.first().copied().unwrap_or(0.0);
            return ComplexMatrix::scalar(d, C64::from_polar(1.0, s * p * (1.0 - tau)));
        }
        let stages = d - 1;
        let u = tau.clamp(0.0, 1.0) * stages as f64;
        let q = (libm::floor(u) as usize).min(stages - 1);
        let theta = (u - q as f64) * FRAC_PI_2;
        let b = q + 1;
        let mut left = alloc::vec![C64::new(1.0, 0.0); d];
        left[0] = x[..=q].iter().product();
        left[(b + 1)..].copy_from_slice(&x[(b + 1)..]);
        let mut moving = alloc::vec![C64::new(1.0, 0.0); d];
        moving[b] = x[b];
        let r = planar_rotation(d, b, theta);
        let mid = r.mul_ref(&ComplexMatrix::diag(&moving)).mul_ref(&r.adjoint());
        ComplexMatrix::diag(&left).mul_ref(&mid)
    }

    pub fn at(&self, s: f64, tau: f64) -> ComplexMatrix {
        let d = self.diagonal_at(s, tau);
        self.basis.mul_ref(&d).mul_ref(&self.basis.adjoint())
    }
}

/// Square filling between two sampled paths with common endpoints.
#[derive(Debug, Clone)]
pub struct RelEndpointHomotopy {
    p: Vec<ComplexMatrix>,
    logs: Vec<SpectralLog>,
    fold: Option<LoopFold>,
}

/// Builds `H(s, t)` between `p` and `q`, doubling the resolution once if the
/// eigen-phase matching is ambiguous.
pub fn rel_endpoint_homotopy(p: &[ComplexMatrix], q: &[ComplexMatrix], tol: f64) -> Result<RelEndpointHomotopy> {
    if p.len() != q.len() || p.len() < 2 {
        return Err(Error::SizeMismatch(alloc::format!("path lengths {} and {}", p.len(), q.len())));
    }
    let res = p.len() - 1;
    let start_gap = p[0].distance(&q[0]);
    let end_gap = p[res].distance(&q[res]);
    if start_gap.max(end_gap) > tol {
        return Err(Error::PreconditionViolation {
            condition: "paths share their endpoints",
            defect: start_gap.max(end_gap),
        });
    }
    let relative = |p: &[ComplexMatrix], q: &[ComplexMatrix]| -> Vec<ComplexMatrix> {
        p.iter().zip(q).map(|(a, b)| a.adjoint_mul(b)).collect()
    };
    let logs = match unwrap_logs(&relative(p, q)) {
        Ok(l) => l,
        Err(Error::UnwrapFailure { .. }) => {
            let fine = unwrap_logs(&relative(&refine(p), &refine(q)))?;
            fine.into_iter().step_by(2).collect()
        }
        Err(e) => return Err(e),
    };
    let end = &logs[res];
    let fold = if end.phases.iter().any(|ph| ph.abs() > PI) {
        Some(LoopFold::new(end.vectors.clone(), end.phases.clone()))
    } else {
        None
    };
    Ok(RelEndpointHomotopy { p: p.to_vec(), logs, fold })
}

impl RelEndpointHomotopy {
    pub fn resolution(&self) -> usize {
        self.p.len() - 1
    }

    /// Whether a non-contractible logarithm had to be folded away.
    pub fn folded(&self) -> bool {
        self.fold.is_some()
    }

    /// `H(s, i/T)`.
    pub fn at(&self, s: f64, i: usize) -> ComplexMatrix {
        let mut h = self.p[i].mul_ref(&self.logs[i].exp_scaled(s));
        if let Some(fold) = &self.fold {
            let t = i as f64 / self.resolution() as f64;
            h = h.mul_ref(&fold.at(s, 1.0 - t).adjoint());
        }
        h
    }

    pub fn slice(&self, s: f64) -> Vec<ComplexMatrix> {
        (0..=self.resolution()).map(|i| self.at(s, i)).collect()
    }

    /// Certifies the square: unitarity, fixed ends and continuity.
    pub fn certificate(&self, q: &[ComplexMatrix], grid_s: usize, limits: &Limits) -> Result<StageReport> {
        let start = MatrixPath(self.p.clone());
        let end = MatrixPath(q.to_vec());
        let (p0, p1) = (self.p[0].clone(), self.p[self.resolution()].clone());
        let (report, _, _) = run_stage(
            "rel-endpoint",
            grid_s,
            |s| Ok(MatrixPath(self.slice(s))),
            |slice| {
                let defect = slice.0[0].distance(&p0).max(slice.0[slice.0.len() - 1].distance(&p1));
                Ok(SliceVerdict::valid(defect, limits.boundary))
            },
            Endpoints { start: Some(&start), end: Some(&end) },
            limits,
        )?;
        Ok(report)
    }
}

/// A plain sampled path of matrices, as a certificate slice.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPath(pub Vec<ComplexMatrix>);

impl Slice for MatrixPath {
    fn unitarity_defect(&self) -> f64 {
        self.0.iter().map(ComplexMatrix::unitarity_defect_frobenius).fold(0.0, f64::max)
    }

    fn step_jump_t(&self) -> f64 {
        self.0.windows(2).map(|w| w[1].distance(&w[0])).fold(0.0, f64::max)
    }

    fn slice_distance(&self, other: &Self) -> f64 {
        if self.0.len() != other.0.len() {
            return f64::INFINITY;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }
}

/// A continuous family of path sequences from `E` to `F`.
///
/// Per index `j`: first the endpoint of `E_j` is transported along the
/// reversed connector `h̄_j` inside `H_{n,j}`,
/// `P_σ(t) = E_j(t)·E_j(1)*·h̄_j(σt)`, and then `P_1` is deformed into `F_j`
/// with endpoints fixed.
#[derive(Debug, Clone)]
pub struct ElementaryHomotopy {
    start: PathSequence,
    end: PathSequence,
    connectors: Vec<HnjPath>,
    squares: Vec<RelEndpointHomotopy>,
}

pub fn elementary_homotopy(
    e: &PathSequence,
    f: &PathSequence,
    tol: f64,
    branch_margin: f64,
) -> Result<ElementaryHomotopy> {
    let n = e.degree();
    let res = e.resolution();
    if f.degree() != n || f.resolution() != res {
        return Err(Error::SizeMismatch(alloc::format!(
            "sequences of shape ({n}, {res}) and ({}, {})",
            f.degree(),
            f.resolution()
        )));
    }
    let mut connectors = Vec::with_capacity(n);
    let mut squares = Vec::with_capacity(n);
    for j in 0..n {
        let tag = |err: Error| err.in_stage(&alloc::format!("path {}", j + 1));
        // h runs from F_j(1) to E_j(1); it is used reversed.
        let h = hnj_connect(n, j, f.sample(j, res), e.sample(j, res), tol, branch_margin).map_err(tag)?;
        let p1: Vec<ComplexMatrix> = (0..=res).map(|i| appended(e, &h, j, 1.0, i)).collect();
        let square = rel_endpoint_homotopy(&p1, f.path(j), tol).map_err(tag)?;
        connectors.push(h);
        squares.push(square);
    }
    Ok(ElementaryHomotopy { start: e.clone(), end: f.clone(), connectors, squares })
}

fn appended(e: &PathSequence, h: &HnjPath, j: usize, sigma: f64, i: usize) -> ComplexMatrix {
    let res = e.resolution();
    let t = i as f64 / res as f64;
    let end = e.sample(j, res);
    e.sample(j, i).mul_ref(&end.adjoint()).mul_ref(&h.at(1.0 - sigma * t))
}

impl ElementaryHomotopy {
    pub fn degree(&self) -> usize {
        self.start.degree()
    }

    pub fn resolution(&self) -> usize {
        self.start.resolution()
    }

    pub fn start(&self) -> &PathSequence {
        &self.start
    }

    pub fn end(&self) -> &PathSequence {
        &self.end
    }

    /// Slice of the transport stage, `σ ∈ [0, 1]`.
    pub fn transport_slice(&self, sigma: f64) -> PathSequence {
        let res = self.resolution();
        let paths = (0..self.degree())
            .map(|j| (0..=res).map(|i| appended(&self.start, &self.connectors[j], j, sigma, i)).collect())
            .collect();
        PathSequence::new(paths).expect("shape is inherited from a valid sequence")
    }

    /// Slice of the square-filling stage, `s ∈ [0, 1]`.
    pub fn square_slice(&self, s: f64) -> PathSequence {
        let paths = self.squares.iter().map(|sq| sq.slice(s)).collect();
        PathSequence::new(paths).expect("shape is inherited from a valid sequence")
    }

    /// The whole family, with the two stages on the two halves of `[0, 1]`.
    pub fn slice(&self, s: f64) -> PathSequence {
        if s <= 0.5 {
            self.transport_slice(2.0 * s)
        } else {
            self.square_slice(2.0 * s - 1.0)
        }
    }

    /// Indices `j` whose square needed the fold correction.
    pub fn folded_paths(&self) -> Vec<usize> {
        self.squares.iter().enumerate().filter(|(_, s)| s.folded()).map(|(j, _)| j).collect()
    }

    pub fn certificate(&self, grid_s: usize, limits: &Limits) -> Result<HomotopyCertificate> {
        let validate = |seq: &PathSequence| Ok(SliceVerdict::valid(seq.law_defect(), limits.boundary));
        let (transport, _, mid) = run_stage(
            "transport",
            grid_s,
            |s| Ok(self.transport_slice(s)),
            validate,
            Endpoints { start: Some(&self.start), end: None },
            limits,
        )?;
        let (square, _, _) = run_stage(
            "square",
            grid_s,
            |s| Ok(self.square_slice(s)),
            validate,
            Endpoints { start: Some(&mid), end: Some(&self.end) },
            limits,
        )?;
        Ok(HomotopyCertificate::new("elementary-homotopy", alloc::vec![transport, square]))
    }
}
