//! Basic maps into `A ⊗ Z_{m,n}` and the homotopies relating them to the
//! unital embedding.
//!
//! A basic map is `η(u) = W0(u^m ⊕ 1) ∗ W1(u^n ⊕ 1)` for an elementary map
//! `W0` of degree `n` and `W1` of degree `m`. For `k = 1` it is deformed into
//! `u ⊗ 1_{mn}` in three stages: a shear of each half into a composed
//! elementary map, an exchange of the second composed map for the first, and
//! a contraction of `γ ∗ γ` along `t`.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{AlgebraElement, BaseAlgebra};
use crate::certificate::{run_stage, Endpoints, HomotopyCertificate, Limits, SliceVerdict, StageReport};
use crate::config::{Resolution, Tolerances};
use crate::error::{Error, Result};
use crate::grid::{dd_defects, star_join, DimensionDropElement, GridPath};
use crate::homotopy::elementary_homotopy;
use crate::ktheory::{bezout, k1_class};
use crate::linalg::{ComplexMatrix, Geodesic, C64};
use crate::sequence::{check_unitary, ComposedMap, ElementaryMap, PathSequence};

/// Parameters and auxiliary elementary maps of a basic map.
#[derive(Debug, Clone)]
pub struct BasicMapSpec {
    k: usize,
    m: usize,
    n: usize,
    w0: ElementaryMap,
    w1: ElementaryMap,
    coprime: bool,
}

impl BasicMapSpec {
    /// `w0` must have degree `n` and `w1` degree `m`; coprimality is only
    /// recorded here.
    pub fn new(k: usize, m: usize, n: usize, w0: ElementaryMap, w1: ElementaryMap) -> Result<Self> {
        if k == 0 || m < k || n < k {
            return Err(Error::InvalidArgument(format!("need 1 ≤ k ≤ m, n (got k={k}, m={m}, n={n})")));
        }
        if w0.degree() != n || w1.degree() != m {
            return Err(Error::SizeMismatch(format!(
                "auxiliary maps have degrees ({}, {}), expected ({n}, {m})",
                w0.degree(),
                w1.degree()
            )));
        }
        if w0.resolution() != w1.resolution() {
            return Err(Error::SizeMismatch("auxiliary maps use different resolutions".into()));
        }
        if !w0.resolution().is_multiple_of(2) {
            return Err(Error::OddResolution(w0.resolution()));
        }
        let coprime = bezout(m as i64, n as i64).is_ok();
        Ok(BasicMapSpec { k, m, n, w0, w1, coprime })
    }

    /// Both auxiliary maps built from standard sequences.
    pub fn standard(k: usize, m: usize, n: usize, resolution: usize) -> Result<Self> {
        let w0 = ElementaryMap::standard(n.max(1), resolution)?;
        let w1 = ElementaryMap::standard(m.max(1), resolution)?;
        BasicMapSpec::new(k, m, n, w0, w1)
    }

    /// The same auxiliary maps with another `k`.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        BasicMapSpec::new(k, self.m, self.n, self.w0.clone(), self.w1.clone())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w0(&self) -> &ElementaryMap {
        &self.w0
    }

    pub fn w1(&self) -> &ElementaryMap {
        &self.w1
    }

    pub fn resolution(&self) -> usize {
        self.w0.resolution()
    }

    pub fn coprime(&self) -> bool {
        self.coprime
    }

    fn require_coprime(&self) -> Result<()> {
        bezout(self.m as i64, self.n as i64).map(|_| ())
    }

    /// `W0(y^m ⊕ 1) ∗ W1(y^n ⊕ 1)` as a bare path; `y ∈ M_k(A)`.
    fn path(&self, y: &AlgebraElement) -> Result<GridPath> {
        let k = y.amp();
        let first = self.w0.image(&y.pow(self.m as i64).pad_identity(self.m - k), f64::INFINITY)?;
        let second = self.w1.image(&y.pow(self.n as i64).pad_identity(self.n - k), f64::INFINITY)?;
        star_join(&first, &second)
    }
}

/// `η(u)` for `u ∈ U(M_k(A))`.
pub fn basic_map_eval(spec: &BasicMapSpec, u: &AlgebraElement, tol: &Tolerances) -> Result<DimensionDropElement> {
    if u.amp() != spec.k {
        return Err(Error::DimensionMismatch { expected: spec.k, found: u.amp() });
    }
    check_unitary(u, tol.tol)?;
    let (m, n, k) = (spec.m, spec.n, spec.k);
    let first = spec.w0.image(&u.pow(m as i64).pad_identity(m - k), tol.tol)?;
    let second = spec.w1.image(&u.pow(n as i64).pad_identity(n - k), tol.tol)?;
    crate::grid::star_concat(&first, &second, m, n, tol.glue_tol, tol.boundary_tol)
}

/// The image path of the elementary map of `seq`.
fn sequence_image(seq: &PathSequence, u: &AlgebraElement) -> Result<GridPath> {
    GridPath::from_fn(seq.resolution(), |i| Ok(ElementaryMap::eval_with(u, &seq.values_at_index(i))))
}

/// `Γ_s(u; t) = W(V(u; s + t − st); t)` on the grid of `W`.
pub fn gamma_shear_slice(composed: &ComposedMap, u: &AlgebraElement, s: f64) -> Result<GridPath> {
    let res = composed.outer().resolution();
    GridPath::from_fn(res, |i| {
        let t = i as f64 / res as f64;
        Ok(composed.eval_direct(u, s + t - s * t, t))
    })
}

/// Certifies the shear family from `γ` (at `s = 0`) to `W(u^m ⊕ 1)`.
///
/// Slices must keep the block form `V(u; s) ⊗ 1_n` at `t = 0` and the fixed
/// top edge `u^{mn} ⊕ 1` at `t = 1`.
pub fn gamma_shear_certificate(
    composed: &ComposedMap,
    u: &AlgebraElement,
    grid_s: usize,
    limits: &Limits,
) -> Result<StageReport> {
    let (m, n) = (composed.inner().degree(), composed.outer().degree());
    let top = u.pow((m * n) as i64).pad_identity(m * n - 1);
    let start = sequence_image(composed.product().sequence(), u)?;
    let end = composed.outer().image(&u.pow(m as i64).pad_identity(m - 1), f64::INFINITY)?;
    let (report, _, _) = run_stage(
        "shear",
        grid_s,
        |s| gamma_shear_slice(composed, u, s),
        |slice| {
            let (_, _, (bottom, _)) = dd_defects(slice, m, n)?;
            let edge = slice.last().distance(&top);
            Ok(SliceVerdict::valid(bottom.max(edge), limits.boundary))
        },
        Endpoints { start: Some(&start), end: Some(&end) },
        limits,
    )?;
    Ok(report)
}

/// Largest variation in `s` of the top edge `Γ_s(u; 1)`, read off the
/// sampled slices.
pub fn shear_top_edge_variation(composed: &ComposedMap, u: &AlgebraElement, grid_s: usize) -> Result<f64> {
    let grid_s = grid_s.max(1);
    let first = gamma_shear_slice(composed, u, 0.0)?.last().clone();
    let mut worst: f64 = 0.0;
    for k in 1..=grid_s {
        let slice = gamma_shear_slice(composed, u, k as f64 / grid_s as f64)?;
        worst = worst.max(slice.last().distance(&first));
    }
    Ok(worst)
}

fn dd_validator(m: usize, n: usize, limit: f64) -> impl FnMut(&GridPath) -> Result<SliceVerdict> {
    move |path: &GridPath| {
        let (_, _, (d0, d1)) = dd_defects(path, m, n)?;
        let mut verdict = SliceVerdict::valid(d0.max(d1), limit);
        if path.first().base().is_circle() {
            let windings =
                path.samples().iter().map(|x| k1_class(x).map(|c| c.winding())).collect::<Result<Vec<_>>>()?;
            verdict.windings = Some(windings);
        }
        Ok(verdict)
    }
}

/// Certified homotopy from `η(u)` to `u ⊗ 1_{mn}` for a basic map with
/// `k = 1`; `u` must lie in `U(A)` (amplification 1).
pub fn eta_iota_certificate(
    spec: &BasicMapSpec,
    u: &AlgebraElement,
    tol: &Tolerances,
    res: &Resolution,
) -> Result<HomotopyCertificate> {
    if spec.k != 1 || u.amp() != 1 {
        return Err(Error::InvalidArgument(format!(
            "the embedding homotopy needs k = 1 and u in U(A) (got k={}, amp={})",
            spec.k,
            u.amp()
        )));
    }
    spec.require_coprime()?;
    check_unitary(u, tol.tol)?;
    let limits = Limits::new(tol, res);
    let (m, n, grid) = (spec.m, spec.n, spec.resolution());
    let gamma0 = ComposedMap::new(ElementaryMap::standard(m, grid)?, spec.w0.clone())?;
    let gamma1 = ComposedMap::new(ElementaryMap::standard(n, grid)?, spec.w1.clone())?;
    let image0 = sequence_image(gamma0.product().sequence(), u)?;
    let image1 = sequence_image(gamma1.product().sequence(), u)?;

    let eta = spec.path(u)?;
    let mixed = star_join(&image0, &image1)?;
    let (shear, _, _) = run_stage(
        "shear",
        res.grid_s,
        |s| star_join(&gamma_shear_slice(&gamma0, u, 1.0 - s)?, &gamma_shear_slice(&gamma1, u, 1.0 - s)?),
        dd_validator(m, n, limits.boundary),
        Endpoints { start: Some(&eta), end: Some(&mixed) },
        &limits,
    )
    .map_err(|e| e.in_stage("shear"))?;

    let exchange_family =
        elementary_homotopy(gamma1.product().sequence(), gamma0.product().sequence(), tol.tol, tol.branch_margin)
            .map_err(|e| e.in_stage("exchange"))?;
    let doubled = star_join(&image0, &image0)?;
    let (exchange, _, _) = run_stage(
        "exchange",
        res.grid_s,
        |s| star_join(&image0, &sequence_image(&exchange_family.slice(s), u)?),
        dd_validator(m, n, limits.boundary),
        Endpoints { start: Some(&mixed), end: Some(&doubled) },
        &limits,
    )
    .map_err(|e| e.in_stage("exchange"))?;

    let embedded = GridPath::constant(&u.tensor_identity(m * n), grid);
    let product = gamma0.product().sequence();
    let (contract, _, _) = run_stage(
        "contract",
        res.grid_s,
        |s| {
            let half = GridPath::from_fn(grid, |i| {
                let t = (1.0 - s) * i as f64 / grid as f64;
                Ok(ElementaryMap::eval_with(u, &product.values_at(t)))
            })?;
            star_join(&half, &half)
        },
        dd_validator(m, n, limits.boundary),
        Endpoints { start: Some(&doubled), end: Some(&embedded) },
        &limits,
    )
    .map_err(|e| e.in_stage("contract"))?;

    Ok(HomotopyCertificate::new("eta-iota", alloc::vec![shear, exchange, contract]))
}

/// The flip of the two `M_k` legs of `M_k(M_k(A))` and a path from it to 1.
#[derive(Debug, Clone)]
pub struct FlipUntwist {
    k: usize,
    fiber: usize,
    swap: ComplexMatrix,
    legs: Vec<Geodesic>,
}

/// `S(e_f ⊗ e_e) = e_e ⊗ e_f` on `C^k ⊗ C^k`, index `f·k + e`.
fn swap_matrix(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k * k, |r, c| {
        let (f, e) = (r / k, r % k);
        if c == e * k + f {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Builds the flip for `M_k(M_k(A))` with base fibres of size `fiber`.
///
/// `S` has eigenvalue `−1` once `k ≥ 2`, so the direct geodesic to `1` is
/// retried through the waypoint `i·1`.
pub fn flip_untwist(k: usize, fiber: usize, branch_margin: f64) -> Result<FlipUntwist> {
    if k == 0 {
        return Err(Error::InvalidArgument("flip needs k ≥ 1".into()));
    }
    let swap = swap_matrix(k);
    let one = ComplexMatrix::identity(k * k);
    let legs = match Geodesic::new(&swap, &one, 1e-12, branch_margin) {
        Ok(g) => alloc::vec![g],
        Err(Error::BranchFailure { .. }) => {
            let waypoint = ComplexMatrix::scalar(k * k, C64::new(0.0, 1.0));
            alloc::vec![
                Geodesic::new(&swap, &waypoint, 1e-12, branch_margin)?,
                Geodesic::new(&waypoint, &one, 1e-12, branch_margin)?,
            ]
        }
        Err(e) => return Err(e),
    };
    Ok(FlipUntwist { k, fiber, swap, legs })
}

impl FlipUntwist {
    /// The swap on `C^k ⊗ C^k` alone.
    pub fn swap(&self) -> &ComplexMatrix {
        &self.swap
    }

    pub fn uses_waypoint(&self) -> bool {
        self.legs.len() > 1
    }

    /// The path from `S` (at 0) to `1` (at 1) on `C^k ⊗ C^k`.
    pub fn path_at(&self, tau: f64) -> ComplexMatrix {
        let legs = self.legs.len() as f64;
        let x = tau.clamp(0.0, 1.0) * legs;
        let leg = (libm::floor(x) as usize).min(self.legs.len() - 1);
        self.legs[leg].at(x - leg as f64)
    }

    /// The implementing unitary on `M_k(M_k(A))` fibres.
    pub fn unitary_at(&self, tau: f64) -> ComplexMatrix {
        ComplexMatrix::identity(self.fiber).tensor(&self.path_at(tau))
    }

    /// `ψ(x)` for `x ∈ M_k(B)`, `B = M_k(A)`.
    pub fn flip(&self, x: &AlgebraElement) -> AlgebraElement {
        self.conjugate(x, 0.0)
    }

    fn conjugate(&self, x: &AlgebraElement, tau: f64) -> AlgebraElement {
        let s = self.unitary_at(tau);
        x.map(x.amp(), |f| s.mul_ref(f).mul_ref(&s.adjoint()))
    }

    /// `Ψ_τ(v) = S_τ (v ⊕ 1_{k−1}) S_τ*` for `v ∈ U(B)` (amplification 1).
    pub fn psi_at(&self, v: &AlgebraElement, tau: f64) -> AlgebraElement {
        self.conjugate(&v.pad_identity(self.k - 1), tau)
    }
}

/// `(i_k, c, i_D) ↦ (c, i_k, i_D)`: reads `M_k(M_c(A))` as `M_c(M_k(A))`.
fn leg_permutation(k: usize, c: usize, d: usize) -> Vec<usize> {
    let mut perm = alloc::vec![0; k * c * d];
    for ik in 0..k {
        for ic in 0..c {
            for id in 0..d {
                perm[(ic * k + ik) * d + id] = (ik * c + ic) * d + id;
            }
        }
    }
    perm
}

/// Certificates for the two triangles of the `μ_k` diagram.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagramReport {
    pub upper: HomotopyCertificate,
    pub lower: HomotopyCertificate,
    pub pass: bool,
}

/// Certifies `η ∘ μ_k ≃ ι` at `u ∈ U(A)` and `μ_k ∘ η ≃ ι ⊗ id_k` at
/// `v ∈ U(M_k(A))`.
pub fn diagram_certificate(
    spec: &BasicMapSpec,
    u: &AlgebraElement,
    v: &AlgebraElement,
    tol: &Tolerances,
    res: &Resolution,
) -> Result<DiagramReport> {
    spec.require_coprime()?;
    let (k, m, n) = (spec.k, spec.m, spec.n);
    if u.amp() != 1 || v.amp() != k {
        return Err(Error::DimensionMismatch { expected: k, found: v.amp() });
    }
    let limits = Limits::new(tol, res);
    let simple = spec.with_k(1)?;

    let upper = {
        let composite = spec.path(&u.pad_identity(k - 1))?;
        let direct = simple.path(u)?;
        let identity = StageReport::check("basic-form", composite.distance(&direct), limits.endpoint);
        let mut stages = alloc::vec![identity];
        stages.extend(eta_iota_certificate(&simple, u, tol, res).map_err(|e| e.in_stage("upper"))?.stages);
        HomotopyCertificate::new("upper-triangle", stages)
    };

    let lower = {
        let base = v.base();
        let fiber = base.fiber_dim();
        let over_b: BaseAlgebra = base.amplified(k);
        let vb = v.rebase(over_b, 1)?;
        let flip = flip_untwist(k, fiber, tol.branch_margin)?;
        let perm = leg_permutation(k, m * n, fiber);
        let lifted = spec
            .path(v)?
            .map(|x| x.pad_identity((k - 1) * m * n))
            .samples()
            .iter()
            .map(|x| x.map(x.amp(), |f| f.permuted(&perm)).rebase(over_b, m * n))
            .collect::<Result<Vec<_>>>()?;
        let lifted = GridPath::new(lifted)?;
        let flipped = spec.path(&flip.psi_at(&vb, 0.0))?;
        let identification = StageReport::check("identification", lifted.distance(&flipped), limits.endpoint);
        let untwisted = simple.path(&vb)?;
        let (untwist, _, _) = run_stage(
            "untwist",
            res.grid_s,
            |tau| spec.path(&flip.psi_at(&vb, tau)),
            dd_validator(m, n, limits.boundary),
            Endpoints { start: Some(&lifted), end: Some(&untwisted) },
            &limits,
        )
        .map_err(|e| e.in_stage("lower"))?;
        let mut stages = alloc::vec![identification, untwist];
        stages.extend(eta_iota_certificate(&simple, &vb, tol, res).map_err(|e| e.in_stage("lower"))?.stages);
        HomotopyCertificate::new("lower-triangle", stages)
    };

    let pass = upper.pass && lower.pass;
    Ok(DiagramReport { upper, lower, pass })
}
