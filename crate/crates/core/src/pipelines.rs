//! Unitary equivalence and intertwiners of amplified projections over
//! `A ⊗ Z_{m,n}`, assembled from the corner machinery in [`crate::ktheory`].
//!
//! Integer data (classes, Bézout coefficients) are compared exactly; every
//! matrix identity is measured fibrewise in Frobenius norm.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::algebra::{AlgebraElement, BaseAlgebra};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::grid::{dd_check, DimensionDropElement, GridPath};
use crate::ktheory::{
    bezout, connect_in_corners, connect_in_u0, continuous_frame, frame_isometry, k1_class, rank_fullness,
};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C64};
use crate::random::random_unitary;

/// A partial isometry together with its source and range projections.
#[derive(Debug, Clone)]
pub struct PartialIsometry {
    carrier: AlgebraElement,
    source: AlgebraElement,
    range: AlgebraElement,
}

impl PartialIsometry {
    pub fn new(v: AlgebraElement, tol: f64) -> Result<Self> {
        let source = v.adjoint().mul(&v)?;
        let range = v.mul(&v.adjoint())?;
        let defect = v.mul(&source)?.distance(&v);
        if defect > tol {
            return Err(Error::PreconditionViolation { condition: "v v* v = v", defect });
        }
        Ok(PartialIsometry { carrier: v, source, range })
    }

    pub fn carrier(&self) -> &AlgebraElement {
        &self.carrier
    }

    /// `v* v`.
    pub fn source(&self) -> &AlgebraElement {
        &self.source
    }

    /// `v v*`.
    pub fn range(&self) -> &AlgebraElement {
        &self.range
    }
}

fn complement_of(p: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::identity(p.base(), p.amp()).sub(p).expect("shapes agree")
}

fn require_full(p: &AlgebraElement, name: &'static str, tol: f64) -> Result<()> {
    if rank_fullness(p, tol)?.full {
        Ok(())
    } else {
        Err(Error::NotFull(name))
    }
}

fn require_unitary(u: &AlgebraElement, tol: f64) -> Result<()> {
    let defect = u.unitarity_defect();
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Largest fibrewise `‖x* a x − b‖`.
fn conjugation_defect(x: &AlgebraElement, a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    x.fibers()
        .iter()
        .zip(a.fibers().iter().zip(b.fibers()))
        .map(|(x, (a, b))| x.adjoint_mul(&a.mul_ref(x)).distance(b))
        .fold(0.0, f64::max)
}

/// `G ⊗ 1_copies` of a constant matrix as an element over `base`.
fn constant(base: BaseAlgebra, m: &ComplexMatrix) -> Result<AlgebraElement> {
    AlgebraElement::constant(base, m.dim() / base.fiber_dim(), m)
}

/// Whether the corrector powers are applied before connecting corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Correction {
    Enabled,
    Disabled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjugationReport {
    pub correction: Correction,
    /// Classes of the two corners of `(u1 ⊗ 1_m)*(u0 ⊗ 1_n)`.
    pub corner_classes: [i64; 2],
    /// Classes after the corrector powers have been applied.
    pub corrected_classes: [i64; 2],
    pub bezout: [i64; 2],
    /// Largest `‖U_t*(q ⊗ 1)U_t − p ⊗ 1‖`; absent when no path exists.
    pub conjugation_defect: Option<f64>,
    pub endpoint_defect: Option<f64>,
    pub boundary_defect: Option<f64>,
    pub unitarity_defect: Option<f64>,
    pub max_step_jump: Option<f64>,
    /// Why no path was produced.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub failure: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Conjugation {
    pub report: ConjugationReport,
    /// The unitary `U` with `U*(q ⊗ 1)U = p ⊗ 1`, when the corner classes allow one.
    pub element: Option<DimensionDropElement>,
}

/// Builds `U ∈ A ⊗ Z_{m,n}` with `U*(q ⊗ 1)U = p ⊗ 1` from unitaries `u0`,
/// `u1` with `u0*(q ⊗ 1_m)u0 = p ⊗ 1_m` and `u1*(q ⊗ 1_n)u1 = p ⊗ 1_n`.
///
/// The corner classes of `V = (u1 ⊗ 1_m)*(u0 ⊗ 1_n)` are cancelled by a
/// corrector `w` with `[w_p] = −[V_p]`: with `j·m + k·n = 1`, `u0` absorbs
/// `w^k` and `u1` absorbs `w^{−j}`. With the correction disabled a nonzero
/// class is reported and no element is produced.
#[allow(clippy::too_many_arguments)]
pub fn lemma34_pipeline(
    p: &AlgebraElement,
    q: &AlgebraElement,
    u0: &AlgebraElement,
    u1: &AlgebraElement,
    m: usize,
    n: usize,
    correction: Correction,
    tol: &Tolerances,
    resolution: usize,
) -> Result<Conjugation> {
    let (j, k) = bezout(m as i64, n as i64)?;
    let amp = p.amp();
    if q.amp() != amp {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: q.dim() });
    }
    for (u, copies) in [(u0, m), (u1, n)] {
        if u.amp() != amp * copies || u.base() != p.base() {
            return Err(Error::DimensionMismatch { expected: p.dim() * copies, found: u.dim() });
        }
        require_unitary(u, tol.tol)?;
    }
    require_full(p, "p", tol.tol)?;
    require_full(q, "q", tol.tol)?;
    for (u, copies) in [(u0, m), (u1, n)] {
        let defect = conjugation_defect(u, &q.tensor_identity(copies), &p.tensor_identity(copies));
        if defect > tol.tol {
            return Err(Error::PreconditionViolation { condition: "u* (q ⊗ 1) u = p ⊗ 1", defect });
        }
    }

    let big = p.tensor_identity(m * n);
    let target = q.tensor_identity(m * n);
    let frame = continuous_frame(&big, tol.tol).map_err(|e| e.in_stage("frame"))?;
    let relative = |a: &AlgebraElement, b: &AlgebraElement| {
        a.tensor_identity(m).adjoint().mul(&b.tensor_identity(n)).expect("shapes agree")
    };
    let classes = |x: &AlgebraElement| -> Result<[i64; 2]> {
        let (a, b) = frame.corner_classes(x, tol.glue_tol.max(tol.tol))?;
        Ok([a.winding(), b.winding()])
    };
    let corner_classes = classes(&relative(u1, u0)).map_err(|e| e.in_stage("corner classes"))?;

    let (v0, v1) = match correction {
        Correction::Enabled => {
            let w = continuous_frame(p, tol.tol)
                .map_err(|e| e.in_stage("corrector"))?
                .corrector(-corner_classes[0], -corner_classes[1]);
            (u0.mul(&w.pow(k).pad_identity(amp * (m - 1)))?, u1.mul(&w.pow(-j).pad_identity(amp * (n - 1)))?)
        }
        Correction::Disabled => (u0.clone(), u1.clone()),
    };
    let corrected = relative(&v1, &v0);
    let corrected_classes = classes(&corrected).map_err(|e| e.in_stage("corrected classes"))?;

    let mut report = ConjugationReport {
        correction,
        corner_classes,
        corrected_classes,
        bezout: [j, k],
        conjugation_defect: None,
        endpoint_defect: None,
        boundary_defect: None,
        unitarity_defect: None,
        max_step_jump: None,
        failure: None,
        pass: false,
    };
    let path = match connect_in_corners(&corrected, &frame, resolution, tol.tol) {
        Ok(path) => path,
        Err(e @ Error::ClassMismatch { .. }) => {
            report.failure = Some(e.to_string());
            return Ok(Conjugation { report, element: None });
        }
        Err(e) => return Err(e.in_stage("corner path")),
    };
    let left = v1.tensor_identity(m);
    let u = GridPath::new(path.samples().iter().map(|x| left.mul(x)).collect::<Result<Vec<_>>>()?)?;

    let conj = u.samples().iter().map(|x| conjugation_defect(x, &target, &big)).fold(0.0, f64::max);
    let endpoint = u.first().distance(&v0.tensor_identity(n)).max(u.last().distance(&v1.tensor_identity(m)));
    let unitarity = u.max_unitarity_defect();
    let step = u.max_step_jump();
    let element = dd_check(u, m, n, tol.boundary_tol).map_err(|e| e.in_stage("boundary"))?;
    report.conjugation_defect = Some(conj);
    report.endpoint_defect = Some(endpoint);
    report.boundary_defect = Some(element.boundary_defect());
    report.unitarity_defect = Some(unitarity);
    report.max_step_jump = Some(step);
    report.pass = corrected_classes == [0, 0] && conj <= tol.tol && endpoint <= tol.tol && unitarity <= tol.tol;
    Ok(Conjugation { report, element: Some(element) })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplementReport {
    /// Class of `v + w`.
    pub class_before: i64,
    /// Class of `v + v⊥`.
    pub class_after: i64,
    pub unitarity_defect: f64,
    /// Largest of `‖v⊥* v⊥ − (1 − p)‖` and `‖v⊥ v⊥* − (1 − q)‖`.
    pub complement_defect: f64,
    pub path_unitarity_defect: f64,
    pub endpoint_defect: f64,
    pub max_step_jump: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Complement {
    pub v_perp: AlgebraElement,
    /// `v + v⊥`.
    pub unitary: AlgebraElement,
    /// From `v + v⊥` to `1`.
    pub path: GridPath,
    pub report: ComplementReport,
}

/// `v⊥ = ũ w` where `ũ` twists one line of `1 − q` by `z^{−[v+w]}`.
fn complement_parts(v: &PartialIsometry, w: &AlgebraElement, tol: f64) -> Result<(AlgebraElement, i64, f64)> {
    let (off_p, off_q) = (complement_of(v.source()), complement_of(v.range()));
    let ws = PartialIsometry::new(w.clone(), tol)?;
    let defect = ws.source().distance(&off_p).max(ws.range().distance(&off_q));
    if defect > tol {
        return Err(Error::PreconditionViolation { condition: "w* w = 1 − p, w w* = 1 − q", defect });
    }
    require_full(&off_p, "1 − p", tol)?;
    require_full(&off_q, "1 − q", tol)?;
    let before = k1_class(&v.carrier().add(w)?)?.winding();
    let twist = continuous_frame(ws.range(), tol).map_err(|e| e.in_stage("complement line"))?.corrector(-before, 0);
    let v_perp = twist.mul(w)?;
    let check = PartialIsometry::new(v_perp.clone(), tol)?;
    let complement_defect = check.source().distance(&off_p).max(check.range().distance(&off_q));
    Ok((v_perp, before, complement_defect))
}

/// Completes the partial isometry `v` to a unitary `v + v⊥` in `U_0(A)`,
/// given any `w` with `w*w = 1 − v*v` and `ww* = 1 − vv*`.
pub fn corollary36_complement(
    v: &PartialIsometry,
    w: &AlgebraElement,
    tol: &Tolerances,
    resolution: usize,
) -> Result<Complement> {
    let (v_perp, class_before, complement_defect) = complement_parts(v, w, tol.tol)?;
    let unitary = v.carrier().add(&v_perp)?;
    let unitarity_defect = unitary.unitarity_defect();
    let class_after = k1_class(&unitary)?.winding();
    let one = AlgebraElement::identity(unitary.base(), unitary.amp());
    let path = connect_in_u0(&unitary, &one, resolution, tol.tol).map_err(|e| e.in_stage("contraction"))?;
    let endpoint_defect = path.first().distance(&unitary).max(path.last().distance(&one));
    let path_unitarity_defect = path.max_unitarity_defect();
    let max_step_jump = path.max_step_jump();
    let pass = class_after == 0
        && unitarity_defect <= tol.tol
        && complement_defect <= tol.tol
        && path_unitarity_defect <= tol.tol
        && endpoint_defect <= tol.tol;
    let report = ComplementReport {
        class_before,
        class_after,
        unitarity_defect,
        complement_defect,
        path_unitarity_defect,
        endpoint_defect,
        max_step_jump,
        pass,
    };
    Ok(Complement { v_perp, unitary, path, report })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntertwinerReport {
    pub bezout: [i64; 2],
    /// Class of `W + w' + (1 − q ⊗ 1)` before the complement twist.
    pub class_before: i64,
    /// Largest `‖V_t* V_t − p ⊗ 1‖`.
    pub isometry_defect: f64,
    /// Smallest eigenvalue of `q ⊗ 1 − V_t V_t*` over all samples.
    pub positivity_margin: f64,
    pub endpoint_defect: f64,
    pub boundary_defect: f64,
    pub max_step_jump: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub element: DimensionDropElement,
    pub report: IntertwinerReport,
}

/// A path `V` in `M_{mn}(A)` from `v0 ⊗ 1_n` to `v1 ⊗ 1_m` with
/// `V*V = p ⊗ 1` and `VV* ≤ q ⊗ 1`, given `v0*v0 = p ⊗ 1_m`,
/// `v0 v0* ≤ q ⊗ 1_m` and the same for `v1` with `n`.
///
/// `W = (v1 ⊗ 1_m)(v0 ⊗ 1_n)*` is completed inside the corner of `q ⊗ 1`
/// to a unitary `U` with trivial class, and `V_t = U_t (v0 ⊗ 1_n)` along a
/// path `U_t` from `1` to `U` that commutes with `q ⊗ 1`.
#[allow(clippy::too_many_arguments)]
pub fn theorem39_intertwiner(
    p: &AlgebraElement,
    q: &AlgebraElement,
    v0: &AlgebraElement,
    v1: &AlgebraElement,
    m: usize,
    n: usize,
    tol: &Tolerances,
    resolution: usize,
) -> Result<Intertwiner> {
    let (j, k) = bezout(m as i64, n as i64)?;
    require_full(q, "q", tol.tol)?;
    for (v, copies) in [(v0, m), (v1, n)] {
        if v.amp() != p.amp() * copies || q.amp() != p.amp() {
            return Err(Error::DimensionMismatch { expected: p.dim() * copies, found: v.dim() });
        }
        let source = v.adjoint().mul(v)?.distance(&p.tensor_identity(copies));
        let range = q.tensor_identity(copies).mul(v)?.distance(v);
        let defect = source.max(range);
        if defect > tol.tol {
            return Err(Error::PreconditionViolation { condition: "v* v = p ⊗ 1, v v* ≤ q ⊗ 1", defect });
        }
    }

    let (a0, a1) = (v0.tensor_identity(n), v1.tensor_identity(m));
    let big_p = p.tensor_identity(m * n);
    let big_q = q.tensor_identity(m * n);
    let w = a1.mul(&a0.adjoint())?;
    let defect_source = big_q.sub(&w.adjoint().mul(&w)?)?;
    let defect_range = big_q.sub(&w.mul(&w.adjoint())?)?;
    let bridge = frame_isometry(
        &continuous_frame(&defect_source, tol.tol).map_err(|e| e.in_stage("defect frames"))?,
        &continuous_frame(&defect_range, tol.tol).map_err(|e| e.in_stage("defect frames"))?,
    )?;
    let outside = complement_of(&big_q);
    let carrier = PartialIsometry::new(w.add(&outside)?, tol.tol)?;
    let (v_perp, class_before, _) =
        complement_parts(&carrier, &bridge, tol.tol).map_err(|e| e.in_stage("complement"))?;
    let u = carrier.carrier().add(&v_perp)?;
    let frame = continuous_frame(&big_q, tol.tol)?;
    let contraction = connect_in_corners(&u, &frame, resolution, tol.tol).map_err(|e| e.in_stage("corner path"))?;
    let steps = contraction.resolution();
    let v = GridPath::from_fn(steps, |i| contraction.sample(steps - i).mul(&a0))?;

    let mut isometry_defect: f64 = 0.0;
    let mut positivity_margin = f64::INFINITY;
    for x in v.samples() {
        isometry_defect = isometry_defect.max(x.adjoint().mul(x)?.distance(&big_p));
        let gap = big_q.sub(&x.mul(&x.adjoint())?)?;
        for f in gap.fibers() {
            let e = hermitian_eigen(f);
            positivity_margin = positivity_margin.min(e.values.first().copied().unwrap_or(0.0));
        }
    }
    let endpoint_defect = v.first().distance(&a0).max(v.last().distance(&a1));
    let max_step_jump = v.max_step_jump();
    let element = dd_check(v, m, n, tol.boundary_tol).map_err(|e| e.in_stage("boundary"))?;
    let pass = isometry_defect <= tol.tol && positivity_margin >= -tol.tol && endpoint_defect <= tol.tol;
    let report = IntertwinerReport {
        bezout: [j, k],
        class_before,
        isometry_defect,
        positivity_margin,
        endpoint_defect,
        boundary_defect: element.boundary_defect(),
        max_step_jump,
        pass,
    };
    Ok(Intertwiner { element, report })
}

fn require_dim(base: BaseAlgebra, dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_multiple_of(base.fiber_dim()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "dimension {dim} is not a positive multiple of the fibre size {}",
            base.fiber_dim()
        )));
    }
    Ok(())
}

/// `diag(1_rank, 0)` of size `dim`.
pub fn diagonal_projection(dim: usize, rank: usize) -> ComplexMatrix {
    let values: Vec<C64> = (0..dim).map(|i| C64::new(if i < rank { 1.0 } else { 0.0 }, 0.0)).collect();
    ComplexMatrix::diag(&values)
}

/// A random constant unitary on `C^dim` that commutes with the diagonal
/// projection onto the coordinates in `range`.
fn random_block_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize, range: &[usize]) -> ComplexMatrix {
    let outside: Vec<usize> = (0..dim).filter(|i| !range.contains(i)).collect();
    let mut u = ComplexMatrix::zeros(dim);
    for slots in [range, &outside[..]] {
        let block = random_unitary(rng, slots.len());
        for (a, &i) in slots.iter().enumerate() {
            for (b, &j) in slots.iter().enumerate() {
                u[(i, j)] = block[(a, b)];
            }
        }
    }
    u
}

/// Inputs of [`lemma34_pipeline`] with a prescribed corner class.
#[derive(Debug, Clone)]
pub struct Lemma34Fixture {
    pub p: AlgebraElement,
    pub q: AlgebraElement,
    pub u0: AlgebraElement,
    pub u1: AlgebraElement,
    pub m: usize,
    pub n: usize,
}

/// `p = diag(1_rank, 0)` in `M_dim` over `base` (so `dim` must be a multiple
/// of the fibre size), `q = g p g*` for a random constant `g`, and
/// unitaries whose relative unitary has `p`-corner class `winding`.
///
/// The winding is split as `k·c` in `u0` and `−j·c` in `u1` (with
/// `j·m + k·n = 1`), so that `n·k·c + m·j·c = c`.
pub fn lemma34_fixture<R: Rng + ?Sized>(
    rng: &mut R,
    base: BaseAlgebra,
    d: usize,
    rank: usize,
    winding: i64,
    m: usize,
    n: usize,
) -> Result<Lemma34Fixture> {
    let (j, k) = bezout(m as i64, n as i64)?;
    require_dim(base, d)?;
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(alloc::format!("rank {rank} must lie in 1..={d}")));
    }
    let pm = diagonal_projection(d, rank);
    let g = random_unitary(rng, d);
    let p = constant(base, &pm)?;
    let q = constant(base, &g.mul_ref(&pm).mul_ref(&g.adjoint()))?;
    let mut leg = |copies: usize, power: i64| -> Result<AlgebraElement> {
        let dim = d * copies;
        let range: Vec<usize> = (0..copies).flat_map(|b| (0..rank).map(move |i| b * d + i)).collect();
        let mixer = random_block_unitary(rng, dim, &range);
        let twist = AlgebraElement::from_fn(base, dim / base.fiber_dim(), |z| {
            let mut t = ComplexMatrix::identity(dim);
            if base.is_circle() {
                t[(0, 0)] = z.powi(power as i32);
            }
            t
        })?;
        let frame = constant(base, &g.amplify(copies))?;
        frame.mul(&twist)?.mul(&constant(base, &mixer)?)
    };
    let u0 = leg(m, k * winding)?;
    let u1 = leg(n, -j * winding)?;
    Ok(Lemma34Fixture { p, q, u0, u1, m, n })
}

/// A partial isometry `v` from `p` to `q = g p g*` whose extension by
/// `w = g(1 − p)` has class `winding`, together with that `w`.
pub fn corollary36_fixture<R: Rng + ?Sized>(
    rng: &mut R,
    base: BaseAlgebra,
    d: usize,
    rank: usize,
    winding: i64,
    tol: f64,
) -> Result<(PartialIsometry, AlgebraElement)> {
    require_dim(base, d)?;
    if rank > d {
        return Err(Error::InvalidArgument(alloc::format!("rank {rank} exceeds {d}")));
    }
    let pm = diagonal_projection(d, rank);
    let g = random_unitary(rng, d);
    let inner = random_block_unitary(rng, d, &(0..rank).collect::<Vec<_>>());
    let v = AlgebraElement::from_fn(base, d / base.fiber_dim(), |z| {
        let mut t = ComplexMatrix::identity(d);
        if base.is_circle() && rank > 0 {
            t[(0, 0)] = z.powi(winding as i32);
        }
        g.mul_ref(&t).mul_ref(&inner).mul_ref(&pm)
    })?;
    let w = constant(base, &g.mul_ref(&(&ComplexMatrix::identity(d) - &pm)))?;
    Ok((PartialIsometry::new(v, tol)?, w))
}

/// Inputs of [`theorem39_intertwiner`].
#[derive(Debug, Clone)]
pub struct Theorem39Fixture {
    pub p: AlgebraElement,
    pub q: AlgebraElement,
    pub v0: AlgebraElement,
    pub v1: AlgebraElement,
    pub m: usize,
    pub n: usize,
}

/// `p = diag(1_{p_rank}, 0) ≤ q = diag(1_{q_rank}, 0)` and `v_i = R_i (p ⊗ 1)`
/// for random constant unitaries `R_i` commuting with `q ⊗ 1`.
pub fn theorem39_fixture<R: Rng + ?Sized>(
    rng: &mut R,
    base: BaseAlgebra,
    d: usize,
    p_rank: usize,
    q_rank: usize,
    m: usize,
    n: usize,
) -> Result<Theorem39Fixture> {
    require_dim(base, d)?;
    if p_rank > q_rank || q_rank > d {
        return Err(Error::InvalidArgument(alloc::format!("ranks need {p_rank} ≤ {q_rank} ≤ {d}")));
    }
    let (pm, qm) = (diagonal_projection(d, p_rank), diagonal_projection(d, q_rank));
    let mut leg = |copies: usize| -> Result<AlgebraElement> {
        let dim = d * copies;
        let range: Vec<usize> = (0..copies).flat_map(|b| (0..q_rank).map(move |i| b * d + i)).collect();
        let r = random_block_unitary(rng, dim, &range);
        constant(base, &r.mul_ref(&pm.amplify(copies)))
    };
    let v0 = leg(m)?;
    let v1 = leg(n)?;
    Ok(Theorem39Fixture { p: constant(base, &pm)?, q: constant(base, &qm)?, v0, v1, m, n })
}
