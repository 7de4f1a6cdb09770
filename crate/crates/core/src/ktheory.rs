//! K-theory data of the supported bases and paths in the identity component.
//!
//! Over the circle `K_1` is the winding number of the determinant and `K_0`
//! the fibrewise rank; point and matrix bases have trivial `K_1`. Corners
//! `pAp` are handled through a continuous unitary frame `Y` whose leading
//! columns span the range of `p`, so that `Y* x Y` is block diagonal for every
//! `x` commuting with `p`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, TAU};

use crate::algebra::{AlgebraElement, BaseAlgebra};
use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::homotopy::{refine, unwrap_logs, LoopFold};
use crate::linalg::unitary::spectral_log_closed;
use crate::linalg::{hermitian_eigen, ComplexMatrix, SpectralLog, C64};

/// Largest admissible principal increment of the determinant phase.
pub const NYQUIST_LIMIT: f64 = 3.0 * FRAC_PI_4;

/// Winding number of `det` along a cyclic sequence of unitaries.
pub fn det_winding(samples: &[ComplexMatrix]) -> Result<i64> {
    let dets: Vec<C64> = samples.iter().map(ComplexMatrix::determinant).collect();
    if let Some(index) = dets.iter().position(|d| d.norm() < 1e-12) {
        return Err(Error::DegenerateDeterminant { index });
    }
    let mut total = 0.0;
    let mut max_jump: f64 = 0.0;
    for (g, d) in dets.iter().enumerate() {
        let next = dets[(g + 1) % dets.len()];
        let step = (next / d).arg();
        max_jump = max_jump.max(step.abs());
        total += step;
    }
    if max_jump > NYQUIST_LIMIT {
        return Err(Error::NyquistViolation { max_jump });
    }
    Ok(libm::round(total / TAU) as i64)
}

/// `K_1` class: one winding for circle bases, none otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct K1Class {
    pub windings: Vec<i64>,
}

impl K1Class {
    pub fn is_zero(&self) -> bool {
        self.windings.iter().all(|&w| w == 0)
    }

    /// The single winding of a circle class, 0 for trivial groups.
    pub fn winding(&self) -> i64 {
        self.windings.first().copied().unwrap_or(0)
    }
}

impl core::ops::Add for &K1Class {
    type Output = K1Class;

    fn add(self, rhs: &K1Class) -> K1Class {
        let len = self.windings.len().max(rhs.windings.len());
        let at = |c: &K1Class, i: usize| c.windings.get(i).copied().unwrap_or(0);
        K1Class { windings: (0..len).map(|i| at(self, i) + at(rhs, i)).collect() }
    }
}

impl core::ops::Neg for &K1Class {
    type Output = K1Class;

    fn neg(self) -> K1Class {
        K1Class { windings: self.windings.iter().map(|w| -w).collect() }
    }
}

pub fn k1_class(u: &AlgebraElement) -> Result<K1Class> {
    if u.base().is_circle() {
        Ok(K1Class { windings: alloc::vec![det_winding(u.fibers())?] })
    } else {
        Ok(K1Class::default())
    }
}

/// `diag(z^c, 1, …, 1)` in `M_amp(A)`; the identity off the circle.
pub fn k1_representative(base: BaseAlgebra, class: &K1Class, amp: usize) -> Result<AlgebraElement> {
    let c = class.winding();
    let dim = amp * base.fiber_dim();
    AlgebraElement::from_fn(base, amp, |z| {
        let mut m = ComplexMatrix::identity(dim);
        if base.is_circle() && dim > 0 {
            m[(0, 0)] = z.powi(c as i32);
        }
        m
    })
}

/// `K_0` data of a projection: constant fibre rank and fullness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct K0Data {
    pub rank: usize,
    pub full: bool,
}

pub fn rank_fullness(p: &AlgebraElement, tol: f64) -> Result<K0Data> {
    let defect = p.fibers().iter().map(projection_defect).fold(0.0, f64::max);
    if defect > tol {
        return Err(Error::PreconditionViolation { condition: "projection", defect });
    }
    let ranks: Vec<usize> = p.fibers().iter().map(crate::linalg::projection_rank).collect();
    let min = ranks.iter().copied().min().unwrap_or(0);
    let max = ranks.iter().copied().max().unwrap_or(0);
    if min != max {
        return Err(Error::RankJump { min, max });
    }
    Ok(K0Data { rank: min, full: min >= 1 })
}

fn projection_defect(p: &ComplexMatrix) -> f64 {
    p.distance(&p.adjoint()).max(p.mul_ref(p).distance(p))
}

/// Integers `(j, k)` with `j·m + k·n = 1` and `|j|` as small as possible
/// (ties go to positive `j`).
pub fn bezout(m: i64, n: i64) -> Result<(i64, i64)> {
    let (mut r0, mut r1) = (m, n);
    let (mut s0, mut s1) = (1_i64, 0_i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0.abs() != 1 {
        return Err(Error::NotCoprime { m, n });
    }
    let (mut j, period) = (s0 * r0, (n / r0).abs());
    if period > 0 {
        j = j.rem_euclid(period);
        if j > period - j {
            j -= period;
        }
    }
    Ok((j, (1 - j * m) / n))
}

/// `p x p` with matching shapes.
pub fn corner_compress(x: &AlgebraElement, p: &AlgebraElement) -> Result<AlgebraElement> {
    p.mul(x)?.mul(p)
}

/// Class of a corner unitary, extended by the identity on the complement.
pub fn corner_k1(vp: &AlgebraElement, p: &AlgebraElement, tol: f64) -> Result<K1Class> {
    let lhs = vp.adjoint().mul(vp)?;
    let rhs = vp.mul(&vp.adjoint())?;
    let defect = lhs.distance(p).max(rhs.distance(p));
    if defect > tol {
        return Err(Error::NotCornerUnitary { defect });
    }
    let complement = AlgebraElement::identity(p.base(), p.amp()).sub(p)?;
    k1_class(&vp.add(&complement)?)
}

/// Continuous unitary frame adapted to a projection: at every fibre the
/// first `rank` columns span the range, the rest span the kernel.
#[derive(Debug, Clone)]
pub struct Frame {
    base: BaseAlgebra,
    amp: usize,
    rank: usize,
    fibers: Vec<ComplexMatrix>,
}

/// Smallest singular value accepted when aligning adjacent eigenbases.
const ALIGNMENT_FLOOR: f64 = 0.5;

fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() == 0 {
        return Ok(m.clone());
    }
    let e = hermitian_eigen(&m.adjoint_mul(m));
    let smallest = libm::sqrt(e.values[0].max(0.0));
    if smallest < ALIGNMENT_FLOOR {
        return Err(Error::SubprojectionFailure(format!("adjacent fibres are too far apart (overlap {smallest:.3})")));
    }
    let inv_sqrt: Vec<C64> = e.values.iter().map(|&l| C64::new(1.0 / libm::sqrt(l), 0.0)).collect();
    Ok(m.mul_ref(&crate::linalg::reconstruct(&e.vectors, &inv_sqrt)))
}

fn block_polar(m: &ComplexMatrix, rank: usize) -> Result<ComplexMatrix> {
    let d = m.dim();
    Ok(polar_unitary(&m.block(0, 0, rank))?.direct_sum(&polar_unitary(&m.block(rank, rank, d - rank))?))
}

fn block_log(h: &ComplexMatrix, rank: usize) -> SpectralLog {
    let d = h.dim();
    let a = spectral_log_closed(&h.block(0, 0, rank));
    let b = spectral_log_closed(&h.block(rank, rank, d - rank));
    let mut phases = a.phases;
    phases.extend(b.phases);
    SpectralLog { vectors: a.vectors.direct_sum(&b.vectors), phases }
}

fn adapted_eigenbasis(p: &ComplexMatrix) -> (ComplexMatrix, usize) {
    let e = hermitian_eigen(p);
    let d = p.dim();
    let mut order: Vec<usize> = (0..d).filter(|&k| e.values[k] > 0.5).collect();
    let rank = order.len();
    order.extend((0..d).filter(|&k| e.values[k] <= 0.5));
    let mut basis = ComplexMatrix::zeros(d);
    for (slot, &k) in order.iter().enumerate() {
        basis.set_column(slot, &e.vectors.column(k));
    }
    (basis, rank)
}

/// Builds a frame whose columns vary continuously around the circle.
///
/// Adjacent eigenbases are aligned by the unitary polar factor of their
/// overlap; the remaining holonomy is spread evenly over the loop.
pub fn continuous_frame(p: &AlgebraElement, tol: f64) -> Result<Frame> {
    let data = rank_fullness(p, tol)?;
    let rank = data.rank;
    let count = p.fibers().len();
    let mut fibers: Vec<ComplexMatrix> = Vec::with_capacity(count);
    for (g, fiber) in p.fibers().iter().enumerate() {
        let (basis, _) = adapted_eigenbasis(fiber);
        if g == 0 {
            fibers.push(basis);
            continue;
        }
        let overlap = basis.adjoint_mul(&fibers[g - 1]);
        fibers.push(basis.mul_ref(&block_polar(&overlap, rank)?));
    }
    if p.base().is_circle() {
        let (basis, _) = adapted_eigenbasis(p.fiber(0));
        let wrapped = basis.mul_ref(&block_polar(&basis.adjoint_mul(&fibers[count - 1]), rank)?);
        let holonomy = block_log(&fibers[0].adjoint_mul(&wrapped), rank);
        for (g, y) in fibers.iter_mut().enumerate().skip(1) {
            *y = y.mul_ref(&holonomy.exp_scaled(-(g as f64) / count as f64));
        }
    }
    Ok(Frame { base: p.base(), amp: p.amp(), rank, fibers })
}

fn plain_base(base: BaseAlgebra) -> BaseAlgebra {
    match base {
        BaseAlgebra::CircleLoops(_, g) => BaseAlgebra::CircleLoops(1, g),
        _ => BaseAlgebra::Scalars,
    }
}

impl Frame {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.fibers.first().map_or(0, ComplexMatrix::dim)
    }

    pub fn fibers(&self) -> &[ComplexMatrix] {
        &self.fibers
    }

    /// The projection the frame is adapted to.
    pub fn projection(&self) -> AlgebraElement {
        let d = self.dim();
        let mask: Vec<C64> = (0..d).map(|k| C64::new(if k < self.rank { 1.0 } else { 0.0 }, 0.0)).collect();
        self.assemble_diag(&mask)
    }

    fn assemble_diag(&self, values: &[C64]) -> AlgebraElement {
        let fibers = self.fibers.iter().map(|y| crate::linalg::reconstruct(y, values)).collect();
        AlgebraElement::from_parts(self.base, self.amp, fibers)
    }

    /// The rank-one projection onto frame column `k`.
    pub fn line(&self, k: usize) -> AlgebraElement {
        let d = self.dim();
        let mask: Vec<C64> = (0..d).map(|l| C64::new(if l == k { 1.0 } else { 0.0 }, 0.0)).collect();
        self.assemble_diag(&mask)
    }

    /// `1 + (z^a − 1)·P₁ + (z^b − 1)·Q₁` with lines `P₁ ≤ p` and `Q₁ ≤ 1 − p`.
    ///
    /// Its two corners are unitaries of classes `a` and `b`.
    pub fn corrector(&self, range_class: i64, kernel_class: i64) -> AlgebraElement {
        let d = self.dim();
        let fibers = self
            .fibers
            .iter()
            .enumerate()
            .map(|(g, y)| {
                let z = self.base.point(g);
                let mut vals = alloc::vec![C64::new(1.0, 0.0); d];
                if self.rank > 0 && range_class != 0 {
                    vals[0] = z.powi(range_class as i32);
                }
                if self.rank < d && kernel_class != 0 {
                    vals[self.rank] = z.powi(kernel_class as i32);
                }
                crate::linalg::reconstruct(y, &vals)
            })
            .collect();
        AlgebraElement::from_parts(self.base, self.amp, fibers)
    }

    /// The two diagonal blocks of `Y* x Y`, after checking that `x`
    /// commutes with the projection.
    pub fn corner_blocks(&self, x: &AlgebraElement, tol: f64) -> Result<(AlgebraElement, AlgebraElement)> {
        let d = self.dim();
        if x.dim() != d || x.fibers().len() != self.fibers.len() {
            return Err(Error::DimensionMismatch { expected: d, found: x.dim() });
        }
        let r = self.rank;
        let mut range = Vec::with_capacity(self.fibers.len());
        let mut kernel = Vec::with_capacity(self.fibers.len());
        let mut leak: f64 = 0.0;
        for (y, f) in self.fibers.iter().zip(x.fibers()) {
            let c = y.adjoint_mul(f).mul_ref(y);
            let mut off = 0.0;
            for i in 0..r {
                for j in r..d {
                    off += c[(i, j)].norm_sqr() + c[(j, i)].norm_sqr();
                }
            }
            leak = leak.max(libm::sqrt(off));
            range.push(c.block(0, 0, r));
            kernel.push(c.block(r, r, d - r));
        }
        if leak > tol {
            return Err(Error::PreconditionViolation { condition: "commutes with the frame projection", defect: leak });
        }
        let base = plain_base(self.base);
        Ok((AlgebraElement::new(base, r, range)?, AlgebraElement::new(base, d - r, kernel)?))
    }

    /// `Y · diag(a, b) · Y*`.
    pub fn assemble(&self, range: &AlgebraElement, kernel: &AlgebraElement) -> AlgebraElement {
        let fibers = self
            .fibers
            .iter()
            .zip(range.fibers().iter().zip(kernel.fibers()))
            .map(|(y, (a, b))| y.mul_ref(&a.direct_sum(b)).mul_ref(&y.adjoint()))
            .collect();
        AlgebraElement::from_parts(self.base, self.amp, fibers)
    }

    /// Classes of the two corners of a unitary commuting with the projection.
    pub fn corner_classes(&self, x: &AlgebraElement, tol: f64) -> Result<(K1Class, K1Class)> {
        let (a, b) = self.corner_blocks(x, tol)?;
        Ok((k1_class(&a)?, k1_class(&b)?))
    }
}

/// Partial isometry mapping the range of `from` onto the range of `to`
/// column by column.
pub fn frame_isometry(from: &Frame, to: &Frame) -> Result<AlgebraElement> {
    if from.rank != to.rank || from.dim() != to.dim() {
        return Err(Error::SizeMismatch(format!(
            "ranks {} and {} in dimensions {} and {}",
            from.rank,
            to.rank,
            from.dim(),
            to.dim()
        )));
    }
    let d = from.dim();
    let mask: Vec<C64> = (0..d).map(|k| C64::new(if k < from.rank { 1.0 } else { 0.0 }, 0.0)).collect();
    let fibers = from
        .fibers
        .iter()
        .zip(&to.fibers)
        .map(|(x, y)| y.mul_ref(&ComplexMatrix::diag(&mask)).mul_ref(&x.adjoint()))
        .collect();
    Ok(AlgebraElement::from_parts(from.base, from.amp, fibers))
}

/// A unitary path from `u` to `v`, which must have the same `K_1` class.
///
/// The relative unitary `w = u*v` gets a logarithm `L(z)` that is continuous
/// in `z`; if going once around the circle shifts it by `2πi·M` with `M ≠ 0`,
/// the path first runs `u·exp(tL)·exp(−itθM)` and then undoes the twist
/// `exp(−iθM)` by folding the windings of `M` into one eigenline.
pub fn connect_in_u0(u: &AlgebraElement, v: &AlgebraElement, resolution: usize, tol: f64) -> Result<GridPath> {
    if u.base() != v.base() || u.amp() != v.amp() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    for x in [u, v] {
        let defect = x.unitarity_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
    }
    let (cu, cv) = (k1_class(u)?, k1_class(v)?);
    if cu != cv {
        return Err(Error::ClassMismatch { left: cu.windings, right: cv.windings });
    }
    let resolution = resolution.max(1);
    let base = u.base();
    let w: Vec<ComplexMatrix> = u.fibers().iter().zip(v.fibers()).map(|(a, b)| a.adjoint_mul(b)).collect();
    if !base.is_circle() {
        let log = spectral_log_closed(&w[0]);
        return GridPath::from_fn(resolution, |i| {
            let t = i as f64 / resolution as f64;
            Ok(AlgebraElement::from_parts(base, u.amp(), alloc::vec![u.fiber(0).mul_ref(&log.exp_scaled(t))]))
        });
    }
    let count = w.len();
    let mut cyclic = w.clone();
    cyclic.push(w[0].clone());
    let logs = match unwrap_logs(&cyclic) {
        Ok(l) => l,
        Err(Error::UnwrapFailure { .. }) => unwrap_logs(&refine(&cyclic))?.into_iter().step_by(2).collect(),
        Err(e) => return Err(e),
    };
    let shift = (&logs[count].matrix() - &logs[0].matrix()).scale(C64::new(0.0, -1.0 / TAU));
    let e = hermitian_eigen(&shift);
    let windings: Vec<f64> = e.values.iter().map(|&x| libm::round(x)).collect();
    let twisted = windings.iter().any(|&k| k != 0.0);
    let fold = LoopFold::new(e.vectors, windings.iter().map(|k| k * TAU).collect());
    let angle = |g: usize| TAU * g as f64 / count as f64;

    GridPath::from_fn(resolution, |i| {
        let t = i as f64 / resolution as f64;
        let fibers = (0..count)
            .map(|g| {
                let theta = angle(g) / TAU;
                if !twisted {
                    u.fiber(g).mul_ref(&logs[g].exp_scaled(t))
                } else if t <= 0.5 {
                    let s = 2.0 * t;
                    u.fiber(g).mul_ref(&logs[g].exp_scaled(s)).mul_ref(&fold.loop_at(-s * theta))
                } else {
                    let tau = 2.0 * t - 1.0;
                    v.fiber(g).mul_ref(&fold.loop_at(-theta)).mul_ref(&fold.at(theta, 1.0 - tau))
                }
            })
            .collect();
        Ok(AlgebraElement::from_parts(base, u.amp(), fibers))
    })
}

/// A unitary path from `x` to `1` that commutes with the frame projection at
/// every sample, built corner by corner.
pub fn connect_in_corners(x: &AlgebraElement, frame: &Frame, resolution: usize, tol: f64) -> Result<GridPath> {
    let (a, b) = frame.corner_blocks(x, tol)?;
    let mut paths = Vec::with_capacity(2);
    for block in [&a, &b] {
        let class = k1_class(block)?;
        if !class.is_zero() {
            return Err(Error::ClassMismatch { left: class.windings, right: alloc::vec![0] });
        }
        let one = AlgebraElement::identity(block.base(), block.amp());
        paths.push(connect_in_u0(block, &one, resolution, tol)?);
    }
    GridPath::from_fn(resolution.max(1), |i| Ok(frame.assemble(paths[0].sample(i), paths[1].sample(i))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(g: usize) -> BaseAlgebra {
        BaseAlgebra::CircleLoops(1, g)
    }

    #[test]
    fn winding_examples() {
        let base = circle(64);
        let c = AlgebraElement::from_fn(base, 2, |_| ComplexMatrix::identity(2)).unwrap();
        assert_eq!(det_winding(c.fibers()).unwrap(), 0);
        let a = AlgebraElement::from_fn(base, 2, |z| ComplexMatrix::diag(&[z, C64::new(1.0, 0.0)])).unwrap();
        assert_eq!(det_winding(a.fibers()).unwrap(), 1);
        let b = AlgebraElement::from_fn(base, 2, |z| ComplexMatrix::scalar(2, z.conj())).unwrap();
        assert_eq!(det_winding(b.fibers()).unwrap(), -2);
        let fast = AlgebraElement::from_fn(circle(8), 1, |z| ComplexMatrix::scalar(1, z.powi(4))).unwrap();
        assert!(matches!(det_winding(fast.fibers()), Err(Error::NyquistViolation { .. })));
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout(2, 3).unwrap(), (-1, 1));
        assert_eq!(bezout(1, 5).unwrap(), (1, 0));
        assert_eq!(bezout(3, 4).unwrap(), (-1, 1));
        assert_eq!(bezout(5, 2).unwrap(), (1, -2));
        assert!(matches!(bezout(4, 6), Err(Error::NotCoprime { .. })));
        for m in 1..12_i64 {
            for n in 1..12_i64 {
                if let Ok((j, k)) = bezout(m, n) {
                    assert_eq!(j * m + k * n, 1);
                }
            }
        }
    }

    #[test]
    fn rank_of_rotating_line() {
        let base = circle(32);
        let p = AlgebraElement::from_fn(base, 2, |z| {
            let v = [C64::new(1.0, 0.0) / 2f64.sqrt(), z / 2f64.sqrt()];
            ComplexMatrix::from_fn(2, |i, j| v[i] * v[j].conj())
        })
        .unwrap();
        assert_eq!(rank_fullness(&p, 1e-9).unwrap(), K0Data { rank: 1, full: true });
        let zero = AlgebraElement::zero(base, 2);
        assert_eq!(rank_fullness(&zero, 1e-9).unwrap(), K0Data { rank: 0, full: false });
    }

    #[test]
    fn frame_of_rotating_line_is_periodic_and_adapted() {
        let base = circle(48);
        let p = AlgebraElement::from_fn(base, 2, |z| {
            let v = [C64::new(0.6, 0.0), z * 0.8];
            ComplexMatrix::from_fn(2, |i, j| v[i] * v[j].conj())
        })
        .unwrap();
        let frame = continuous_frame(&p, 1e-9).unwrap();
        assert!(frame.projection().distance(&p) < 1e-10);
        let y = frame.fibers();
        let jumps = y.windows(2).map(|w| w[1].distance(&w[0])).fold(0.0, f64::max);
        let wrap = y[0].distance(&y[y.len() - 1]);
        assert!(wrap < 2.0 * jumps + 1e-9, "wrap {wrap} vs {jumps}");
    }

    #[test]
    fn connect_twisted_zero_class_loop() {
        let base = circle(64);
        let v = AlgebraElement::from_fn(base, 2, |z| ComplexMatrix::diag(&[z, z.conj()])).unwrap();
        let one = AlgebraElement::identity(base, 2);
        let path = connect_in_u0(&one, &v, 32, 1e-9).unwrap();
        assert!(path.first().distance(&one) < 1e-12);
        assert!(path.last().distance(&v) < 1e-10);
        assert!(path.max_unitarity_defect() < 1e-10);
        assert!(path.max_step_jump() < 0.6);
        for x in path.samples() {
            assert_eq!(k1_class(x).unwrap().winding(), 0);
        }
    }

    #[test]
    fn connect_rejects_class_mismatch() {
        let base = circle(16);
        let v = k1_representative(base, &K1Class { windings: alloc::vec![1] }, 2).unwrap();
        let one = AlgebraElement::identity(base, 2);
        assert!(matches!(connect_in_u0(&one, &v, 8, 1e-9), Err(Error::ClassMismatch { .. })));
    }

    #[test]
    fn corner_class_of_rank_one_twist() {
        let base = circle(64);
        let p = AlgebraElement::constant(
            base,
            3,
            &ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        )
        .unwrap();
        let frame = continuous_frame(&p, 1e-9).unwrap();
        let w = frame.corrector(2, -1);
        let (a, b) = frame.corner_classes(&w, 1e-9).unwrap();
        assert_eq!((a.winding(), b.winding()), (2, -1));
        let wp = corner_compress(&w, &p).unwrap();
        assert_eq!(corner_k1(&wp, &p, 1e-9).unwrap().winding(), 2);
    }
}
