//! Seeded random fixtures.
//!
//! A random unitary is `exp(S)` for a skew-Hermitian `S = (G − G*) / (2√d)`,
//! where `G` has independent standard normal real and imaginary parts.
//! Circle loops vary the generator smoothly with the base point.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::algebra::{AlgebraElement, BaseAlgebra};
use crate::error::Result;
use crate::linalg::{exp_skew_hermitian, reconstruct, ComplexMatrix, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim);
    for x in g.as_mut_slice() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *x = C64::new(re, im);
    }
    g
}

pub fn random_skew_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian(rng, dim);
    (&g - &g.adjoint()).scale_real(0.5 / libm::sqrt(dim.max(1) as f64))
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    exp_skew_hermitian(&random_skew_hermitian(rng, dim))
}

/// A unitary with a random eigenbasis and eigen-phases drawn uniformly from
/// `(−bound, bound)`.
pub fn random_unitary_with_phase_bound<R: Rng + ?Sized>(rng: &mut R, dim: usize, bound: f64) -> ComplexMatrix {
    let basis = random_unitary(rng, dim);
    let phases = Uniform::new(-bound, bound).expect("bound must be positive");
    let values: Vec<C64> = (0..dim).map(|_| C64::from_polar(1.0, phases.sample(rng))).collect();
    reconstruct(&basis, &values)
}

/// A random unitary of `M_amp(A)`.
///
/// Over the circle the generator is `S₀ + cos θ·S₁ + sin θ·S₂`, a smooth loop
/// with winding 0; multiply by a winding representative for other classes.
pub fn random_unitary_element<R: Rng + ?Sized>(rng: &mut R, base: BaseAlgebra, amp: usize) -> Result<AlgebraElement> {
    let dim = amp * base.fiber_dim();
    let s0 = random_skew_hermitian(rng, dim);
    if !base.is_circle() {
        return AlgebraElement::constant(base, amp, &exp_skew_hermitian(&s0));
    }
    let s1 = random_skew_hermitian(rng, dim).scale_real(0.5);
    let s2 = random_skew_hermitian(rng, dim).scale_real(0.5);
    let count = base.fiber_count();
    let fibers = (0..count)
        .map(|g| {
            let theta = 2.0 * PI * g as f64 / count as f64;
            let s = &(&s0 + &s1.scale_real(libm::cos(theta))) + &s2.scale_real(libm::sin(theta));
            exp_skew_hermitian(&s)
        })
        .collect();
    AlgebraElement::new(base, amp, fibers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(0);
        let mut b = ChaCha8Rng::seed_from_u64(0);
        let u = random_unitary(&mut a, 5);
        assert!(crate::linalg::unitarity_defect(&u) < 1e-12);
        assert_eq!(u, random_unitary(&mut b, 5));
    }

    #[test]
    fn circle_loops_have_winding_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary_element(&mut rng, BaseAlgebra::CircleLoops(2, 64), 1).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        assert_eq!(crate::ktheory::k1_class(&u).unwrap().winding(), 0);
    }
}
