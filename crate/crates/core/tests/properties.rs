use dimdrop_core::algebra::{AlgebraElement, BaseAlgebra};
use dimdrop_core::ktheory::{k1_class, k1_representative, K1Class};
use dimdrop_core::linalg::{exp_skew_hermitian, unitary_log, ComplexMatrix, C64};
use dimdrop_core::random::{random_unitary, random_unitary_element, random_unitary_with_phase_bound};
use dimdrop_core::sequence::ElementaryMap;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn circle_loop(seed: u64, amp: usize, winding: i64) -> AlgebraElement {
    let base = BaseAlgebra::CircleLoops(1, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary_element(&mut rng, base, amp).unwrap();
    u.mul(&k1_representative(base, &K1Class { windings: vec![winding] }, amp).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tensor_is_associative_and_bilinear(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (gaussian(&mut rng, da), gaussian(&mut rng, db), gaussian(&mut rng, dc));
        let a2 = gaussian(&mut rng, da);
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert!(left.distance(&right) < 1e-12);
        let s = C64::new(re, im);
        let lin = (&a.scale(s) + &a2).tensor(&b);
        let split = &a.tensor(&b).scale(s) + &a2.tensor(&b);
        prop_assert!(lin.distance(&split) < 1e-12);
        let lin = a.tensor(&(&b.scale(s) + &b));
        let split = &a.tensor(&b).scale(s) + &a.tensor(&b);
        prop_assert!(lin.distance(&split) < 1e-12);
    }

    #[test]
    fn direct_sum_is_multiplicative(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, a2, b, b2) = (gaussian(&mut rng, da), gaussian(&mut rng, da), gaussian(&mut rng, db), gaussian(&mut rng, db));
        let lhs = a.direct_sum(&b).mul_ref(&a2.direct_sum(&b2));
        prop_assert!(lhs.distance(&a.mul_ref(&a2).direct_sum(&b.mul_ref(&b2))) < 1e-12);
    }

    #[test]
    fn exp_inverts_log_away_from_minus_one(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary_with_phase_bound(&mut rng, d, 2.5);
        let log = unitary_log(&u, 1e-9, 0.1).unwrap();
        prop_assert!(log.is_skew_hermitian(1e-12));
        prop_assert!(exp_skew_hermitian(&log).distance(&u) < 1e-10);
    }

    #[test]
    fn determinant_of_tensor_product(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (gaussian(&mut rng, m), gaussian(&mut rng, n));
        let expected = a.determinant().powu(n as u32) * b.determinant().powu(m as u32);
        let got = a.tensor(&b).determinant();
        prop_assert!((got - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
    }

    #[test]
    fn elementary_endpoints_for_random_unitaries(seed in any::<u64>(), n in 1usize..6, fibre in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = BaseAlgebra::Matrices(fibre);
        let u = AlgebraElement::constant(base, 1, &random_unitary(&mut rng, fibre)).unwrap();
        let map = ElementaryMap::standard(n, 16).unwrap();
        let start = map.eval_index(&u, 0, 1e-9).unwrap();
        let end = map.eval_index(&u, 16, 1e-9).unwrap();
        prop_assert!(start.distance(&u.tensor_identity(n)) < 1e-12);
        prop_assert!(end.distance(&u.pow(n as i64).pad_identity(n - 1)) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn k1_is_additive_and_odd(s1 in any::<u64>(), s2 in any::<u64>(), c1 in -3i64..=3, c2 in -3i64..=3) {
        let (u, v) = (circle_loop(s1, 2, c1), circle_loop(s2, 1, c2));
        prop_assert_eq!(k1_class(&u).unwrap().winding(), c1);
        prop_assert_eq!(k1_class(&u.adjoint()).unwrap().winding(), -c1);
        prop_assert_eq!(k1_class(&u.direct_sum(&v).unwrap()).unwrap().winding(), c1 + c2);
        let w = circle_loop(s2, 2, c2);
        prop_assert_eq!(k1_class(&u.mul(&w).unwrap()).unwrap().winding(), c1 + c2);
    }

    #[test]
    fn elementary_images_keep_a_marked_fibre_at_one(seed in any::<u64>(), n in 2usize..4, c in -2i64..=2) {
        let u = circle_loop(seed, 1, c);
        let mut fibers = u.into_fibers();
        fibers[0] = ComplexMatrix::identity(1);
        let u = AlgebraElement::new(BaseAlgebra::CircleLoops(1, 64), 1, fibers).unwrap();
        let image = ElementaryMap::standard(n, 8).unwrap().image(&u, 1e-9).unwrap();
        for x in image.samples() {
            prop_assert!(x.fiber(0).distance_from_identity() < 1e-14);
        }
    }
}
