//! Graded identities of the Schouten bracket and the cotangent bracket on
//! random polynomial data.

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pjet::expr::{Chart, ScalarExpr};
use pjet::geom::{cotangent_bracket, DiffForm, Multivector};
use pjet::random;

fn chart() -> Arc<Chart> {
    Chart::new(&["x", "y", "z"])
}

fn sign(k: usize) -> ScalarExpr {
    if k % 2 == 0 {
        ScalarExpr::one()
    } else {
        ScalarExpr::int(-1)
    }
}

fn mv(rng: &mut ChaCha8Rng, c: &Arc<Chart>, deg: usize) -> Multivector {
    random::multivector(rng, c, deg, 2, 3)
}

fn br(a: &Multivector, b: &Multivector) -> Multivector {
    a.schouten(b).unwrap()
}

fn config(cases: u32, seed: u64) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(100, 5))]

    #[test]
    fn graded_antisymmetry(seed in any::<u64>(), p in 0usize..=3, q in 0usize..=3) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (mv(&mut rng, &c, p), mv(&mut rng, &c, q));
        let s = sign((p + 1) * (q + 1) + 1);
        prop_assert_eq!(br(&a, &b), br(&b, &a).scale(&s));
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), p in 1usize..=2, q in 0usize..=2, r in 0usize..=1) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, d) = (mv(&mut rng, &c, p), mv(&mut rng, &c, q), mv(&mut rng, &c, r));
        let lhs = br(&a, &b.wedge(&d).unwrap());
        let rhs = br(&a, &b).wedge(&d).unwrap().add(&b.wedge(&br(&a, &d)).unwrap().scale(&sign((p + 1) * q))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_jacobi(seed in any::<u64>(), p in 1usize..=2, q in 1usize..=2, r in 1usize..=2) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, d) = (mv(&mut rng, &c, p), mv(&mut rng, &c, q), mv(&mut rng, &c, r));
        let t1 = br(&a, &br(&b, &d)).scale(&sign((p + 1) * (r + 1)));
        let t2 = br(&b, &br(&d, &a)).scale(&sign((q + 1) * (p + 1)));
        let t3 = br(&d, &br(&a, &b)).scale(&sign((r + 1) * (q + 1)));
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
    }

    #[test]
    fn cartan_magic_formula(seed in any::<u64>(), k in 0usize..=2) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = mv(&mut rng, &c, 1);
        let w = random::form(&mut rng, &c, k, 2, 3);
        let lhs = w.lie_derivative(&x).unwrap();
        let mut rhs = w.exterior_derivative().interior(&x).unwrap();
        if k > 0 {
            rhs = rhs.add(&w.interior(&x).unwrap().exterior_derivative()).unwrap();
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_is_module_linear(seed in any::<u64>(), p in 1usize..=3) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = mv(&mut rng, &c, p);
        let alpha = random::form(&mut rng, &c, 1, 2, 3);
        let f = random::scalar(&mut rng, &c, 2, 3);
        prop_assert_eq!(a.contract(&alpha.scale(&f)).unwrap(), a.contract(&alpha).unwrap().scale(&f));
    }

    #[test]
    fn vector_field_bracket_is_lie_derivative_on_functions(seed in any::<u64>()) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (mv(&mut rng, &c, 1), mv(&mut rng, &c, 1));
        let f = random::scalar(&mut rng, &c, 3, 3);
        let lhs = br(&x, &y).apply(&f).unwrap();
        let rhs = x.apply(&y.apply(&f).unwrap()).unwrap() - y.apply(&x.apply(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(config(50, 6))]

    #[test]
    fn cotangent_bracket_leibniz(seed in any::<u64>()) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = mv(&mut rng, &c, 2);
        let alpha = random::form(&mut rng, &c, 1, 2, 2);
        let beta = random::form(&mut rng, &c, 1, 2, 2);
        let f = random::scalar(&mut rng, &c, 2, 3);
        let lhs = cotangent_bracket(&alpha, &beta.scale(&f), &pi).unwrap();
        let anchor_f = pi.sharp(&alpha).unwrap().apply(&f).unwrap();
        let rhs = cotangent_bracket(&alpha, &beta, &pi).unwrap().scale(&f).add(&beta.scale(&anchor_f)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cotangent_bracket_is_skew(seed in any::<u64>()) {
        let c = chart();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = mv(&mut rng, &c, 2);
        let alpha = random::form(&mut rng, &c, 1, 2, 2);
        let beta = random::form(&mut rng, &c, 1, 2, 2);
        let ab = cotangent_bracket(&alpha, &beta, &pi).unwrap();
        let ba = cotangent_bracket(&beta, &alpha, &pi).unwrap();
        prop_assert!(ab.add(&ba).unwrap().is_zero());
    }

    #[test]
    fn anchor_is_a_morphism_for_linear_poisson(seed in any::<u64>()) {
        // Lie–Poisson structures of random algebras are Poisson, so the
        // anchor intertwines the cotangent bracket with the Lie bracket
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pi, _) = random::product_jet(&mut rng, 2);
        let c = pi.chart().clone();
        let alpha = random::form(&mut rng, &c, 1, 1, 2);
        let beta = random::form(&mut rng, &c, 1, 1, 2);
        let lhs = pi.sharp(&cotangent_bracket(&alpha, &beta, &pi).unwrap()).unwrap();
        let rhs = br(&pi.sharp(&alpha).unwrap(), &pi.sharp(&beta).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn exterior_derivative_squares_to_zero() {
    let c = chart();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..3 {
        let w: DiffForm = random::form(&mut rng, &c, k, 3, 4);
        assert!(w.exterior_derivative().exterior_derivative().is_zero());
    }
}

#[test]
fn generators_give_nontrivial_brackets() {
    let c = chart();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let nonzero = (0..100)
        .filter(|_| {
            let (a, b) = (mv(&mut rng, &c, 2), mv(&mut rng, &c, 2));
            !br(&a, &b).is_zero()
        })
        .count();
    assert!(nonzero >= 70, "{nonzero}");
}
