//! Coupling data, codimension-one triples and the local models built from them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pjet::catalog;
use pjet::coupling::{check_codim1_triple, check_coupling, couplingdata_from_codim1, skew_residuals, CouplingData};
use pjet::docs::Document;
use pjet::expr::{rat, Chart, ScalarExpr};
use pjet::geom::Multivector;
use pjet::jets::{check_tangent, jet_truncate};
use pjet::localmodel::{build_codim1, build_local_model, codim1_closed_form, verify_local_model};
use pjet::random;

fn at_zero_section(e: &ScalarExpr, fiber: &[usize]) -> ScalarExpr {
    e.substitute(&|i| if fiber.contains(&i) { ScalarExpr::zero() } else { ScalarExpr::var(i) }).unwrap()
}

fn catalog_couplings() -> Vec<(String, CouplingData, Vec<Vec<usize>>, bool)> {
    let mut out = Vec::new();
    for e in catalog::entries().unwrap() {
        let pass = e.expected.verdict.is_pass();
        let doc = match &e.input {
            Document::Model(m) => m.clone(),
            _ => continue,
        };
        if let Some(c) = &doc.coupling {
            if let Ok(d) = c.coupling().unwrap() {
                out.push((e.name.clone(), d, c.leaves().unwrap(), pass));
            }
        }
        if let Some(c) = &doc.codim1 {
            if let Ok(t) = c.triple().unwrap() {
                if let Ok(d) = couplingdata_from_codim1(&t) {
                    out.push((e.name.clone(), d, c.leaves().unwrap(), pass));
                }
            }
        }
    }
    for e in catalog::entries().unwrap() {
        let pass = e.expected.verdict.is_pass();
        match &e.input {
            Document::Coupling(c) => {
                if let Ok(d) = c.coupling().unwrap() {
                    out.push((e.name.clone(), d, c.leaves().unwrap(), pass));
                }
            }
            Document::Codim1(c) => {
                if let Ok(t) = c.triple().unwrap() {
                    if let Ok(d) = couplingdata_from_codim1(&t) {
                    out.push((e.name.clone(), d, c.leaves().unwrap(), pass));
                }
                }
            }
            _ => {}
        }
    }
    out
}

#[test]
fn catalog_coupling_data_with_pass_verdicts() {
    let all = catalog_couplings();
    let passing: Vec<_> = all.iter().filter(|c| c.3).collect();
    assert!(passing.len() >= 3, "{}", passing.len());
    for (name, d, leaves, _) in passing {
        assert!(skew_residuals(d).iter().all(|(_, r)| r.is_zero()), "{name}");
        assert!(check_coupling(d).passed(), "{name}");
        let m = build_local_model(d).unwrap();
        let v = verify_local_model(&m, d, leaves).unwrap();
        assert!(v.passed(), "{name}: {v:?}");
    }
}

#[test]
fn abelian_triples_round_trip_through_coupling_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for case in 0..20 {
        let t = random::abelian_codim1_triple(&mut rng, 2);
        assert!(check_codim1_triple(&t).unwrap().passed(), "case {case}");
        let d = couplingdata_from_codim1(&t).unwrap();
        assert_eq!(d.rank(), 1);
        assert!(d.c(0, 0, 0).is_zero());
        for i in 0..d.dim() {
            assert_eq!(d.gamma(i, 0, 0), &-t.theta.component(&[i]), "case {case}");
            for j in 0..d.dim() {
                assert_eq!(d.u(i, 0, j), &t.u[i][j], "case {case}");
            }
        }
        assert!(check_coupling(&d).passed(), "case {case}");
        // U = 0 gives a linear fiber direction: no denominators
        let m = build_codim1(&t).unwrap();
        assert!(m.certificate().is_one(), "case {case}");
    }
}

#[test]
fn random_scalar_triples_agree_across_constructions() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for case in 0..20 {
        let t = random::scalar_codim1_triple(&mut rng, 2);
        assert!(check_codim1_triple(&t).unwrap().passed(), "case {case}");
        let d = couplingdata_from_codim1(&t).unwrap();
        let block = build_local_model(&d).unwrap();
        let closed = codim1_closed_form(&t, "t").unwrap();
        assert_eq!(block.bivector(), closed.bivector(), "case {case}");
        assert_eq!(block.certificate(), closed.certificate(), "case {case}");
        // independent check: the model is Poisson
        assert!(closed.bivector().schouten(closed.bivector()).unwrap().is_zero(), "case {case}");
        let v = verify_local_model(&block, &d, &[]).unwrap();
        assert!(v.passed(), "case {case}: {v:?}");
    }
}

#[test]
fn certificate_is_the_determinant_and_one_on_the_zero_section() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for case in 0..10 {
        let t = random::scalar_codim1_triple(&mut rng, 2);
        let m = build_codim1(&t).unwrap();
        let tv = ScalarExpr::var(2);
        let f = &t.u[0][0];
        // det(Id + t f Id) = (1 + t f)²
        let one_tf = ScalarExpr::one() + &tv * f;
        assert_eq!(m.certificate(), &(&one_tf * &one_tf), "case {case}");
        assert!(at_zero_section(m.certificate(), &m.fiber_indices()).is_one());
        assert!(m.certificate_covers());
        let zs = m.zero_section();
        check_tangent(m.bivector(), &zs).unwrap();
        // restricted to the zero section the model is the base structure
        for (idx, c) in t.pi.terms() {
            assert_eq!(&at_zero_section(&m.bivector().component(idx), &m.fiber_indices()), c);
        }
        assert!(jet_truncate(m.bivector(), &zs).is_ok());
    }
}

#[test]
fn constant_fiber_coupling_gives_a_scaled_structure() {
    // U = c·Id with constant c: γ_t = π/(1 + c t)
    let base = Chart::new(&["x", "y"]);
    for c in [rat(-1, 1), rat(1, 2), rat(3, 1)] {
        let k = ScalarExpr::constant(c.clone());
        let u = vec![vec![vec![k.clone(), ScalarExpr::zero()]], vec![vec![ScalarExpr::zero(), k.clone()]]];
        let pi = Multivector::bivector(&base, &[(0, 1, ScalarExpr::one())]).unwrap();
        let d = CouplingData::new(pi, vec![vec![vec![ScalarExpr::zero()]]], vec![vec![vec![ScalarExpr::zero()]]; 2], u).unwrap();
        assert!(check_coupling(&d).passed());
        let m = build_local_model(&d).unwrap();
        let den = ScalarExpr::one() + &k * &ScalarExpr::var(2);
        assert_eq!(m.bivector().component(&[0, 1]), ScalarExpr::one().checked_div(&den).unwrap());
        assert!(verify_local_model(&m, &d, &[]).unwrap().passed());
    }
}
