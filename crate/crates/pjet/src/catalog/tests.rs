use super::*;

#[test]
fn every_entry_parses_and_is_sorted() {
    let e = entries().unwrap();
    assert_eq!(e.len(), SOURCES.len());
    let names: Vec<&str> = e.iter().map(|x| x.name.as_str()).collect();
    assert_eq!(names, super::names());
    assert!(e.iter().all(|x| !x.citation.is_empty()));
}

#[test]
fn every_entry_matches_its_expectation() {
    let run = run_catalog(None, &NumericOpts::default()).unwrap();
    for r in &run.results {
        assert!(r.matched(), "{}: {:?}\n{:#?}", r.name, r.mismatches, r.verdict);
    }
    assert!(run.verdict().passed());
}

#[test]
fn patterns() {
    assert!(matches("florian", "florian"));
    assert!(!matches("flor", "florian"));
    assert!(matches("*groupoid", "pair-groupoid"));
    assert!(matches("so3-*", "so3-liepoisson"));
    assert!(matches("*-*-*", "so3-product-model"));
    assert!(!matches("a*a", "a"));
    let run = run_catalog(Some("*groupoid"), &NumericOpts::default()).unwrap();
    assert_eq!(run.results.len(), 3);
    assert!(matches!(run_catalog(Some("nope"), &NumericOpts::default()), Err(CatalogError::UnknownEntry(_))));
}

#[test]
fn changed_expectation_is_a_mismatch() {
    let mut e = entries().unwrap().into_iter().find(|e| e.name == "florian").unwrap();
    e.expected.verdict = Status::Pass;
    let r = run_entry(&e, &NumericOpts::default());
    assert_eq!(r.mismatches, ["verdict: expected PASS, got FAIL"]);
}

#[test]
fn full_run_exercises_every_library_operation() {
    let ops = run_catalog(None, &NumericOpts::default()).unwrap().ops();
    let want = [
        "normalize",
        "differentiate",
        "eval_dual",
        "schouten",
        "exterior_derivative",
        "cotangent_bracket",
        "pullback",
        "ideal_membership",
        "jet_truncate",
        "check_second_order",
        "jet_to_algebroid",
        "check_jacobi",
        "check_closed_im",
        "check_cartan_splitting",
        "check_coupling",
        "check_codim1_triple",
        "couplingdata_from_codim1",
        "build_local_model",
        "build_codim1",
        "verify_local_model",
        "homotopy_primitive",
        "check_multiplicative",
        "check_oversymplectic",
    ];
    let missing: Vec<_> = want.iter().filter(|o| !ops.contains(*o)).collect();
    assert!(missing.is_empty(), "{missing:?}");
}
