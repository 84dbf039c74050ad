use super::*;
use serde_json::json;

#[test]
fn poisson_document_round_trips() {
    let v = json!({"kind": "poisson", "chart": ["x", "y", "z"], "pi": [["x", "y", "z"], ["z", "y", "-x"]]});
    let d = Document::from_value(v.clone()).unwrap();
    assert_eq!(d.kind(), "poisson");
    assert_eq!(serde_json::to_value(&d).unwrap(), v);
    let Document::Poisson(p) = d else { unreachable!() };
    let pi = p.bivector().unwrap();
    assert_eq!(pi.terms().len(), 2);
    assert_eq!(pi.component(&[1, 2]).to_string_with(pi.chart().names()), "x");
}

#[test]
fn unknown_fields_and_names_are_rejected() {
    let bad_field = json!({"kind": "poisson", "chart": ["x"], "pi": [], "extra": 1});
    assert!(Document::from_value(bad_field).is_err());
    let bad_kind = json!({"kind": "nope"});
    assert!(Document::from_value(bad_kind).is_err());
    let bad_name = json!({"kind": "poisson", "chart": ["x", "y"], "pi": [["x", "w", "1"]]});
    let Document::Poisson(p) = Document::from_value(bad_name).unwrap() else { unreachable!() };
    assert!(p.bivector().unwrap_err().0.contains("unknown coordinate `w`"));
    let dup = json!({"kind": "poisson", "chart": ["x", "x"], "pi": []});
    let Document::Poisson(p) = Document::from_value(dup).unwrap() else { unreachable!() };
    assert!(p.bivector().is_err());
}

#[test]
fn forms_check_their_degree() {
    let n = Names::new(&["x".into(), "y".into()]).unwrap();
    let f = n.form(2, &vec![(vec!["y".into(), "x".into()], "3".into())]).unwrap();
    assert_eq!(f.component(&[0, 1]), ScalarExpr::int(-3));
    assert!(n.form(2, &vec![(vec!["x".into()], "1".into())]).is_err());
}

#[test]
fn coupling_document_fills_antisymmetric_structure() {
    let v = json!({
        "kind": "coupling", "chart": ["x", "y"], "pi": [["x", "y", "1"]],
        "kernel": ["a", "b", "c"],
        "structure": [["a", "b", {"c": "1"}], ["b", "c", {"a": "1"}], ["c", "a", {"b": "1"}]]
    });
    let Document::Coupling(c) = Document::from_value(v).unwrap() else { unreachable!() };
    let d = c.coupling().unwrap().unwrap();
    assert_eq!(d.c(1, 0, 2), &ScalarExpr::int(-1));
    assert_eq!(d.rank(), 3);
}

#[test]
fn groupoid_parameterization_must_match_source() {
    let mut v = json!({
        "kind": "groupoid",
        "arrows": ["x1", "x2"], "base": ["x"],
        "source": ["x2"], "target": ["x1"], "unit": ["x", "x"], "inverse": ["x2", "x1"],
        "multiplication": ["x1_1", "x2_2"],
        "composable_parameterization": {"source_coordinates": ["x2"], "free": ["x1"]},
        "form": []
    });
    let Document::Groupoid(g) = Document::from_value(v.clone()).unwrap() else { unreachable!() };
    assert!(g.parts().is_ok());
    v["composable_parameterization"]["source_coordinates"] = json!(["x1"]);
    let Document::Groupoid(g) = Document::from_value(v).unwrap() else { unreachable!() };
    assert!(g.parts().is_err());
}
