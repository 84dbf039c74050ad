use super::*;
use crate::expr::Chart;

fn e(chart: &Arc<Chart>, s: &str) -> ScalarExpr {
    chart.parse(s).unwrap()
}

fn biv(chart: &Arc<Chart>, entries: &[(usize, usize, &str)]) -> Multivector {
    let v: Vec<_> = entries.iter().map(|(i, j, s)| (*i, *j, e(chart, s))).collect();
    Multivector::bivector(chart, &v).unwrap()
}

fn form(chart: &Arc<Chart>, entries: &[(&[usize], &str)]) -> DiffForm {
    let deg = entries.first().map(|(i, _)| i.len()).unwrap_or(0);
    DiffForm::from_terms(chart, deg, entries.iter().map(|(i, s)| (i.to_vec(), e(chart, s)))).unwrap()
}

/// Jacobiator `{f,{g,h}} + cyclic` from the coefficient matrix, independent of the bracket code.
fn jacobiator(pi: &Multivector, i: usize, j: usize, k: usize) -> ScalarExpr {
    let m = pi.matrix().unwrap();
    let n = pi.dim();
    let bracket = |f: &ScalarExpr, g: &ScalarExpr| {
        let mut acc = ScalarExpr::zero();
        for a in 0..n {
            for b in 0..n {
                acc = acc + &m[a][b] * f.differentiate(a) * g.differentiate(b);
            }
        }
        acc
    };
    let x = |a: usize| ScalarExpr::var(a);
    bracket(&x(i), &bracket(&x(j), &x(k)))
        + bracket(&x(j), &bracket(&x(k), &x(i)))
        + bracket(&x(k), &bracket(&x(i), &x(j)))
}

#[test]
fn nonholonomic_schouten_square() {
    let c = Chart::new(&["x", "y", "z"]);
    let pi = biv(&c, &[(0, 1, "z"), (0, 2, "x*z")]);
    let s = pi.schouten(&pi).unwrap();
    assert_eq!(s.degree(), 3);
    assert_eq!(s.terms().len(), 1);
    assert_eq!(s.component(&[0, 1, 2]), e(&c, "2*z^2"));
    assert_eq!(s.component(&[0, 1, 2]), jacobiator(&pi, 0, 1, 2) * ScalarExpr::int(2));
}

#[test]
fn vector_field_bracket_is_lie_bracket() {
    let c = Chart::new(&["x", "y"]);
    let dx = Multivector::basis(&c, 0);
    let xdy = Multivector::basis(&c, 1).scale(&ScalarExpr::var(0));
    assert_eq!(dx.schouten(&xdy).unwrap(), Multivector::basis(&c, 1));
}

#[test]
fn lie_poisson_so3_is_poisson() {
    let c = Chart::new(&["x1", "x2", "x3"]);
    let pi = biv(&c, &[(0, 1, "x3"), (1, 2, "x1"), (2, 0, "x2")]);
    assert!(pi.schouten(&pi).unwrap().is_zero());
    assert!(jacobiator(&pi, 0, 1, 2).is_zero());
}

#[test]
fn factor_two_convention_on_random_bivector() {
    let c = Chart::new(&["a", "b", "c", "d"]);
    let pi = biv(
        &c,
        &[(0, 1, "a*c + d^2"), (0, 3, "b - 2*a*b"), (1, 2, "c*d"), (2, 3, "a^2 + 3"), (1, 3, "a*d")],
    );
    let s = pi.schouten(&pi).unwrap();
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        assert_eq!(s.component(&[i, j, k]), jacobiator(&pi, i, j, k) * ScalarExpr::int(2));
    }
}

#[test]
fn sharp_contracts_first_slot() {
    let c = Chart::new(&["x", "y"]);
    let pi = biv(&c, &[(0, 1, "1")]);
    let dx = DiffForm::basis(&c, 0);
    assert_eq!(pi.sharp(&dx).unwrap(), Multivector::basis(&c, 1));
    assert_eq!(pi.pair(&dx, &DiffForm::basis(&c, 1)).unwrap(), ScalarExpr::one());
}

#[test]
fn florian_sharp_of_theta() {
    let c = Chart::new(&["x", "y", "z"]);
    let pi = biv(&c, &[(1, 2, "x"), (0, 2, "-y")]);
    let theta = form(&c, &[(&[0], "-y"), (&[1], "x")]);
    let v = pi.sharp(&theta).unwrap();
    assert_eq!(v.components(), vec![ScalarExpr::zero(), ScalarExpr::zero(), e(&c, "x^2+y^2")]);
}

#[test]
fn exterior_derivative_examples() {
    let c = Chart::new(&["x", "y", "z"]);
    assert_eq!(form(&c, &[(&[1], "x")]).exterior_derivative(), form(&c, &[(&[0, 1], "1")]));
    let d = form(&c, &[(&[0, 1], "z")]).exterior_derivative();
    assert_eq!(d, form(&c, &[(&[0, 1, 2], "1")]));
    let g = Chart::new(&["x", "y", "u", "v", "w"]);
    let omega = form(&g, &[(&[0, 2], "1"), (&[1, 3], "1"), (&[0, 1], "w"), (&[1, 4], "-x")]);
    assert!(omega.exterior_derivative().is_zero());
}

#[test]
fn cotangent_bracket_examples() {
    let c = Chart::new(&["x", "y", "z"]);
    let dx = DiffForm::basis(&c, 0);
    let dy = DiffForm::basis(&c, 1);
    let flat = biv(&c, &[(0, 1, "1")]);
    assert!(cotangent_bracket(&dx, &dy, &flat).unwrap().is_zero());
    let pi = biv(&c, &[(0, 1, "z"), (0, 2, "x*z")]);
    assert_eq!(cotangent_bracket(&dx, &dy, &pi).unwrap(), DiffForm::basis(&c, 2));
    let dz = DiffForm::basis(&c, 2);
    assert_eq!(cotangent_bracket(&dx, &dz, &pi).unwrap(), form(&c, &[(&[0], "z"), (&[2], "x")]));
}

#[test]
fn exact_forms_bracket_to_poisson_bracket() {
    let c = Chart::new(&["x", "y", "z"]);
    let pi = biv(&c, &[(0, 1, "z*y"), (0, 2, "x^2"), (1, 2, "y + z")]);
    let f = e(&c, "x*y + z^2");
    let g = e(&c, "y^3 - x");
    let df = DiffForm::differential(&c, &f);
    let dg = DiffForm::differential(&c, &g);
    let fg = pi.pair(&df, &dg).unwrap();
    assert_eq!(cotangent_bracket(&df, &dg, &pi).unwrap(), DiffForm::differential(&c, &fg));
}

#[test]
fn pullback_examples() {
    let xy = Chart::new(&["x", "y"]);
    let t = Chart::new(&["t"]);
    let dy = DiffForm::basis(&xy, 1);
    let phi = SmoothMap::new(&t, &xy, vec![ScalarExpr::var(0), e(&t, "t^2")]).unwrap();
    assert_eq!(dy.pullback(&phi).unwrap(), form(&t, &[(&[0], "2*t")]));
    assert_eq!(dy.pullback(&SmoothMap::identity(&xy)).unwrap(), dy);
    // fiber scaling m_λ on ℝ_x×ℝ_t with λ as an extra source coordinate
    let src = Chart::new(&["x", "t", "lam"]);
    let xt = Chart::new(&["x", "t"]);
    let m = SmoothMap::new(&src, &xt, vec![ScalarExpr::var(0), e(&src, "lam*t")]).unwrap();
    let a = form(&xt, &[(&[0], "t")]);
    assert_eq!(a.pullback(&m).unwrap(), form(&src, &[(&[0], "lam*t")]));
}

#[test]
fn pullback_is_functorial() {
    let a = Chart::new(&["s", "r"]);
    let b = Chart::new(&["u", "v", "w"]);
    let c = Chart::new(&["x", "y"]);
    let phi = SmoothMap::new(&a, &b, vec![e(&a, "s*r"), e(&a, "s^2"), e(&a, "r - s")]).unwrap();
    let psi = SmoothMap::new(&b, &c, vec![e(&b, "u + w^2"), e(&b, "v*w")]).unwrap();
    let alpha = form(&c, &[(&[0, 1], "x*y + 1")]);
    let lhs = alpha.pullback(&phi.then(&psi).unwrap()).unwrap();
    let rhs = alpha.pullback(&psi).unwrap().pullback(&phi).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn chart_mismatch_is_reported() {
    let a = Chart::new(&["x", "y"]);
    let b = Chart::new(&["u", "v"]);
    let p = biv(&a, &[(0, 1, "1")]);
    let q = biv(&b, &[(0, 1, "1")]);
    assert_eq!(p.schouten(&q), Err(GeomError::ChartMismatch));
}

#[test]
fn non_increasing_indices_rejected() {
    let a = Chart::new(&["x", "y"]);
    let r = Multivector::from_terms(&a, 2, vec![(vec![1, 0], ScalarExpr::one())]);
    assert!(matches!(r, Err(GeomError::BadIndices(_))));
}
