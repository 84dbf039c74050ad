//! Seeded generators for property tests, the acceptance run and benchmarks.
//!
//! Every generator takes an explicit RNG so callers can reproduce a case
//! from its seed. Coefficients are small rationals to keep exact arithmetic
//! cheap.

use std::sync::Arc;

use rand::Rng;

use crate::algebroid::Section;
use crate::coupling::{Codim1Triple, CouplingError};
use crate::expr::{rat, Chart, Monomial, Poly, ScalarExpr};
use crate::geom::{DiffForm, Multivector};
use crate::jets::Submanifold;

/// Nonzero rational with numerator in `-3..=3` and denominator in `1..=2`.
pub fn coefficient<R: Rng>(rng: &mut R) -> ScalarExpr {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3i64..=3);
    }
    ScalarExpr::rational(n, rng.gen_range(1i64..=2))
}

/// Polynomial in the variables `vars` of total degree at most `max_degree`,
/// with at most `max_terms` terms (possibly zero).
pub fn polynomial<R: Rng>(rng: &mut R, dim: usize, vars: &[usize], max_degree: u32, max_terms: usize) -> ScalarExpr {
    let mut acc = Poly::zero();
    for _ in 0..rng.gen_range(0..=max_terms) {
        let mut exps = vec![0u32; dim];
        let mut left = rng.gen_range(0..=max_degree);
        while left > 0 && !vars.is_empty() {
            exps[vars[rng.gen_range(0..vars.len())]] += 1;
            left -= 1;
        }
        let n = loop {
            let n = rng.gen_range(-3i64..=3);
            if n != 0 {
                break n;
            }
        };
        acc = acc.add(&Poly::term(Monomial::from_exponents(&exps), rat(n, rng.gen_range(1..=2))));
    }
    ScalarExpr::from_poly(acc)
}

/// Polynomial in all chart variables.
pub fn scalar<R: Rng>(rng: &mut R, chart: &Chart, max_degree: u32, max_terms: usize) -> ScalarExpr {
    let vars: Vec<usize> = (0..chart.dim()).collect();
    polynomial(rng, chart.dim(), &vars, max_degree, max_terms)
}

fn index_tuple<R: Rng>(rng: &mut R, dim: usize, degree: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..dim).collect();
    for i in 0..degree {
        let j = rng.gen_range(i..dim);
        all.swap(i, j);
    }
    let mut idx = all[..degree].to_vec();
    idx.sort_unstable();
    idx
}

fn terms<R: Rng>(rng: &mut R, chart: &Chart, degree: usize, max_degree: u32, max_terms: usize) -> Vec<(Vec<usize>, ScalarExpr)> {
    if degree > chart.dim() {
        return vec![];
    }
    (0..rng.gen_range(1..=max_terms.max(1)))
        .map(|_| (index_tuple(rng, chart.dim(), degree), nonzero_scalar(rng, chart, max_degree, 3)))
        .collect()
}

fn nonzero_scalar<R: Rng>(rng: &mut R, chart: &Chart, max_degree: u32, max_terms: usize) -> ScalarExpr {
    loop {
        let f = scalar(rng, chart, max_degree, max_terms);
        if !f.is_zero() {
            return f;
        }
    }
}

/// Multivector field of the given degree with polynomial coefficients.
pub fn multivector<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, max_degree: u32, max_terms: usize) -> Multivector {
    let t = terms(rng, chart, degree, max_degree, max_terms);
    let mut acc = Multivector::zero(chart, degree);
    for (idx, c) in t {
        let one = Multivector::from_terms(chart, degree, [(idx, c)]).expect("sorted indices");
        acc = acc.add(&one).expect("same chart");
    }
    acc
}

/// Differential form of the given degree with polynomial coefficients.
pub fn form<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, max_degree: u32, max_terms: usize) -> DiffForm {
    let t = terms(rng, chart, degree, max_degree, max_terms);
    let mut acc = DiffForm::zero(chart, degree);
    for (idx, c) in t {
        let one = DiffForm::from_terms(chart, degree, [(idx, c)]).expect("sorted indices");
        acc = acc.add(&one).expect("same chart");
    }
    acc
}

/// Closed form `dβ` of the given degree (at least 1).
pub fn closed_form<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, max_degree: u32, max_terms: usize) -> DiffForm {
    form(rng, chart, degree - 1, max_degree + 1, max_terms).exterior_derivative()
}

/// Plane chart `x, y` carrying `π = p ∂x∧∂y` and the scalar triple
/// `θ = dh`, `U = f·Id`, `λ0 = −f π`, `V = π♯θ`, `Z = 0`, with `p`, `f`
/// of degree at most `max_degree` and `θ` of degree at most `max_degree`.
///
/// Every such triple satisfies the structure equations.
pub fn scalar_codim1_triple<R: Rng>(rng: &mut R, max_degree: u32) -> Codim1Triple {
    let c = Chart::new(&["x", "y"]);
    let p = scalar(rng, &c, max_degree, 3);
    let h = scalar(rng, &c, max_degree + 1, 3);
    let f = scalar(rng, &c, max_degree, 3);
    scalar_triple_from(&c, p, h, f).expect("scalar triples are valid")
}

/// The same family with `U = 0`: an abelian triple with closed `θ`.
pub fn abelian_codim1_triple<R: Rng>(rng: &mut R, max_degree: u32) -> Codim1Triple {
    let c = Chart::new(&["x", "y"]);
    let p = scalar(rng, &c, max_degree, 3);
    let h = scalar(rng, &c, max_degree + 1, 3);
    scalar_triple_from(&c, p, h, ScalarExpr::zero()).expect("scalar triples are valid")
}

fn scalar_triple_from(c: &Arc<Chart>, p: ScalarExpr, h: ScalarExpr, f: ScalarExpr) -> Result<Codim1Triple, CouplingError> {
    let n = c.dim();
    let pi = Multivector::bivector(c, &[(0, 1, p)])?;
    let theta = DiffForm::differential(c, &h);
    let u = (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.clone() } else { ScalarExpr::zero() }).collect())
        .collect();
    let v = pi.sharp(&theta)?;
    let lambda0 = pi.scale(&-f);
    Codim1Triple::new(pi, v, lambda0, theta, Multivector::zero(c, 1), u)
}

/// Structure constants `c[a][b][c]` of a small real Lie algebra, chosen
/// among abelian, affine, Heisenberg, so(3) and sl(2).
pub fn lie_algebra<R: Rng>(rng: &mut R) -> Vec<Vec<Section>> {
    let set = |s: &mut Vec<Vec<Section>>, a: usize, b: usize, c: usize, k: i64| {
        s[a][b][c] = ScalarExpr::int(k);
        s[b][a][c] = ScalarExpr::int(-k);
    };
    let empty = |r: usize| vec![vec![vec![ScalarExpr::zero(); r]; r]; r];
    match rng.gen_range(0..5) {
        0 => empty(rng.gen_range(1..=2)),
        1 => {
            let mut s = empty(2);
            set(&mut s, 0, 1, 1, 1);
            s
        }
        2 => {
            let mut s = empty(3);
            set(&mut s, 0, 1, 2, 1);
            s
        }
        3 => {
            let mut s = empty(3);
            set(&mut s, 0, 1, 2, 1);
            set(&mut s, 1, 2, 0, 1);
            set(&mut s, 2, 0, 1, 1);
            s
        }
        _ => {
            // h, e, f
            let mut s = empty(3);
            set(&mut s, 0, 1, 1, 2);
            set(&mut s, 0, 2, 2, -2);
            set(&mut s, 1, 2, 0, 1);
            s
        }
    }
}

/// A first-order Poisson jet: base plane `x, y` with `p ∂x∧∂y` times the
/// linear Poisson structure of a random Lie algebra on normal coordinates
/// `z1, ..`, along `{z = 0}`.
pub fn product_jet<R: Rng>(rng: &mut R, max_degree: u32) -> (Multivector, Submanifold) {
    let structure = lie_algebra(rng);
    let r = structure.len();
    let mut names = vec!["x".to_string(), "y".to_string()];
    names.extend((1..=r).map(|a| format!("z{a}")));
    let c = Chart::new(&names);
    let base_vars = [0, 1];
    let p = polynomial(rng, c.dim(), &base_vars, max_degree, 3);
    let mut entries = vec![(0, 1, p)];
    for a in 0..r {
        for b in a + 1..r {
            let mut coeff = ScalarExpr::zero();
            for (k, ck) in structure[a][b].iter().enumerate() {
                coeff = coeff + ck * &ScalarExpr::var(2 + k);
            }
            entries.push((2 + a, 2 + b, coeff));
        }
    }
    let pi = Multivector::bivector(&c, &entries).expect("valid indices");
    let normal: Vec<usize> = (2..2 + r).collect();
    let s = Submanifold::new(&c, &normal).expect("valid normal indices");
    (pi, s)
}

/// Bivector whose coefficients all lie in the square of the vanishing ideal
/// of `s`: adding it does not change the first-order jet.
pub fn second_order_noise<R: Rng>(rng: &mut R, s: &Submanifold, max_terms: usize) -> Multivector {
    let c = s.chart().clone();
    let normal = s.normal().to_vec();
    let mut acc = Multivector::zero(&c, 2);
    if normal.is_empty() {
        return acc;
    }
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let a = ScalarExpr::var(normal[rng.gen_range(0..normal.len())]);
        let b = ScalarExpr::var(normal[rng.gen_range(0..normal.len())]);
        let g = &(&a * &b) * &scalar(rng, &c, 1, 2);
        let idx = index_tuple(rng, c.dim(), 2);
        let one = Multivector::from_terms(&c, 2, [(idx, g)]).expect("sorted indices");
        acc = acc.add(&one).expect("same chart");
    }
    acc
}
