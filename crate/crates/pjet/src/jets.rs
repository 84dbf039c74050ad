//! Coordinate submanifolds, vanishing ideals and first-order jets.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::expr::{Chart, ExprError, ScalarExpr};
use crate::geom::{GeomError, Multivector};
use crate::par;
use crate::report::CheckRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("coefficient is not polynomial: {0}")]
    NonPolynomial(String),
    #[error("not tangent to the submanifold: component {indices:?} has coefficient {coeff} outside the vanishing ideal")]
    NotTangent { indices: Vec<usize>, coeff: String },
    #[error("unknown normal variable `{0}`")]
    UnknownVariable(String),
    #[error("bivector is not Poisson up to second order along the submanifold")]
    NotSecondOrder,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `S = {z = 0}` for a set of normal coordinates `z` of a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submanifold {
    chart: Arc<Chart>,
    normal: Vec<usize>,
    base_chart: Arc<Chart>,
}

impl Submanifold {
    pub fn new(chart: &Arc<Chart>, normal: &[usize]) -> Result<Self, JetError> {
        let mut normal = normal.to_vec();
        normal.sort_unstable();
        normal.dedup();
        if let Some(&i) = normal.iter().find(|&&i| i >= chart.dim()) {
            return Err(JetError::UnknownVariable(format!("#{i}")));
        }
        let base: Vec<&str> = (0..chart.dim())
            .filter(|i| !normal.contains(i))
            .map(|i| chart.name(i))
            .collect();
        Ok(Submanifold {
            chart: chart.clone(),
            normal,
            base_chart: Chart::new(&base),
        })
    }

    pub fn from_names<S: AsRef<str>>(chart: &Arc<Chart>, names: &[S]) -> Result<Self, JetError> {
        let idx = names
            .iter()
            .map(|n| {
                chart
                    .index_of(n.as_ref())
                    .ok_or_else(|| JetError::UnknownVariable(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Submanifold::new(chart, &idx)
    }

    /// The whole chart (no normal directions).
    pub fn whole(chart: &Arc<Chart>) -> Self {
        Submanifold::new(chart, &[]).expect("empty normal set")
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn normal(&self) -> &[usize] {
        &self.normal
    }

    pub fn is_normal(&self, i: usize) -> bool {
        self.normal.binary_search(&i).is_ok()
    }

    pub fn base(&self) -> Vec<usize> {
        (0..self.chart.dim()).filter(|i| !self.is_normal(*i)).collect()
    }

    /// Chart of `S` with the base variables in their original order.
    pub fn base_chart(&self) -> &Arc<Chart> {
        &self.base_chart
    }

    /// Restriction to `S`, written in the base chart's variables.
    pub fn restrict(&self, e: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        let base = self.base();
        let pos: Vec<Option<usize>> = (0..self.chart.dim())
            .map(|i| base.iter().position(|&b| b == i))
            .collect();
        e.substitute(&|j| match pos[j] {
            Some(k) => ScalarExpr::var(k),
            None => ScalarExpr::zero(),
        })
    }

    /// Restriction to `S`, kept in the ambient chart's variables.
    pub fn restrict_ambient(&self, e: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        let normal = &self.normal;
        e.substitute(&|j| {
            if normal.binary_search(&j).is_ok() {
                ScalarExpr::zero()
            } else {
                ScalarExpr::var(j)
            }
        })
    }

    /// Pull an expression on `S` back to the ambient chart.
    pub fn extend(&self, e: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        let base = self.base();
        e.substitute(&|k| ScalarExpr::var(base[k]))
    }

    fn normal_degree(&self, m: &crate::expr::Monomial) -> u32 {
        self.normal.iter().map(|&i| m.var_exponent(i)).sum()
    }
}

/// Exact test for membership in `I_S^k`.
///
/// Polynomials: every monomial has normal degree at least `k`. Quotients
/// whose denominator does not vanish identically on `S` are units near `S`,
/// so the numerator is tested instead.
pub fn ideal_membership(e: &ScalarExpr, s: &Submanifold, k: u32) -> Result<bool, JetError> {
    if !e.is_rational() {
        return Err(JetError::NonPolynomial(e.to_string_with(s.chart.names())));
    }
    if k == 0 || e.is_zero() {
        return Ok(true);
    }
    if !e.denominator().is_one() {
        let d = ScalarExpr::from_poly(e.denominator().clone());
        if s.restrict_ambient(&d)?.is_zero() {
            return Err(JetError::NonPolynomial(e.to_string_with(s.chart.names())));
        }
    }
    Ok(e.numerator().terms().all(|(m, _)| s.normal_degree(m) >= k))
}

/// Sampled necessary condition for `I_S^k` membership: the coefficient and its
/// normal derivatives of order `< k` vanish at random points of `S`.
pub fn ideal_membership_numeric(
    e: &ScalarExpr,
    s: &Submanifold,
    k: u32,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(bool, f64), JetError> {
    let mut derivs = vec![e.clone()];
    let mut frontier = vec![e.clone()];
    for _ in 1..k {
        let mut next = Vec::new();
        for f in &frontier {
            for &a in s.normal() {
                next.push(f.differentiate(a));
            }
        }
        derivs.extend(next.iter().cloned());
        frontier = next;
    }
    let mut rng = par::rng(seed, 0);
    let mut worst = 0.0f64;
    let n = s.chart.dim();
    for _ in 0..samples {
        let mut pt = vec![0.0; n];
        for i in s.base() {
            pt[i] = rng.gen_range(-1.0..1.0);
        }
        for d in &derivs {
            match d.eval(&pt) {
                Ok(v) => worst = worst.max(v.abs()),
                Err(ExprError::Pole) => continue,
                Err(err) => return Err(err.into()),
            }
        }
    }
    Ok((worst <= tol, worst))
}

/// A multivector reduced modulo `I_S²`, tangent to `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetClass {
    sub: Submanifold,
    rep: Multivector,
}

impl JetClass {
    pub fn submanifold(&self) -> &Submanifold {
        &self.sub
    }

    pub fn representative(&self) -> &Multivector {
        &self.rep
    }
}

/// Check that every component with a normal index has coefficient in `I_S`.
pub fn check_tangent(theta: &Multivector, s: &Submanifold) -> Result<(), JetError> {
    for (idx, c) in theta.terms() {
        if idx.iter().any(|&i| s.is_normal(i)) && !ideal_membership(c, s, 1)? {
            return Err(JetError::NotTangent {
                indices: idx.clone(),
                coeff: c.to_string_with(s.chart.names()),
            });
        }
    }
    Ok(())
}

/// First-order Taylor part in the normal variables: `c|_S + Σ z_a ∂_a c|_S`.
/// Quotients are expanded this way too; elementary functions are refused.
fn truncate_coeff(c: &ScalarExpr, s: &Submanifold) -> Result<ScalarExpr, JetError> {
    if !c.is_rational() {
        return Err(JetError::NonPolynomial(c.to_string_with(s.chart.names())));
    }
    if let Some(p) = c.as_poly() {
        return Ok(ScalarExpr::from_poly(p.filter(|m| s.normal_degree(m) <= 1)));
    }
    let mut out = s.restrict_ambient(c)?;
    for &a in s.normal() {
        let d = s.restrict_ambient(&c.differentiate(a))?;
        out = out + ScalarExpr::var(a) * d;
    }
    Ok(out)
}

/// Drop everything of normal degree ≥ 2.
pub fn jet_truncate(theta: &Multivector, s: &Submanifold) -> Result<JetClass, JetError> {
    if theta.chart() != s.chart() {
        return Err(GeomError::ChartMismatch.into());
    }
    check_tangent(theta, s)?;
    let mut terms = Vec::with_capacity(theta.terms().len());
    for (idx, c) in theta.terms() {
        terms.push((idx.clone(), truncate_coeff(c, s)?));
    }
    let rep = Multivector::from_terms(theta.chart(), theta.degree(), terms)?;
    Ok(JetClass {
        sub: s.clone(),
        rep,
    })
}

/// Result of the "Poisson up to second order" test.
#[derive(Debug, Clone)]
pub struct SecondOrder {
    pub record: CheckRecord,
    pub schouten: Multivector,
    /// Components of `[π,π]` outside `I_S²`.
    pub offending: Vec<(Vec<usize>, ScalarExpr)>,
}

impl SecondOrder {
    pub fn passed(&self) -> bool {
        self.record.passed()
    }
}

/// `[π,π] ∈ I_S²·𝔛³`. Rational coefficients are decided exactly; anything
/// with elementary functions goes through the sampled test.
pub fn check_second_order(pi: &Multivector, s: &Submanifold) -> Result<SecondOrder, JetError> {
    check_second_order_with(pi, s, 64, 0, 1e-9)
}

pub fn check_second_order_with(
    pi: &Multivector,
    s: &Submanifold,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SecondOrder, JetError> {
    if pi.chart() != s.chart() {
        return Err(GeomError::ChartMismatch.into());
    }
    if pi.degree() != 2 {
        return Err(GeomError::Degree {
            expected: 2,
            got: pi.degree(),
        }
        .into());
    }
    check_tangent_any(pi, s, samples, seed, tol)?;
    let sq = pi.schouten(pi)?;
    let names = s.chart.names();
    let exact = sq.terms().values().all(ScalarExpr::is_rational);
    let mut offending = Vec::new();
    let record = if exact {
        for (idx, c) in sq.terms() {
            if !ideal_membership(c, s, 2)? {
                offending.push((idx.clone(), c.clone()));
            }
        }
        CheckRecord::exact("second_order", render(&offending, names))
    } else {
        let mut worst = 0.0f64;
        for (k, (idx, c)) in sq.terms().iter().enumerate() {
            let (ok, w) = ideal_membership_numeric(c, s, 2, samples, seed.wrapping_add(k as u64), tol)?;
            worst = worst.max(w);
            if !ok {
                offending.push((idx.clone(), c.clone()));
            }
        }
        CheckRecord::numeric("second_order", offending.is_empty(), worst, samples, render(&offending, names))
    };
    Ok(SecondOrder {
        record,
        schouten: sq,
        offending,
    })
}

fn check_tangent_any(pi: &Multivector, s: &Submanifold, samples: usize, seed: u64, tol: f64) -> Result<(), JetError> {
    for (idx, c) in pi.terms() {
        if !idx.iter().any(|&i| s.is_normal(i)) {
            continue;
        }
        let ok = if c.is_rational() {
            ideal_membership(c, s, 1)?
        } else {
            ideal_membership_numeric(c, s, 1, samples, seed, tol)?.0
        };
        if !ok {
            return Err(JetError::NotTangent {
                indices: idx.clone(),
                coeff: c.to_string_with(s.chart.names()),
            });
        }
    }
    Ok(())
}

/// Render `(indices, coefficient)` pairs as `c·∂i∧∂j` strings.
pub fn render(items: &[(Vec<usize>, ScalarExpr)], names: &[String]) -> Vec<String> {
    items
        .iter()
        .map(|(idx, c)| {
            let parts: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
            format!("({})*{}", c.to_string_with(names), parts.join("^"))
        })
        .collect()
}

/// Exact check that a bivector is Poisson.
pub fn check_poisson(pi: &Multivector) -> Result<(CheckRecord, Multivector), GeomError> {
    let sq = pi.schouten(pi)?;
    let items: Vec<_> = sq.terms().iter().map(|(i, c)| (i.clone(), c.clone())).collect();
    Ok((CheckRecord::exact("jacobi", render(&items, pi.chart().names())), sq))
}
