//! Fiber-scaling homotopy operator on polynomial forms over a vector-bundle chart.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Chart, ScalarExpr, Symbol};
use crate::geom::{DiffForm, GeomError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("a bundle chart needs at least one fiber coordinate")]
    EmptyFiber,
    #[error("fiber index {0} is outside the chart")]
    BadFiber(usize),
    #[error("coefficient is not polynomial in the fiber: {0}")]
    NonPolynomial(String),
    #[error("form has degree 0")]
    DegreeZero,
    #[error("form is not closed: d(alpha) = {0}")]
    NotClosed(String),
    #[error("form does not vanish on the zero section: {0}")]
    NonzeroRestriction(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A chart with designated fiber coordinates; the Euler field `Σ z_a ∂z_a` is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleChart {
    chart: Arc<Chart>,
    fiber: Vec<usize>,
}

impl BundleChart {
    pub fn new(chart: &Arc<Chart>, fiber: &[usize]) -> Result<Self, HomotopyError> {
        let mut fiber = fiber.to_vec();
        fiber.sort_unstable();
        fiber.dedup();
        if fiber.is_empty() {
            return Err(HomotopyError::EmptyFiber);
        }
        if let Some(&i) = fiber.iter().find(|&&i| i >= chart.dim()) {
            return Err(HomotopyError::BadFiber(i));
        }
        Ok(BundleChart {
            chart: chart.clone(),
            fiber,
        })
    }

    /// Uses the chart's own base/fiber split.
    pub fn from_split(chart: &Arc<Chart>) -> Result<Self, HomotopyError> {
        BundleChart::new(chart, &chart.fiber_indices())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }

    pub fn is_fiber(&self, i: usize) -> bool {
        self.fiber.binary_search(&i).is_ok()
    }

    fn fiber_degree(&self, m: &crate::expr::Monomial) -> u32 {
        self.fiber.iter().map(|&i| m.var_exponent(i)).sum()
    }

    fn check_coeff(&self, c: &ScalarExpr) -> Result<(), HomotopyError> {
        let fiber_free_den = c.denominator().symbols().iter().all(|s| match s {
            Symbol::Var(i) => !self.is_fiber(*i),
            _ => false,
        });
        if !c.is_rational() || !fiber_free_den {
            return Err(HomotopyError::NonPolynomial(c.to_string_with(self.chart.names())));
        }
        Ok(())
    }
}

fn accumulate(out: &mut BTreeMap<Vec<usize>, ScalarExpr>, idx: Vec<usize>, c: ScalarExpr) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(idx).or_insert_with(ScalarExpr::zero);
    *e = &*e + &c;
}

fn form_from(chart: &Arc<Chart>, degree: usize, terms: BTreeMap<Vec<usize>, ScalarExpr>) -> Result<DiffForm, GeomError> {
    DiffForm::from_terms(chart, degree, terms.into_iter().filter(|(_, c)| !c.is_zero()))
}

/// `H(α) = ∫₀¹ λ⁻¹ m_λ*(i_Y α) dλ`, integrated termwise: a monomial of
/// fiber degree `d` and fiber form degree `j` picks up `1/(d + j)`.
pub fn homotopy_operator(alpha: &DiffForm, b: &BundleChart) -> Result<DiffForm, HomotopyError> {
    if alpha.chart() != b.chart() {
        return Err(GeomError::ChartMismatch.into());
    }
    let k = alpha.degree();
    if k == 0 {
        return Ok(DiffForm::zero(b.chart(), 0));
    }
    let mut out = BTreeMap::new();
    for (idx, c) in alpha.terms() {
        b.check_coeff(c)?;
        let j = idx.iter().filter(|&&i| b.is_fiber(i)).count() as u32;
        for (pos, &a) in idx.iter().enumerate() {
            if !b.is_fiber(a) {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(pos);
            // i_Y(z-coefficient) raises fiber degree by one and lowers j by one
            let num = c.numerator().mul(&crate::expr::Poly::var(a));
            let scaled = num.map_terms(|m, q| {
                let w = b.fiber_degree(m) + j - 1;
                (m.clone(), q / big(w))
            });
            let mut term = ScalarExpr::ratio(scaled, c.denominator().clone()).expect("denominator is nonzero");
            if pos % 2 == 1 {
                term = -term;
            }
            accumulate(&mut out, rest, term);
        }
    }
    Ok(form_from(b.chart(), k - 1, out)?)
}

fn big(w: u32) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(w.into())
}

/// `(i∘P)*`: set the fiber coordinates to zero and drop every `dz`.
pub fn projection_pullback(alpha: &DiffForm, b: &BundleChart) -> Result<DiffForm, HomotopyError> {
    if alpha.chart() != b.chart() {
        return Err(GeomError::ChartMismatch.into());
    }
    let mut out = BTreeMap::new();
    for (idx, c) in alpha.terms() {
        if idx.iter().any(|&i| b.is_fiber(i)) {
            continue;
        }
        let r = c
            .substitute(&|i| if b.is_fiber(i) { ScalarExpr::zero() } else { ScalarExpr::var(i) })
            .map_err(GeomError::from)?;
        accumulate(&mut out, idx.clone(), r);
    }
    Ok(form_from(b.chart(), alpha.degree(), out)?)
}

/// A primitive `β` with `dβ = α` vanishing on the zero section, for a closed
/// polynomial form whose pullback to the zero section is zero.
pub fn homotopy_primitive(alpha: &DiffForm, b: &BundleChart) -> Result<DiffForm, HomotopyError> {
    if alpha.degree() == 0 {
        return Err(HomotopyError::DegreeZero);
    }
    for c in alpha.terms().values() {
        b.check_coeff(c)?;
    }
    let names = b.chart().names();
    let d = alpha.exterior_derivative();
    if !d.is_zero() {
        return Err(HomotopyError::NotClosed(render(&d, names)));
    }
    let r = projection_pullback(alpha, b)?;
    if !r.is_zero() {
        return Err(HomotopyError::NonzeroRestriction(render(&r, names)));
    }
    homotopy_operator(alpha, b)
}

/// `c·dx∧dy + …` with chart names.
pub fn render(f: &DiffForm, names: &[String]) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.terms()
        .iter()
        .map(|(idx, c)| {
            let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
            if basis.is_empty() {
                format!("({})", c.to_string_with(names))
            } else {
                format!("({})*{}", c.to_string_with(names), basis.join("^"))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
