//! Multivector fields and differential forms on a chart.
//!
//! Both are stored as sparse tables from strictly increasing index tuples to
//! coefficients. Internally they are treated as polynomials in odd generators
//! (`∂_i` for multivectors, `dx^i` for forms), which fixes every sign: the
//! interior product of a covector into a multivector is the left derivative
//! with respect to the odd generator, i.e. it contracts the first slot, so
//! `π♯(α) = i_α π` and `π♯(dx) = ∂y` for `π = ∂x∧∂y`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Chart, ExprError, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("index tuple {0:?} is not strictly increasing or out of range")]
    BadIndices(Vec<usize>),
    #[error("expected degree {expected}, got {got}")]
    Degree { expected: usize, got: usize },
    #[error("expected {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

type Terms = BTreeMap<Vec<usize>, ScalarExpr>;

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), GeomError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(GeomError::ChartMismatch)
    }
}

fn check_indices(idx: &[usize], dim: usize) -> Result<(), GeomError> {
    let ok = idx.windows(2).all(|w| w[0] < w[1]) && idx.iter().all(|&i| i < dim);
    if ok {
        Ok(())
    } else {
        Err(GeomError::BadIndices(idx.to_vec()))
    }
}

fn insert(terms: &mut Terms, idx: Vec<usize>, c: ScalarExpr) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(idx) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Sign of sorting an index list, or `None` if it has repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sign, v))
    }
}

/// Product of two odd monomials: sign and merged tuple, `None` on overlap.
fn merge(a: &[usize], b: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((if inversions % 2 == 0 { 1 } else { -1 }, out))
}

fn signed(c: &ScalarExpr, s: i32) -> ScalarExpr {
    if s < 0 {
        -c
    } else {
        c.clone()
    }
}

fn wedge_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (i, f) in a {
        for (j, g) in b {
            if let Some((s, k)) = merge(i, j) {
                insert(&mut out, k, signed(&(f * g), s));
            }
        }
    }
    out
}

/// Left derivative with respect to the odd generator `i`.
fn left_deriv(a: &Terms, i: usize) -> Terms {
    let mut out = Terms::new();
    for (idx, c) in a {
        if let Some(k) = idx.iter().position(|&j| j == i) {
            let mut rest = idx.clone();
            rest.remove(k);
            insert(&mut out, rest, signed(c, if k % 2 == 0 { 1 } else { -1 }));
        }
    }
    out
}

/// Right derivative with respect to the odd generator `i`.
fn right_deriv(a: &Terms, i: usize) -> Terms {
    let mut out = Terms::new();
    for (idx, c) in a {
        if let Some(k) = idx.iter().position(|&j| j == i) {
            let mut rest = idx.clone();
            rest.remove(k);
            let moves = idx.len() - 1 - k;
            insert(&mut out, rest, signed(c, if moves % 2 == 0 { 1 } else { -1 }));
        }
    }
    out
}

fn partial_terms(a: &Terms, i: usize) -> Terms {
    let mut out = Terms::new();
    for (idx, c) in a {
        insert(&mut out, idx.clone(), c.differentiate(i));
    }
    out
}

fn add_terms(a: &Terms, b: &Terms, sign: i32) -> Terms {
    let mut out = a.clone();
    for (idx, c) in b {
        insert(&mut out, idx.clone(), signed(c, sign));
    }
    out
}

fn scale_terms(a: &Terms, f: &ScalarExpr) -> Terms {
    let mut out = Terms::new();
    for (idx, c) in a {
        insert(&mut out, idx.clone(), c * f);
    }
    out
}

fn terms_from(
    dim: usize,
    degree: usize,
    entries: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
) -> Result<Terms, GeomError> {
    let mut out = Terms::new();
    for (idx, c) in entries {
        check_indices(&idx, dim)?;
        if idx.len() != degree {
            return Err(GeomError::Degree {
                expected: degree,
                got: idx.len(),
            });
        }
        insert(&mut out, idx, c);
    }
    Ok(out)
}

fn component(terms: &Terms, idx: &[usize]) -> ScalarExpr {
    match sort_sign(idx) {
        None => ScalarExpr::zero(),
        Some((s, k)) => terms
            .get(&k)
            .map(|c| signed(c, s))
            .unwrap_or_else(ScalarExpr::zero),
    }
}

macro_rules! graded_common {
    ($t:ident) => {
        impl $t {
            pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
                $t {
                    chart: chart.clone(),
                    degree,
                    terms: Terms::new(),
                }
            }

            /// Build from `(indices, coefficient)` pairs; indices must be strictly increasing.
            pub fn from_terms(
                chart: &Arc<Chart>,
                degree: usize,
                entries: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
            ) -> Result<Self, GeomError> {
                Ok($t {
                    chart: chart.clone(),
                    degree,
                    terms: terms_from(chart.dim(), degree, entries)?,
                })
            }

            /// Degree-0 object.
            pub fn scalar(chart: &Arc<Chart>, f: ScalarExpr) -> Self {
                let mut terms = Terms::new();
                insert(&mut terms, Vec::new(), f);
                $t {
                    chart: chart.clone(),
                    degree: 0,
                    terms,
                }
            }

            /// Degree-1 object from its components.
            pub fn from_components(chart: &Arc<Chart>, comps: Vec<ScalarExpr>) -> Result<Self, GeomError> {
                if comps.len() != chart.dim() {
                    return Err(GeomError::Arity {
                        expected: chart.dim(),
                        got: comps.len(),
                    });
                }
                $t::from_terms(chart, 1, comps.into_iter().enumerate().map(|(i, c)| (vec![i], c)))
            }

            /// Unit generator for coordinate `i`.
            pub fn basis(chart: &Arc<Chart>, i: usize) -> Self {
                let mut terms = Terms::new();
                insert(&mut terms, vec![i], ScalarExpr::one());
                $t {
                    chart: chart.clone(),
                    degree: 1,
                    terms,
                }
            }

            pub fn chart(&self) -> &Arc<Chart> {
                &self.chart
            }

            pub fn degree(&self) -> usize {
                self.degree
            }

            pub fn dim(&self) -> usize {
                self.chart.dim()
            }

            pub fn terms(&self) -> &BTreeMap<Vec<usize>, ScalarExpr> {
                &self.terms
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            /// Coefficient for any index order (antisymmetric; zero on repeats).
            pub fn component(&self, idx: &[usize]) -> ScalarExpr {
                component(&self.terms, idx)
            }

            /// Components of a degree-1 object as a dense vector.
            pub fn components(&self) -> Vec<ScalarExpr> {
                (0..self.dim()).map(|i| self.component(&[i])).collect()
            }

            /// Scalar value of a degree-0 object.
            pub fn scalar_value(&self) -> ScalarExpr {
                self.component(&[])
            }

            pub fn add(&self, other: &Self) -> Result<Self, GeomError> {
                self.combine(other, 1)
            }

            pub fn sub(&self, other: &Self) -> Result<Self, GeomError> {
                self.combine(other, -1)
            }

            fn combine(&self, other: &Self, sign: i32) -> Result<Self, GeomError> {
                same_chart(&self.chart, &other.chart)?;
                if self.is_zero() {
                    return Ok(if sign > 0 { other.clone() } else { other.neg() });
                }
                if other.is_zero() {
                    return Ok(self.clone());
                }
                if self.degree != other.degree {
                    return Err(GeomError::Degree {
                        expected: self.degree,
                        got: other.degree,
                    });
                }
                Ok($t {
                    chart: self.chart.clone(),
                    degree: self.degree,
                    terms: add_terms(&self.terms, &other.terms, sign),
                })
            }

            pub fn neg(&self) -> Self {
                self.scale(&ScalarExpr::int(-1))
            }

            /// Multiply every coefficient by a function.
            pub fn scale(&self, f: &ScalarExpr) -> Self {
                $t {
                    chart: self.chart.clone(),
                    degree: self.degree,
                    terms: scale_terms(&self.terms, f),
                }
            }

            pub fn wedge(&self, other: &Self) -> Result<Self, GeomError> {
                same_chart(&self.chart, &other.chart)?;
                Ok($t {
                    chart: self.chart.clone(),
                    degree: self.degree + other.degree,
                    terms: wedge_terms(&self.terms, &other.terms),
                })
            }

            /// Apply a coefficient-wise map; zero results are dropped.
            pub fn map_coeffs(
                &self,
                mut f: impl FnMut(&[usize], &ScalarExpr) -> Result<ScalarExpr, GeomError>,
            ) -> Result<Self, GeomError> {
                let mut terms = Terms::new();
                for (idx, c) in &self.terms {
                    insert(&mut terms, idx.clone(), f(idx, c)?);
                }
                Ok($t {
                    chart: self.chart.clone(),
                    degree: self.degree,
                    terms,
                })
            }

            /// Same coefficients on another chart of the same dimension.
            pub fn with_chart(&self, chart: &Arc<Chart>) -> Result<Self, GeomError> {
                if chart.dim() != self.dim() {
                    return Err(GeomError::ChartMismatch);
                }
                Ok($t {
                    chart: chart.clone(),
                    degree: self.degree,
                    terms: self.terms.clone(),
                })
            }

            /// Render coefficients with the chart's variable names.
            pub fn to_pairs(&self) -> Vec<(Vec<usize>, String)> {
                self.terms
                    .iter()
                    .map(|(i, c)| (i.clone(), c.to_string_with(self.chart.names())))
                    .collect()
            }

            /// Value at a numeric point as a dense table over index tuples.
            pub fn eval_terms(&self, point: &[f64]) -> Result<Vec<(Vec<usize>, f64)>, GeomError> {
                self.terms
                    .iter()
                    .map(|(i, c)| Ok((i.clone(), c.eval(point)?)))
                    .collect()
            }
        }
    };
}

/// Multivector field of degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multivector {
    chart: Arc<Chart>,
    degree: usize,
    terms: Terms,
}

/// Differential form of degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffForm {
    chart: Arc<Chart>,
    degree: usize,
    terms: Terms,
}

graded_common!(Multivector);
graded_common!(DiffForm);

fn require_degree(got: usize, expected: usize) -> Result<(), GeomError> {
    if got == expected {
        Ok(())
    } else {
        Err(GeomError::Degree { expected, got })
    }
}

impl Multivector {
    /// Bivector from coefficients `π^{ij}` for `i < j`.
    pub fn bivector(chart: &Arc<Chart>, entries: &[(usize, usize, ScalarExpr)]) -> Result<Self, GeomError> {
        let mut terms = Terms::new();
        for (i, j, c) in entries {
            match sort_sign(&[*i, *j]) {
                Some((s, k)) => {
                    check_indices(&k, chart.dim())?;
                    insert(&mut terms, k, signed(c, s));
                }
                None => return Err(GeomError::BadIndices(vec![*i, *j])),
            }
        }
        Ok(Multivector {
            chart: chart.clone(),
            degree: 2,
            terms,
        })
    }

    /// Schouten–Nijenhuis bracket.
    ///
    /// `[A,B] = Σ_i (A ←∂_{ξ_i})(∂_i B) − (−1)^{(p−1)(q−1)} (B ←∂_{ξ_i})(∂_i A)`,
    /// which is the Lie bracket on vector fields and gives
    /// `[π,π](df,dg,dh) = 2({f,{g,h}} + cyclic)` on bivectors.
    pub fn schouten(&self, other: &Multivector) -> Result<Multivector, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        let (p, q) = (self.degree, other.degree);
        let mut out = Terms::new();
        if p + q == 0 {
            return Ok(Multivector::zero(&self.chart, 0));
        }
        let sign = if ((p as i64 - 1) * (q as i64 - 1)).rem_euclid(2) == 0 { -1 } else { 1 };
        for i in 0..self.dim() {
            if p > 0 {
                let ra = right_deriv(&self.terms, i);
                if !ra.is_empty() {
                    let db = partial_terms(&other.terms, i);
                    out = add_terms(&out, &wedge_terms(&ra, &db), 1);
                }
            }
            if q > 0 {
                let rb = right_deriv(&other.terms, i);
                if !rb.is_empty() {
                    let da = partial_terms(&self.terms, i);
                    out = add_terms(&out, &wedge_terms(&rb, &da), sign);
                }
            }
        }
        Ok(Multivector {
            chart: self.chart.clone(),
            degree: (p + q).saturating_sub(1),
            terms: out,
        })
    }

    /// Interior product `i_α A` of a 1-form, contracting the first slot.
    pub fn contract(&self, alpha: &DiffForm) -> Result<Multivector, GeomError> {
        same_chart(&self.chart, &alpha.chart)?;
        require_degree(alpha.degree, 1)?;
        let mut out = Terms::new();
        for (idx, a) in &alpha.terms {
            out = add_terms(&out, &scale_terms(&left_deriv(&self.terms, idx[0]), a), 1);
        }
        Ok(Multivector {
            chart: self.chart.clone(),
            degree: self.degree.saturating_sub(1),
            terms: out,
        })
    }

    /// `π♯(α) = i_α π`.
    pub fn sharp(&self, alpha: &DiffForm) -> Result<Multivector, GeomError> {
        require_degree(self.degree, 2)?;
        self.contract(alpha)
    }

    /// `A(α₁, …, α_p)`, contracting the forms in order.
    pub fn evaluate(&self, forms: &[&DiffForm]) -> Result<ScalarExpr, GeomError> {
        require_degree(forms.len(), self.degree)?;
        let mut cur = self.clone();
        for f in forms {
            cur = cur.contract(f)?;
        }
        Ok(cur.scalar_value())
    }

    /// `π(α, β)`.
    pub fn pair(&self, alpha: &DiffForm, beta: &DiffForm) -> Result<ScalarExpr, GeomError> {
        self.evaluate(&[alpha, beta])
    }

    /// Vector field applied to a function.
    pub fn apply(&self, f: &ScalarExpr) -> Result<ScalarExpr, GeomError> {
        require_degree(self.degree, 1)?;
        let mut acc = ScalarExpr::zero();
        for (idx, c) in &self.terms {
            acc = acc + c * f.differentiate(idx[0]);
        }
        Ok(acc)
    }

    /// Coefficient matrix `M[i][j] = π(dx^i, dx^j)` of a bivector.
    pub fn matrix(&self) -> Result<Vec<Vec<ScalarExpr>>, GeomError> {
        require_degree(self.degree, 2)?;
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.component(&[i, j])).collect())
            .collect())
    }

    /// Bivector from an antisymmetric matrix (upper triangle is read).
    pub fn from_matrix(chart: &Arc<Chart>, m: &[Vec<ScalarExpr>]) -> Result<Self, GeomError> {
        let n = chart.dim();
        if m.len() != n {
            return Err(GeomError::Arity {
                expected: n,
                got: m.len(),
            });
        }
        let mut entries = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for (j, c) in row.iter().enumerate().skip(i + 1) {
                entries.push((vec![i, j], c.clone()));
            }
        }
        Multivector::from_terms(chart, 2, entries)
    }
}

impl DiffForm {
    /// Exact differential of a function.
    pub fn differential(chart: &Arc<Chart>, f: &ScalarExpr) -> DiffForm {
        let mut terms = Terms::new();
        for i in 0..chart.dim() {
            insert(&mut terms, vec![i], f.differentiate(i));
        }
        DiffForm {
            chart: chart.clone(),
            degree: 1,
            terms,
        }
    }

    /// De Rham differential `d = Σ dx^i ∧ ∂_i`.
    pub fn exterior_derivative(&self) -> DiffForm {
        let mut out = Terms::new();
        for i in 0..self.dim() {
            let di = partial_terms(&self.terms, i);
            let mut gen = Terms::new();
            gen.insert(vec![i], ScalarExpr::one());
            out = add_terms(&out, &wedge_terms(&gen, &di), 1);
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree + 1,
            terms: out,
        }
    }

    /// Interior product `i_X α`, contracting the first slot.
    pub fn interior(&self, x: &Multivector) -> Result<DiffForm, GeomError> {
        same_chart(&self.chart, &x.chart)?;
        require_degree(x.degree, 1)?;
        let mut out = Terms::new();
        for (idx, a) in &x.terms {
            out = add_terms(&out, &scale_terms(&left_deriv(&self.terms, idx[0]), a), 1);
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree.saturating_sub(1),
            terms: out,
        })
    }

    /// Lie derivative by Cartan's formula `𝓛_X = i_X d + d i_X`.
    pub fn lie_derivative(&self, x: &Multivector) -> Result<DiffForm, GeomError> {
        let a = self.exterior_derivative().interior(x)?;
        if self.degree == 0 {
            return Ok(a);
        }
        let b = self.interior(x)?.exterior_derivative();
        a.add(&b)
    }

    /// `α(X₁, …, X_k)`, contracting the vector fields in order.
    pub fn evaluate(&self, fields: &[&Multivector]) -> Result<ScalarExpr, GeomError> {
        require_degree(fields.len(), self.degree)?;
        let mut cur = self.clone();
        for x in fields {
            cur = cur.interior(x)?;
        }
        Ok(cur.scalar_value())
    }

    /// Pullback along a smooth map whose target chart carries this form.
    pub fn pullback(&self, phi: &SmoothMap) -> Result<DiffForm, GeomError> {
        same_chart(&self.chart, &phi.target)?;
        let src = &phi.source;
        let dphi: Vec<DiffForm> = phi
            .components
            .iter()
            .map(|c| DiffForm::differential(src, c))
            .collect();
        let mut out = DiffForm::zero(src, self.degree);
        for (idx, c) in &self.terms {
            let mut term = DiffForm::scalar(src, phi.compose_scalar(c)?);
            for &j in idx {
                term = term.wedge(&dphi[j])?;
            }
            out = out.add(&term)?;
        }
        out.degree = self.degree;
        Ok(out)
    }
}

/// Cotangent bracket `[α,β]_π = 𝓛_{π♯α}β − 𝓛_{π♯β}α − d(π(α,β))`.
pub fn cotangent_bracket(alpha: &DiffForm, beta: &DiffForm, pi: &Multivector) -> Result<DiffForm, GeomError> {
    same_chart(&alpha.chart, &pi.chart)?;
    same_chart(&beta.chart, &pi.chart)?;
    require_degree(alpha.degree, 1)?;
    require_degree(beta.degree, 1)?;
    let pa = pi.sharp(alpha)?;
    let pb = pi.sharp(beta)?;
    let f = pi.pair(alpha, beta)?;
    beta.lie_derivative(&pa)?
        .sub(&alpha.lie_derivative(&pb)?)?
        .sub(&DiffForm::differential(&pi.chart, &f))
}

/// A map between charts given by one expression per target coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    components: Vec<ScalarExpr>,
}

impl SmoothMap {
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<Self, GeomError> {
        if components.len() != target.dim() {
            return Err(GeomError::Arity {
                expected: target.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            if let Some(i) = c.max_var() {
                if i >= source.dim() {
                    return Err(GeomError::Expr(ExprError::VariableOutOfRange(i)));
                }
            }
        }
        Ok(SmoothMap {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        SmoothMap {
            source: chart.clone(),
            target: chart.clone(),
            components: (0..chart.dim()).map(ScalarExpr::var).collect(),
        }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    /// `f ∘ self` for a function `f` on the target chart.
    pub fn compose_scalar(&self, f: &ScalarExpr) -> Result<ScalarExpr, GeomError> {
        let comps = &self.components;
        Ok(f.substitute(&|j| comps[j].clone())?)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SmoothMap) -> Result<SmoothMap, GeomError> {
        same_chart(&self.target, &other.source)?;
        let components = other
            .components
            .iter()
            .map(|c| self.compose_scalar(c))
            .collect::<Result<_, _>>()?;
        Ok(SmoothMap {
            source: self.source.clone(),
            target: other.target.clone(),
            components,
        })
    }

    /// Numeric value and pushforward of a tangent vector.
    pub fn eval_dual(&self, point: &[f64], tangent: &[f64]) -> Result<(Vec<f64>, Vec<f64>), GeomError> {
        let mut v = Vec::with_capacity(self.components.len());
        let mut d = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let r = c.eval_dual(point, tangent)?;
            v.push(r.re);
            d.push(r.eps);
        }
        Ok((v, d))
    }
}

#[cfg(test)]
mod tests;
