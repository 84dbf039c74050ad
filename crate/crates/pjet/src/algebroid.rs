//! Anchored-bracket data over a chart in a fixed frame: the restricted
//! cotangent algebroid of a first-order jet, its IM form, and connections.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{Chart, ExprError, ScalarExpr};
use crate::geom::{cotangent_bracket, DiffForm, GeomError, Multivector};
use crate::jets::{check_second_order, JetClass, JetError};
use crate::report::{CheckRecord, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebroidError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("structure functions not antisymmetric in ({a},{b}) for component {c}")]
    NotAntisymmetric { a: usize, b: usize, c: usize },
    #[error("algebroid carries no IM form")]
    MissingIm,
    #[error("splitting is not the identity on its kernel columns")]
    BadSplitting,
    #[error("frame change matrix is singular")]
    Singular,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A section in the frame: one coefficient per frame element.
pub type Section = Vec<ScalarExpr>;
/// A vector field on the base: one coefficient per base coordinate.
pub type Field = Vec<ScalarExpr>;

fn zeros(n: usize) -> Vec<ScalarExpr> {
    vec![ScalarExpr::zero(); n]
}

fn axpy(acc: &mut [ScalarExpr], k: &ScalarExpr, v: &[ScalarExpr]) {
    if k.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a = &*a + &(k * b);
        }
    }
}

fn sub(a: &[ScalarExpr], b: &[ScalarExpr]) -> Vec<ScalarExpr> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `X(f)` for a coordinate vector field.
pub fn apply_field(x: &[ScalarExpr], f: &ScalarExpr) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            acc = acc + xi * f.differentiate(i);
        }
    }
    acc
}

/// Lie bracket of coordinate vector fields.
pub fn field_bracket(x: &[ScalarExpr], y: &[ScalarExpr]) -> Field {
    (0..x.len())
        .map(|j| apply_field(x, &y[j]) - apply_field(y, &x[j]))
        .collect()
}

fn all_zero(v: &[ScalarExpr]) -> bool {
    v.iter().all(ScalarExpr::is_zero)
}

/// `(ρ, [·,·], μ)` on a trivialized bundle of rank `r` over a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebroidData {
    chart: Arc<Chart>,
    labels: Vec<String>,
    anchor: Vec<Field>,
    // structure[a][b][c] = C^c_{ab}
    structure: Vec<Vec<Section>>,
    im: Option<Vec<Vec<ScalarExpr>>>,
}

impl AlgebroidData {
    /// Zero bracket and anchor; fill in with the `with_*` builders.
    pub fn new(chart: &Arc<Chart>, rank: usize) -> Self {
        let n = chart.dim();
        AlgebroidData {
            chart: chart.clone(),
            labels: (1..=rank).map(|a| format!("e{a}")).collect(),
            anchor: vec![zeros(n); rank],
            structure: vec![vec![zeros(rank); rank]; rank],
            im: None,
        }
    }

    pub fn from_parts(
        chart: &Arc<Chart>,
        anchor: Vec<Field>,
        structure: Vec<Vec<Section>>,
        im: Option<Vec<Vec<ScalarExpr>>>,
    ) -> Result<Self, AlgebroidError> {
        let r = anchor.len();
        let n = chart.dim();
        if anchor.iter().any(|row| row.len() != n) {
            return Err(AlgebroidError::Dimension("anchor rows must have one entry per base coordinate".into()));
        }
        if structure.len() != r || structure.iter().any(|s| s.len() != r || s.iter().any(|c| c.len() != r)) {
            return Err(AlgebroidError::Dimension("structure functions must be rank x rank x rank".into()));
        }
        if let Some(m) = &im {
            if m.len() != r || m.iter().any(|row| row.len() != n) {
                return Err(AlgebroidError::Dimension("IM matrix must be rank x base dimension".into()));
            }
        }
        for a in 0..r {
            for b in a..r {
                for c in 0..r {
                    if structure[a][b][c] != -&structure[b][a][c] {
                        return Err(AlgebroidError::NotAntisymmetric { a, b, c });
                    }
                }
            }
        }
        let mut out = AlgebroidData::new(chart, r);
        out.anchor = anchor;
        out.structure = structure;
        out.im = im;
        Ok(out)
    }

    /// Set `C^c_{ab}` and its antisymmetric partner.
    pub fn with_bracket(mut self, a: usize, b: usize, c: usize, value: ScalarExpr) -> Self {
        self.structure[b][a][c] = -&value;
        self.structure[a][b][c] = value;
        self
    }

    pub fn with_anchor(mut self, a: usize, field: Field) -> Self {
        self.anchor[a] = field;
        self
    }

    pub fn with_im(mut self, im: Vec<Vec<ScalarExpr>>) -> Self {
        self.im = Some(im);
        self
    }

    pub fn without_im(mut self) -> Self {
        self.im = None;
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.rank());
        self.labels = labels;
        self
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.anchor.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn anchor(&self) -> &[Field] {
        &self.anchor
    }

    pub fn structure(&self) -> &[Vec<Section>] {
        &self.structure
    }

    pub fn im(&self) -> Option<&[Vec<ScalarExpr>]> {
        self.im.as_deref()
    }

    pub fn frame(&self, a: usize) -> Section {
        let mut s = zeros(self.rank());
        s[a] = ScalarExpr::one();
        s
    }

    /// `C^c_{ab}`.
    pub fn c(&self, a: usize, b: usize, c: usize) -> &ScalarExpr {
        &self.structure[a][b][c]
    }

    pub fn anchor_of(&self, s: &[ScalarExpr]) -> Field {
        let mut out = zeros(self.dim());
        for (a, sa) in s.iter().enumerate() {
            axpy(&mut out, sa, &self.anchor[a]);
        }
        out
    }

    /// Bracket extended from the frame by the Leibniz rule.
    pub fn bracket(&self, s: &[ScalarExpr], t: &[ScalarExpr]) -> Section {
        let r = self.rank();
        let mut out = zeros(r);
        for a in 0..r {
            if s[a].is_zero() {
                continue;
            }
            for b in 0..r {
                if t[b].is_zero() {
                    continue;
                }
                axpy(&mut out, &(&s[a] * &t[b]), &self.structure[a][b]);
            }
        }
        let rs = self.anchor_of(s);
        let rt = self.anchor_of(t);
        for c in 0..r {
            let v = apply_field(&rs, &t[c]) - apply_field(&rt, &s[c]);
            if !v.is_zero() {
                out[c] = &out[c] + &v;
            }
        }
        out
    }

    /// `[s,[t,u]] + [t,[u,s]] + [u,[s,t]]`.
    pub fn jacobiator(&self, s: &[ScalarExpr], t: &[ScalarExpr], u: &[ScalarExpr]) -> Section {
        let j1 = self.bracket(s, &self.bracket(t, u));
        let j2 = self.bracket(t, &self.bracket(u, s));
        let j3 = self.bracket(u, &self.bracket(s, t));
        j1.iter().zip(&j2).zip(&j3).map(|((a, b), c)| a + b + c).collect()
    }

    /// `μ(s)` as a 1-form on the base.
    pub fn im_of(&self, s: &[ScalarExpr]) -> Result<DiffForm, AlgebroidError> {
        let m = self.im.as_ref().ok_or(AlgebroidError::MissingIm)?;
        let mut comps = zeros(self.dim());
        for (a, sa) in s.iter().enumerate() {
            axpy(&mut comps, sa, &m[a]);
        }
        Ok(DiffForm::from_components(&self.chart, comps)?)
    }

    pub fn field(&self, x: &[ScalarExpr]) -> Multivector {
        Multivector::from_components(&self.chart, x.to_vec()).expect("field length matches chart")
    }

    pub fn render_section(&self, s: &[ScalarExpr]) -> String {
        render_combination(s, &self.labels, self.chart.names())
    }

    pub fn render_field(&self, x: &[ScalarExpr]) -> String {
        let labels: Vec<String> = self.chart.names().iter().map(|n| format!("d/d{n}")).collect();
        render_combination(x, &labels, self.chart.names())
    }

    /// Re-express in the frame `e'_a = Σ_b P[a][b] e_b` for a constant invertible `P`.
    pub fn change_frame(&self, p: &[Vec<BigRational>]) -> Result<AlgebroidData, AlgebroidError> {
        let r = self.rank();
        if p.len() != r || p.iter().any(|row| row.len() != r) {
            return Err(AlgebroidError::Dimension("frame change must be rank x rank".into()));
        }
        let inv = invert(p).ok_or(AlgebroidError::Singular)?;
        let lift = |row: &[BigRational]| -> Section { row.iter().map(|c| ScalarExpr::constant(c.clone())).collect() };
        let new_frame: Vec<Section> = p.iter().map(|row| lift(row)).collect();
        // old coefficients c_b → new coefficients c'_a = Σ_b c_b inv[b][a]
        let to_new = |s: &Section| -> Section {
            (0..r)
                .map(|a| {
                    let mut acc = ScalarExpr::zero();
                    for b in 0..r {
                        if !s[b].is_zero() && !inv[b][a].is_zero() {
                            acc = acc + s[b].scale(&inv[b][a]);
                        }
                    }
                    acc
                })
                .collect()
        };
        let mut structure = vec![vec![zeros(r); r]; r];
        for a in 0..r {
            for b in 0..r {
                structure[a][b] = to_new(&self.bracket(&new_frame[a], &new_frame[b]));
            }
        }
        let anchor = new_frame.iter().map(|s| self.anchor_of(s)).collect();
        let im = match &self.im {
            Some(_) => Some(
                new_frame
                    .iter()
                    .map(|s| self.im_of(s).map(|f| f.components()))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        AlgebroidData::from_parts(&self.chart, anchor, structure, im)
    }

    pub fn to_json(&self) -> Value {
        let names = self.chart.names();
        let exprs = |row: &[ScalarExpr]| -> Vec<String> { row.iter().map(|e| e.to_string_with(names)).collect() };
        let mut brackets = serde_json::Map::new();
        for a in 0..self.rank() {
            for b in a + 1..self.rank() {
                let s = &self.structure[a][b];
                if !all_zero(s) {
                    brackets.insert(
                        format!("[{},{}]", self.labels[a], self.labels[b]),
                        Value::String(self.render_section(s)),
                    );
                }
            }
        }
        json!({
            "base": names,
            "frame": self.labels,
            "anchor": self.anchor.iter().map(|r| exprs(r)).collect::<Vec<_>>(),
            "brackets": brackets,
            "im": self.im.as_ref().map(|m| m.iter().map(|r| exprs(r)).collect::<Vec<_>>()),
        })
    }
}

/// `Σ c_a·label_a`, skipping zeros; `0` when empty.
pub fn render_combination(v: &[ScalarExpr], labels: &[String], names: &[String]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| {
            if c.is_one() {
                l.clone()
            } else {
                format!("({})*{l}", c.to_string_with(names))
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Restricted cotangent algebroid of a jet in the frame `{dx_i} ∪ {dz_a}`.
pub fn jet_to_algebroid(jet: &JetClass) -> Result<AlgebroidData, AlgebroidError> {
    let s = jet.submanifold();
    let pi = jet.representative();
    if !check_second_order(pi, s)?.passed() {
        return Err(JetError::NotSecondOrder.into());
    }
    let base = s.base();
    let order: Vec<usize> = base.iter().chain(s.normal()).copied().collect();
    let chart = s.chart();
    let r = order.len();
    let mut anchor = Vec::with_capacity(r);
    for &i in &order {
        let row = base
            .iter()
            .map(|&j| s.restrict(&pi.component(&[i, j])))
            .collect::<Result<Vec<_>, _>>()?;
        anchor.push(row);
    }
    let forms: Vec<DiffForm> = order.iter().map(|&i| DiffForm::basis(chart, i)).collect();
    let mut structure = vec![vec![zeros(r); r]; r];
    for a in 0..r {
        for b in a + 1..r {
            let br = cotangent_bracket(&forms[a], &forms[b], pi)?;
            for (c, &k) in order.iter().enumerate() {
                let v = s.restrict(&br.component(&[k]))?;
                structure[b][a][c] = -&v;
                structure[a][b][c] = v;
            }
        }
    }
    let nb = base.len();
    let im = (0..r)
        .map(|a| (0..nb).map(|j| if a == j { ScalarExpr::one() } else { ScalarExpr::zero() }).collect())
        .collect();
    let labels = order.iter().map(|&i| format!("d{}", chart.name(i))).collect();
    Ok(AlgebroidData::from_parts(s.base_chart(), anchor, structure, Some(im))?.with_labels(labels))
}

/// Deterministic non-constant probe coefficient on an `n`-dimensional chart.
fn probe_function(n: usize, k: usize) -> ScalarExpr {
    let mut f = ScalarExpr::int(1 + k as i64);
    for i in 0..n {
        let x = ScalarExpr::var(i);
        f = f + ScalarExpr::rational(1 + ((i + k) % 3) as i64, 2) * &x * &x + ScalarExpr::int(((i * 7 + k) % 5) as i64 - 2) * x;
    }
    f
}

fn scaled(f: &ScalarExpr, s: &[ScalarExpr]) -> Section {
    s.iter().map(|c| f * c).collect()
}

/// Anchor compatibility and the Jacobi identity on frames and on `f·e_a` probes.
pub fn check_jacobi(alg: &AlgebroidData) -> Verdict {
    let r = alg.rank();
    let mut morphism = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            let lhs = alg.anchor_of(alg.c_section(a, b));
            let rhs = field_bracket(&alg.anchor[a], &alg.anchor[b]);
            let d = sub(&lhs, &rhs);
            if !all_zero(&d) {
                morphism.push(format!(
                    "rho([{},{}]) - [rho {}, rho {}] = {}",
                    alg.labels[a],
                    alg.labels[b],
                    alg.labels[a],
                    alg.labels[b],
                    alg.render_field(&d)
                ));
            }
        }
    }
    let mut jac = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            for c in b + 1..r {
                let j = alg.jacobiator(&alg.frame(a), &alg.frame(b), &alg.frame(c));
                if !all_zero(&j) {
                    jac.push(format!(
                        "Jac({},{},{}) = {}",
                        alg.labels[a],
                        alg.labels[b],
                        alg.labels[c],
                        alg.render_section(&j)
                    ));
                }
            }
        }
    }
    let mut probes = Vec::new();
    if r >= 2 {
        for a in 0..r {
            let b = (a + 1) % r;
            let c = (a + 2) % r;
            let f = probe_function(alg.dim(), a);
            let fa = scaled(&f, &alg.frame(a));
            let lhs = alg.jacobiator(&fa, &alg.frame(b), &alg.frame(c));
            let rhs = scaled(&f, &alg.jacobiator(&alg.frame(a), &alg.frame(b), &alg.frame(c)));
            let d = sub(&lhs, &rhs);
            if !all_zero(&d) {
                probes.push(format!("Jac(f {},{},{}) - f Jac = {}", alg.labels[a], alg.labels[b], alg.labels[c], alg.render_section(&d)));
            }
        }
    }
    Verdict::new(vec![
        CheckRecord::exact("anchor_morphism", morphism),
        CheckRecord::exact("jacobi", jac),
        CheckRecord::exact("jacobi_probes", probes),
    ])
}

impl AlgebroidData {
    fn c_section(&self, a: usize, b: usize) -> &[ScalarExpr] {
        &self.structure[a][b]
    }
}

/// Closed IM 2-form equations, on frames and on `f·e_a` probes.
pub fn check_closed_im(alg: &AlgebroidData) -> Result<Verdict, AlgebroidError> {
    let r = alg.rank();
    let names = alg.chart.names();
    let mu: Vec<DiffForm> = (0..r).map(|a| alg.im_of(&alg.frame(a))).collect::<Result<_, _>>()?;
    let rho: Vec<Multivector> = (0..r).map(|a| alg.field(&alg.anchor[a])).collect();
    let mut skew = Vec::new();
    for a in 0..r {
        for b in a..r {
            let v = mu[a].interior(&rho[b])?.scalar_value() + mu[b].interior(&rho[a])?.scalar_value();
            if !v.is_zero() {
                skew.push(format!(
                    "i_rho({}) mu({}) + i_rho({}) mu({}) = {}",
                    alg.labels[b],
                    alg.labels[a],
                    alg.labels[a],
                    alg.labels[b],
                    v.to_string_with(names)
                ));
            }
        }
    }
    let bracket_eq = |s: &Section, t: &Section| -> Result<DiffForm, AlgebroidError> {
        let lhs = alg.im_of(&alg.bracket(s, t))?;
        let rs = alg.field(&alg.anchor_of(s));
        let rt = alg.field(&alg.anchor_of(t));
        let rhs = alg
            .im_of(t)?
            .lie_derivative(&rs)?
            .sub(&alg.im_of(s)?.exterior_derivative().interior(&rt)?)?;
        Ok(lhs.sub(&rhs)?)
    };
    let render_form = |f: &DiffForm| {
        let labels: Vec<String> = names.iter().map(|n| format!("d{n}")).collect();
        render_combination(&f.components(), &labels, names)
    };
    let mut brk = Vec::new();
    for a in 0..r {
        for b in 0..r {
            if a == b {
                continue;
            }
            let d = bracket_eq(&alg.frame(a), &alg.frame(b))?;
            if !d.is_zero() {
                brk.push(format!("mu([{},{}]) - rhs = {}", alg.labels[a], alg.labels[b], render_form(&d)));
            }
        }
    }
    let mut probes = Vec::new();
    for a in 0..r {
        let b = (a + 1) % r;
        let f = probe_function(alg.dim(), a);
        let d = bracket_eq(&scaled(&f, &alg.frame(a)), &alg.frame(b))?;
        if !d.is_zero() {
            probes.push(format!("mu([f {},{}]) - rhs = {}", alg.labels[a], alg.labels[b], render_form(&d)));
        }
    }
    Ok(Verdict::new(vec![
        CheckRecord::exact("im_skew", skew),
        CheckRecord::exact("im_bracket", brk),
        CheckRecord::exact("im_probes", probes),
    ]))
}

/// Linear connection on the trivialized bundle: `∇_{∂_i} e_a = Σ_b Γ^b_{ia} e_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    // gamma[i][a][b] = Γ^b_{ia}
    gamma: Vec<Vec<Section>>,
}

impl Connection {
    pub fn trivial(dim: usize, rank: usize) -> Self {
        Connection {
            gamma: vec![vec![zeros(rank); rank]; dim],
        }
    }

    pub fn from_coefficients(gamma: Vec<Vec<Section>>) -> Self {
        Connection { gamma }
    }

    /// Set `Γ^b_{ia}`.
    pub fn with(mut self, i: usize, a: usize, b: usize, value: ScalarExpr) -> Self {
        self.gamma[i][a][b] = value;
        self
    }

    pub fn coefficient(&self, i: usize, a: usize, b: usize) -> &ScalarExpr {
        &self.gamma[i][a][b]
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn rank(&self) -> usize {
        self.gamma.first().map_or(0, Vec::len)
    }

    /// `∇_X s`.
    pub fn covariant(&self, x: &[ScalarExpr], s: &[ScalarExpr]) -> Section {
        let mut out: Section = s.iter().map(|c| apply_field(x, c)).collect();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (a, sa) in s.iter().enumerate() {
                if sa.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xi * sa), &self.gamma[i][a]);
            }
        }
        out
    }
}

/// Bundle map `l: A → 𝔨` onto the span of the kernel frame elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    kernel: Vec<usize>,
    // matrix[k][a]: coefficient of e_{kernel[k]} in l(e_a)
    matrix: Vec<Section>,
}

impl Splitting {
    pub fn new(rank: usize, kernel: Vec<usize>, matrix: Vec<Section>) -> Result<Self, AlgebroidError> {
        if matrix.len() != kernel.len() || matrix.iter().any(|row| row.len() != rank) || kernel.iter().any(|&k| k >= rank) {
            return Err(AlgebroidError::Dimension("splitting must be |kernel| x rank".into()));
        }
        for (k, row) in matrix.iter().enumerate() {
            for (j, &kj) in kernel.iter().enumerate() {
                let want = if k == j { ScalarExpr::one() } else { ScalarExpr::zero() };
                if row[kj] != want {
                    return Err(AlgebroidError::BadSplitting);
                }
            }
        }
        Ok(Splitting { kernel, matrix })
    }

    /// Coordinate projection onto the kernel frame elements.
    pub fn projection(rank: usize, kernel: Vec<usize>) -> Self {
        let matrix = kernel
            .iter()
            .map(|&k| (0..rank).map(|a| if a == k { ScalarExpr::one() } else { ScalarExpr::zero() }).collect())
            .collect();
        Splitting { kernel, matrix }
    }

    pub fn kernel(&self) -> &[usize] {
        &self.kernel
    }

    /// `l(s)` as a section of `A`.
    pub fn apply(&self, s: &[ScalarExpr]) -> Section {
        let mut out = zeros(s.len());
        for (k, row) in self.matrix.iter().enumerate() {
            let mut acc = ScalarExpr::zero();
            for (a, sa) in s.iter().enumerate() {
                if !sa.is_zero() && !row[a].is_zero() {
                    acc = acc + sa * &row[a];
                }
            }
            out[self.kernel[k]] = acc;
        }
        out
    }
}

/// `∇̄_s t = ∇_{ρ t} s + [s,t]`.
pub fn basic_on_sections(alg: &AlgebroidData, nabla: &Connection, s: &[ScalarExpr], t: &[ScalarExpr]) -> Section {
    let a = nabla.covariant(&alg.anchor_of(t), s);
    let b = alg.bracket(s, t);
    a.iter().zip(&b).map(|(x, y)| x + y).collect()
}

/// `∇̄_s X = ρ(∇_X s) + [ρ s, X]`.
pub fn basic_on_fields(alg: &AlgebroidData, nabla: &Connection, s: &[ScalarExpr], x: &[ScalarExpr]) -> Field {
    let a = alg.anchor_of(&nabla.covariant(x, s));
    let b = field_bracket(&alg.anchor_of(s), x);
    a.iter().zip(&b).map(|(p, q)| p + q).collect()
}

/// Basic curvature `R(s,t)X`.
pub fn basic_curvature(alg: &AlgebroidData, nabla: &Connection, s: &[ScalarExpr], t: &[ScalarExpr], x: &[ScalarExpr]) -> Section {
    let st = alg.bracket(s, t);
    let mut out = nabla.covariant(x, &st);
    out = sub(&out, &alg.bracket(&nabla.covariant(x, s), t));
    out = sub(&out, &alg.bracket(s, &nabla.covariant(x, t)));
    out = sub(&out, &nabla.covariant(&basic_on_fields(alg, nabla, t, x), s));
    let last = nabla.covariant(&basic_on_fields(alg, nabla, s, x), t);
    out.iter().zip(&last).map(|(p, q)| p + q).collect()
}

/// `∇̄l = 0` and `l(R^bas) = 0`, plus the precondition that the kernel
/// directions lie in `ker ρ ∩ ker μ`.
pub fn check_cartan_splitting(alg: &AlgebroidData, nabla: &Connection, l: &Splitting) -> Result<Verdict, AlgebroidError> {
    let r = alg.rank();
    let n = alg.dim();
    if nabla.dim() != n || nabla.rank() != r || l.matrix.iter().any(|row| row.len() != r) {
        return Err(AlgebroidError::Dimension("connection or splitting does not match the algebroid".into()));
    }
    let mut pre = Vec::new();
    for &k in l.kernel() {
        if !all_zero(&alg.anchor[k]) {
            pre.push(format!("rho({}) = {}", alg.labels[k], alg.render_field(&alg.anchor[k])));
        }
        if let Some(m) = &alg.im {
            if !all_zero(&m[k]) {
                let labels: Vec<String> = alg.chart.names().iter().map(|v| format!("d{v}")).collect();
                pre.push(format!("mu({}) = {}", alg.labels[k], render_combination(&m[k], &labels, alg.chart.names())));
            }
        }
    }
    let mut parallel = Vec::new();
    for a in 0..r {
        for b in 0..r {
            let ea = alg.frame(a);
            let eb = alg.frame(b);
            let lhs = basic_on_sections(alg, nabla, &ea, &l.apply(&eb));
            let rhs = l.apply(&basic_on_sections(alg, nabla, &ea, &eb));
            let d = sub(&lhs, &rhs);
            if !all_zero(&d) {
                parallel.push(format!("(nabla-bar_{} l)({}) = {}", alg.labels[a], alg.labels[b], alg.render_section(&d)));
            }
        }
    }
    let mut curvature = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            for i in 0..n {
                let mut x = zeros(n);
                x[i] = ScalarExpr::one();
                let v = l.apply(&basic_curvature(alg, nabla, &alg.frame(a), &alg.frame(b), &x));
                if !all_zero(&v) {
                    curvature.push(format!(
                        "l(R({},{}) d/d{}) = {}",
                        alg.labels[a],
                        alg.labels[b],
                        alg.chart.name(i),
                        alg.render_section(&v)
                    ));
                }
            }
        }
    }
    Ok(Verdict::new(vec![
        CheckRecord::exact("cartan_precondition", pre),
        CheckRecord::exact("cartan_parallel", parallel),
        CheckRecord::exact("basic_curvature", curvature),
    ]))
}
