//! Coupling data `(∇, U)` over a Poisson base with a Lie algebra bundle
//! kernel, its structure equations, and the codimension-one triples.

use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebroid::{field_bracket, render_combination, AlgebroidData, Connection, Field, Section};
use crate::expr::{Chart, ExprError, ScalarExpr};
use crate::geom::{cotangent_bracket, DiffForm, GeomError, Multivector};
use crate::report::{decide, CheckRecord, NumericOpts, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("base bivector is not Poisson: {0}")]
    NotPoisson(String),
    #[error("kernel bracket is not a Lie bracket: {0}")]
    KernelNotLie(String),
    #[error("structure functions not antisymmetric in ({a},{b}) for component {c}")]
    NotAntisymmetric { a: usize, b: usize, c: usize },
    #[error("codimension-one triple fails verification: {0}")]
    TripleFails(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn zeros(n: usize) -> Vec<ScalarExpr> {
    vec![ScalarExpr::zero(); n]
}

fn unit(n: usize, i: usize) -> Vec<ScalarExpr> {
    let mut v = zeros(n);
    v[i] = ScalarExpr::one();
    v
}

fn combine(terms: &[(i64, &[ScalarExpr])]) -> Vec<ScalarExpr> {
    let n = terms[0].1.len();
    let mut out = zeros(n);
    for (sign, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if x.is_zero() {
                continue;
            }
            *o = if *sign > 0 { &*o + x } else { &*o - x };
        }
    }
    out
}

/// Exact Poisson test of a bivector; returns the rendered nonzero components.
/// Coefficients with elementary functions are sampled.
fn poisson_defect(pi: &Multivector) -> Result<Option<String>, GeomError> {
    let sq = pi.schouten(pi)?;
    let items: Vec<_> = sq
        .terms()
        .iter()
        .map(|(idx, c)| (format!("{idx:?}"), c.clone()))
        .collect();
    let rec = decide("poisson", items, pi.chart().names(), &NumericOpts::default());
    Ok((!rec.passed()).then(|| rec.residuals.join("; ")))
}

/// `(π_S, C, Γ, U)` in a chart of the base and a frame of the kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingData {
    pi: Multivector,
    pi_matrix: Vec<Vec<ScalarExpr>>,
    // structure[a][b][c] = C^c_{ab}
    structure: Vec<Vec<Section>>,
    nabla: Connection,
    // u[i][a][j] = U^{ia}_j
    u: Vec<Vec<Vec<ScalarExpr>>>,
    labels: Vec<String>,
}

impl CouplingData {
    pub fn new(
        pi: Multivector,
        structure: Vec<Vec<Section>>,
        gamma: Vec<Vec<Section>>,
        u: Vec<Vec<Vec<ScalarExpr>>>,
    ) -> Result<Self, CouplingError> {
        if pi.degree() != 2 {
            return Err(GeomError::Degree {
                expected: 2,
                got: pi.degree(),
            }
            .into());
        }
        let n = pi.dim();
        let m = structure.len();
        if structure.iter().any(|s| s.len() != m || s.iter().any(|c| c.len() != m)) {
            return Err(CouplingError::Dimension("kernel structure functions must be rank x rank x rank".into()));
        }
        if gamma.len() != n || gamma.iter().any(|g| g.len() != m || g.iter().any(|r| r.len() != m)) {
            return Err(CouplingError::Dimension("connection coefficients must be dim x rank x rank".into()));
        }
        if u.len() != n || u.iter().any(|g| g.len() != m || g.iter().any(|r| r.len() != n)) {
            return Err(CouplingError::Dimension("coupling tensor must be dim x rank x dim".into()));
        }
        for a in 0..m {
            for b in a..m {
                for c in 0..m {
                    if structure[a][b][c] != -&structure[b][a][c] {
                        return Err(CouplingError::NotAntisymmetric { a, b, c });
                    }
                }
            }
        }
        if let Some(d) = poisson_defect(&pi)? {
            return Err(CouplingError::NotPoisson(d));
        }
        let out = CouplingData {
            pi_matrix: pi.matrix()?,
            pi,
            structure,
            nabla: Connection::from_coefficients(gamma),
            u,
            labels: (1..=m).map(|a| format!("e{a}")).collect(),
        };
        let jac = out.kernel_jacobi();
        if !jac.passed() {
            return Err(CouplingError::KernelNotLie(jac.residuals.join("; ")));
        }
        Ok(out)
    }

    /// All-zero connection and coupling tensor.
    pub fn trivial(pi: Multivector, structure: Vec<Vec<Section>>) -> Result<Self, CouplingError> {
        let n = pi.dim();
        let m = structure.len();
        CouplingData::new(pi, structure, vec![vec![zeros(m); m]; n], vec![vec![zeros(n); m]; n])
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.pi.chart()
    }

    pub fn pi(&self) -> &Multivector {
        &self.pi
    }

    /// `π^{ij}` as a dense matrix.
    pub fn pi_matrix(&self) -> &[Vec<ScalarExpr>] {
        &self.pi_matrix
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    pub fn rank(&self) -> usize {
        self.structure.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `C^c_{ab}`.
    pub fn c(&self, a: usize, b: usize, c: usize) -> &ScalarExpr {
        &self.structure[a][b][c]
    }

    /// `Γ^b_{ia}`.
    pub fn gamma(&self, i: usize, a: usize, b: usize) -> &ScalarExpr {
        self.nabla.coefficient(i, a, b)
    }

    /// `U^{ia}_j`.
    pub fn u(&self, i: usize, a: usize, j: usize) -> &ScalarExpr {
        &self.u[i][a][j]
    }

    pub fn connection(&self) -> &Connection {
        &self.nabla
    }

    fn kernel_algebroid(&self) -> AlgebroidData {
        let mut a = AlgebroidData::new(self.chart(), self.rank());
        for x in 0..self.rank() {
            for y in x + 1..self.rank() {
                for z in 0..self.rank() {
                    a = a.with_bracket(x, y, z, self.structure[x][y][z].clone());
                }
            }
        }
        a
    }

    fn kernel_jacobi(&self) -> CheckRecord {
        let a = self.kernel_algebroid();
        crate::algebroid::check_jacobi(&a).checks.into_iter().find(|c| c.name == "jacobi").expect("jacobi record")
    }

    /// `[ξ,η]_𝔨` pointwise.
    pub fn kernel_bracket(&self, xi: &[ScalarExpr], eta: &[ScalarExpr]) -> Section {
        let m = self.rank();
        let mut out = zeros(m);
        for a in 0..m {
            for b in 0..m {
                if xi[a].is_zero() || eta[b].is_zero() {
                    continue;
                }
                let k = &xi[a] * &eta[b];
                for c in 0..m {
                    if !self.structure[a][b][c].is_zero() {
                        out[c] = &out[c] + &(&k * &self.structure[a][b][c]);
                    }
                }
            }
        }
        out
    }

    /// `π♯α = i_α π` for a covector given by components.
    pub fn sharp(&self, alpha: &[ScalarExpr]) -> Field {
        let n = self.dim();
        (0..n)
            .map(|l| {
                let mut acc = ScalarExpr::zero();
                for (i, ai) in alpha.iter().enumerate() {
                    if !ai.is_zero() && !self.pi_matrix[i][l].is_zero() {
                        acc = acc + ai * &self.pi_matrix[i][l];
                    }
                }
                acc
            })
            .collect()
    }

    /// `U(α, X)`.
    pub fn u_apply(&self, alpha: &[ScalarExpr], x: &[ScalarExpr]) -> Section {
        let m = self.rank();
        let mut out = zeros(m);
        for (i, ai) in alpha.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, xj) in x.iter().enumerate() {
                if xj.is_zero() {
                    continue;
                }
                let k = ai * xj;
                for a in 0..m {
                    if !self.u[i][a][j].is_zero() {
                        out[a] = &out[a] + &(&k * &self.u[i][a][j]);
                    }
                }
            }
        }
        out
    }

    /// `[α,β]_{π_S}` on component vectors.
    pub fn form_bracket(&self, alpha: &[ScalarExpr], beta: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, GeomError> {
        let a = DiffForm::from_components(self.chart(), alpha.to_vec())?;
        let b = DiffForm::from_components(self.chart(), beta.to_vec())?;
        Ok(cotangent_bracket(&a, &b, &self.pi)?.components())
    }

    /// `⟨z, U⟩` as the matrix `W_{ik} = U^{ia}_k z_a` with `z_a` given.
    pub fn pairing_matrix(&self, z: &[ScalarExpr]) -> Vec<Vec<ScalarExpr>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let mut acc = ScalarExpr::zero();
                        for (a, za) in z.iter().enumerate() {
                            if !self.u[i][a][k].is_zero() {
                                acc = acc + &self.u[i][a][k] * za;
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    pub fn render_section(&self, s: &[ScalarExpr]) -> String {
        render_combination(s, &self.labels, self.chart().names())
    }

    pub fn to_json(&self) -> Value {
        let names = self.chart().names();
        let mut kernel = serde_json::Map::new();
        let mut gamma = serde_json::Map::new();
        let mut u = serde_json::Map::new();
        for a in 0..self.rank() {
            for b in a + 1..self.rank() {
                for c in 0..self.rank() {
                    let v = &self.structure[a][b][c];
                    if !v.is_zero() {
                        kernel.insert(format!("c_{a}{b}^{c}"), Value::String(v.to_string_with(names)));
                    }
                }
            }
        }
        for i in 0..self.dim() {
            for a in 0..self.rank() {
                for b in 0..self.rank() {
                    let v = self.gamma(i, a, b);
                    if !v.is_zero() {
                        gamma.insert(format!("{}:{a}^{b}", names[i]), Value::String(v.to_string_with(names)));
                    }
                }
                for j in 0..self.dim() {
                    let v = &self.u[i][a][j];
                    if !v.is_zero() {
                        u.insert(format!("{}^{a}_{}", names[i], names[j]), Value::String(v.to_string_with(names)));
                    }
                }
            }
        }
        json!({
            "base": names,
            "pi_S": self.pi.to_pairs().into_iter().map(|(i, c)| json!({"indices": i, "coeff": c})).collect::<Vec<_>>(),
            "rank": self.rank(),
            "structure": kernel,
            "gamma": gamma,
            "U": u,
        })
    }
}

/// The four coordinate structure equations, each decided exactly when the
/// data is rational.
pub fn check_coupling(c: &CouplingData) -> Verdict {
    check_coupling_with(c, &NumericOpts::default())
}

pub fn check_coupling_with(c: &CouplingData, opts: &NumericOpts) -> Verdict {
    let names = c.chart().names();
    let label = |s: &str| s.to_string();
    let mut v = Verdict::default();
    v.push(decide("S1", s1_residuals(c), names, opts).cite(label("structure equations of coupling data")));
    v.push(decide("S2", s2_residuals(c), names, opts).cite(label("structure equations of coupling data")));
    v.push(decide("U_skew", skew_residuals(c), names, opts).cite(label("skew-symmetry of the coupling tensor")));
    v.push(decide("S3", s3_residuals(c), names, opts).cite(label("structure equations of coupling data")));
    v
}

fn coord(c: &CouplingData, i: usize) -> &str {
    c.chart().name(i)
}

/// `∇_X[ξ,η] − [∇_Xξ,η] − [ξ,∇_Xη]` on coordinate fields and frame elements.
pub fn s1_residuals(c: &CouplingData) -> Vec<(String, ScalarExpr)> {
    let (n, m) = (c.dim(), c.rank());
    let mut out = Vec::new();
    for i in 0..n {
        let x = unit(n, i);
        for a in 0..m {
            for b in a + 1..m {
                let (ea, eb) = (unit(m, a), unit(m, b));
                let lhs = c.nabla.covariant(&x, &c.kernel_bracket(&ea, &eb));
                let r1 = c.kernel_bracket(&c.nabla.covariant(&x, &ea), &eb);
                let r2 = c.kernel_bracket(&ea, &c.nabla.covariant(&x, &eb));
                let res = combine(&[(1, &lhs), (-1, &r1), (-1, &r2)]);
                for (k, e) in res.into_iter().enumerate() {
                    out.push((format!("S1[d/d{}; e{},e{}] e{}", coord(c, i), a + 1, b + 1, k + 1), e));
                }
            }
        }
    }
    out
}

/// `R^∇(π♯α, X)ξ − [U(α,X), ξ]` on coordinate covectors, fields and frame elements.
pub fn s2_residuals(c: &CouplingData) -> Vec<(String, ScalarExpr)> {
    let (n, m) = (c.dim(), c.rank());
    let mut out = Vec::new();
    for i in 0..n {
        let alpha = unit(n, i);
        let y = c.sharp(&alpha);
        for j in 0..n {
            let x = unit(n, j);
            let yx = field_bracket(&y, &x);
            let uax = c.u_apply(&alpha, &x);
            for a in 0..m {
                let ea = unit(m, a);
                let t1 = c.nabla.covariant(&y, &c.nabla.covariant(&x, &ea));
                let t2 = c.nabla.covariant(&x, &c.nabla.covariant(&y, &ea));
                let t3 = c.nabla.covariant(&yx, &ea);
                let t4 = c.kernel_bracket(&uax, &ea);
                let res = combine(&[(1, &t1), (-1, &t2), (-1, &t3), (-1, &t4)]);
                for (k, e) in res.into_iter().enumerate() {
                    out.push((format!("S2[d{}, d/d{}; e{}] e{}", coord(c, i), coord(c, j), a + 1, k + 1), e));
                }
            }
        }
    }
    out
}

/// `U(α, π♯β) + U(β, π♯α)` for coordinate covectors.
pub fn skew_residuals(c: &CouplingData) -> Vec<(String, ScalarExpr)> {
    let n = c.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (a, b) = (unit(n, i), unit(n, j));
            let r = combine(&[(1, &c.u_apply(&a, &c.sharp(&b))), (1, &c.u_apply(&b, &c.sharp(&a)))]);
            for (k, e) in r.into_iter().enumerate() {
                out.push((format!("skew[d{},d{}] e{}", coord(c, i), coord(c, j), k + 1), e));
            }
        }
    }
    out
}

/// Invariant mixed cocycle equation at `(α, β, X)`.
pub fn s3_invariant(c: &CouplingData, alpha: &[ScalarExpr], beta: &[ScalarExpr], x: &[ScalarExpr]) -> Result<Section, GeomError> {
    let pa = c.sharp(alpha);
    let pb = c.sharp(beta);
    let t1 = c.nabla.covariant(&pa, &c.u_apply(beta, x));
    let t2 = c.nabla.covariant(&pb, &c.u_apply(alpha, x));
    let t3 = c.nabla.covariant(x, &c.u_apply(alpha, &pb));
    let t4 = c.u_apply(alpha, &field_bracket(&pb, x));
    let t5 = c.u_apply(beta, &field_bracket(&pa, x));
    let t6 = c.u_apply(&c.form_bracket(alpha, beta)?, x);
    Ok(combine(&[(1, &t1), (-1, &t2), (1, &t3), (1, &t4), (-1, &t5), (-1, &t6)]))
}

pub fn s3_residuals(c: &CouplingData) -> Vec<(String, ScalarExpr)> {
    let n = c.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let r = s3_invariant(c, &unit(n, i), &unit(n, j), &unit(n, k)).expect("charts agree");
                for (a, e) in r.into_iter().enumerate() {
                    out.push((
                        format!("S3[d{},d{}; d/d{}] e{}", coord(c, i), coord(c, j), coord(c, k), a + 1),
                        e,
                    ));
                }
            }
        }
    }
    out
}

/// Literal transcription of the coordinate (S3) display with its factors of
/// one half. Diagnostic only: it does not agree with the invariant equation
/// in general, and verdicts never use it.
pub fn s3_coordinate_display(c: &CouplingData) -> Vec<(String, ScalarExpr)> {
    let (n, m) = (c.dim(), c.rank());
    let p = &c.pi_matrix;
    let half = ScalarExpr::rational(1, 2);
    let bracket = |i: usize, j: usize, k: usize, a: usize| {
        let mut acc = ScalarExpr::zero();
        for l in 0..n {
            if p[i][l].is_zero() {
                continue;
            }
            let mut inner = c.u[j][a][k].differentiate(l) - &half * c.u[j][a][l].differentiate(k);
            for d in 0..m {
                inner = inner + c.gamma(l, d, a) * &c.u[j][d][k] - &c.u[j][d][l] * c.gamma(k, d, a);
            }
            acc = acc + &p[i][l] * inner;
        }
        for l in 0..n {
            acc = acc + &half * p[i][l].differentiate(k) * &c.u[j][a][l];
        }
        acc
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for a in 0..m {
                    let mut rhs = ScalarExpr::zero();
                    for l in 0..n {
                        rhs = rhs + p[i][j].differentiate(l) * &c.u[l][a][k];
                    }
                    let r = bracket(i, j, k, a) - bracket(j, i, k, a) - rhs;
                    out.push((format!("S3coord[{i},{j};{k}] e{}", a + 1), r));
                }
            }
        }
    }
    out
}

/// `(π_S, V, λ₀, θ, Z, U)` for a rank-one kernel; `U(dx_i) = Σ_j u[i][j] dx_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codim1Triple {
    pub pi: Multivector,
    pub v: Multivector,
    pub lambda0: Multivector,
    pub theta: DiffForm,
    pub z: Multivector,
    pub u: Vec<Vec<ScalarExpr>>,
}

impl Codim1Triple {
    pub fn new(
        pi: Multivector,
        v: Multivector,
        lambda0: Multivector,
        theta: DiffForm,
        z: Multivector,
        u: Vec<Vec<ScalarExpr>>,
    ) -> Result<Self, CouplingError> {
        let chart = pi.chart().clone();
        for (what, ch, deg, want) in [
            ("pi_S", pi.chart(), pi.degree(), 2),
            ("V", v.chart(), v.degree(), 1),
            ("lambda0", lambda0.chart(), lambda0.degree(), 2),
            ("theta", theta.chart(), theta.degree(), 1),
            ("Z", z.chart(), z.degree(), 1),
        ] {
            if ch != &chart {
                return Err(GeomError::ChartMismatch.into());
            }
            if deg != want {
                return Err(CouplingError::Dimension(format!("{what} must have degree {want}")));
            }
        }
        let n = chart.dim();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(CouplingError::Dimension("U must be dim x dim".into()));
        }
        if let Some(d) = poisson_defect(&pi)? {
            return Err(CouplingError::NotPoisson(d));
        }
        Ok(Codim1Triple {
            pi,
            v,
            lambda0,
            theta,
            z,
            u,
        })
    }

    /// Everything zero over a Poisson base.
    pub fn zero(pi: Multivector) -> Result<Self, CouplingError> {
        let c = pi.chart().clone();
        let n = c.dim();
        Codim1Triple::new(
            pi,
            Multivector::zero(&c, 1),
            Multivector::zero(&c, 2),
            DiffForm::zero(&c, 1),
            Multivector::zero(&c, 1),
            vec![zeros(n); n],
        )
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.pi.chart()
    }

    /// `U(α)` as a 1-form.
    pub fn u_form(&self, alpha: &DiffForm) -> DiffForm {
        let n = self.chart().dim();
        let a = alpha.components();
        let comps = (0..n)
            .map(|j| {
                let mut acc = ScalarExpr::zero();
                for i in 0..n {
                    if !a[i].is_zero() && !self.u[i][j].is_zero() {
                        acc = acc + &a[i] * &self.u[i][j];
                    }
                }
                acc
            })
            .collect();
        DiffForm::from_components(self.chart(), comps).expect("length matches")
    }

    pub fn to_json(&self) -> Value {
        let names = self.chart().names();
        let pairs = |p: Vec<(Vec<usize>, String)>| p.into_iter().map(|(i, c)| json!({"indices": i, "coeff": c})).collect::<Vec<_>>();
        json!({
            "pi_S": pairs(self.pi.to_pairs()),
            "V": pairs(self.v.to_pairs()),
            "lambda0": pairs(self.lambda0.to_pairs()),
            "theta": pairs(self.theta.to_pairs()),
            "Z": pairs(self.z.to_pairs()),
            "U": self.u.iter().map(|r| r.iter().map(|e| e.to_string_with(names)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn form_items(prefix: &str, f: &DiffForm) -> Vec<(String, ScalarExpr)> {
    let names = f.chart().names();
    f.terms()
        .iter()
        .map(|(idx, e)| {
            let parts: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
            (format!("{prefix} {}", parts.join("^")), e.clone())
        })
        .collect()
}

pub fn check_codim1_triple(t: &Codim1Triple) -> Result<Verdict, CouplingError> {
    check_codim1_triple_with(t, &NumericOpts::default())
}

pub fn check_codim1_triple_with(t: &Codim1Triple, opts: &NumericOpts) -> Result<Verdict, CouplingError> {
    let chart = t.chart().clone();
    let names = chart.names();
    let n = chart.dim();
    let pi = &t.pi;
    let basis: Vec<DiffForm> = (0..n).map(|i| DiffForm::basis(&chart, i)).collect();
    let sharp: Vec<Multivector> = basis.iter().map(|b| pi.sharp(b)).collect::<Result<_, _>>()?;
    let mut v = Verdict::default();

    let anchor = pi.sharp(&t.theta)?.sub(&t.v)?;
    let items = anchor
        .terms()
        .iter()
        .map(|(i, e)| (format!("pi#theta - V along d/d{}", names[i[0]]), e.clone()))
        .collect();
    v.push(decide("pi_sharp_theta", items, names, opts).cite("codimension-one triples"));

    let dz = pi.schouten(&t.z)?;
    let mut compat = Vec::new();
    for i in 0..n {
        let ua = t.u_form(&basis[i]);
        for j in 0..n {
            let lhs = ua.interior(&sharp[j])?.scalar_value();
            let r = lhs - t.lambda0.pair(&basis[i], &basis[j])? - dz.pair(&basis[i], &basis[j])?;
            compat.push((format!("compat[d{},d{}]", names[i], names[j]), r));
        }
    }
    v.push(decide("lambda_compatibility", compat, names, opts).cite("codimension-one triples"));

    let dtheta = t.theta.exterior_derivative();
    let mut s2 = Vec::new();
    for i in 0..n {
        let r = dtheta.interior(&sharp[i])?;
        s2.extend(form_items(&format!("i_(pi# d{}) dtheta", names[i]), &r));
    }
    v.push(decide("S2''", s2, names, opts).cite("codimension-one structure equations"));

    let mut s3 = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = s3_abelian(t, &basis[i], &basis[j])?;
            s3.extend(form_items(&format!("S3''[d{},d{}]", names[i], names[j]), &r));
        }
    }
    v.push(decide("S3''", s3, names, opts).cite("codimension-one structure equations"));
    Ok(v)
}

/// Residual of the abelian mixed equation at `(α, β)`:
/// `U([α,β]) − L_{π♯α}U(β) + i_{π♯β}dU(α) − π(U(α),β)θ − π(θ,α)U(β) + π(θ,β)U(α)`.
pub fn s3_abelian(t: &Codim1Triple, alpha: &DiffForm, beta: &DiffForm) -> Result<DiffForm, GeomError> {
    let pi = &t.pi;
    let ua = t.u_form(alpha);
    let ub = t.u_form(beta);
    let pa = pi.sharp(alpha)?;
    let pb = pi.sharp(beta)?;
    let mut r = t.u_form(&cotangent_bracket(alpha, beta, pi)?);
    r = r.sub(&ub.lie_derivative(&pa)?)?;
    r = r.add(&ua.exterior_derivative().interior(&pb)?)?;
    r = r.sub(&t.theta.scale(&pi.pair(&ua, beta)?))?;
    r = r.sub(&ub.scale(&pi.pair(&t.theta, alpha)?))?;
    r.add(&ua.scale(&pi.pair(&t.theta, beta)?))
}

/// Rank-one coupling data of a verified triple: abelian kernel,
/// `Γ_i = −θ_i` and `U^{i}_j = u[i][j]`.
pub fn couplingdata_from_codim1(t: &Codim1Triple) -> Result<CouplingData, CouplingError> {
    let v = check_codim1_triple(t)?;
    if !v.passed() {
        return Err(CouplingError::TripleFails(v.failed_names().join(", ")));
    }
    Ok(codim1_coupling_unchecked(t))
}

/// Same as [`couplingdata_from_codim1`] without re-verifying the triple.
pub fn codim1_coupling_unchecked(t: &Codim1Triple) -> CouplingData {
    let n = t.chart().dim();
    let theta = t.theta.components();
    let gamma = (0..n).map(|i| vec![vec![-&theta[i]]]).collect();
    let u = (0..n).map(|i| vec![t.u[i].clone()]).collect();
    CouplingData {
        pi_matrix: t.pi.matrix().expect("bivector"),
        pi: t.pi.clone(),
        structure: vec![vec![vec![ScalarExpr::zero()]]],
        nabla: Connection::from_coefficients(gamma),
        u,
        labels: vec!["e1".into()],
    }
}
