//! Local-model Poisson structures built from coupling data, and their
//! verification.

use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebroid::{jet_to_algebroid, AlgebroidData, AlgebroidError};
use crate::coupling::{check_codim1_triple, check_coupling, Codim1Triple, CouplingData, CouplingError};
use crate::expr::{gcd, Chart, ExprError, Poly, ScalarExpr};
use crate::geom::{DiffForm, GeomError, Multivector};
use crate::jets::{check_tangent, jet_truncate, JetError, Submanifold};
use crate::report::{decide, CheckRecord, NumericOpts, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("coupling data fails its structure equations: {0}")]
    CouplingFails(String),
    #[error("determinant of Id + <z,U> vanishes identically")]
    Singular,
    #[error("assembled structure matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("model and coupling data live on different charts")]
    ChartMismatch,
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

type Matrix = Vec<Vec<ScalarExpr>>;

/// Laplace expansion; the matrices here are at most a handful of rows.
pub fn determinant(m: &Matrix) -> ScalarExpr {
    let n = m.len();
    match n {
        0 => ScalarExpr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = ScalarExpr::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let t = &m[0][j] * determinant(&minor(m, 0, j));
                acc = if j % 2 == 0 { acc + t } else { acc - t };
            }
            acc
        }
    }
}

fn minor(m: &Matrix, row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Adjugate: `adj(M)·M = det(M)·Id`.
pub fn adjugate(m: &Matrix) -> Matrix {
    let n = m.len();
    if n == 1 {
        return vec![vec![ScalarExpr::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = determinant(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = ScalarExpr::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc = acc + &a[i][l] * &b[l][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn transpose(a: &Matrix) -> Matrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// A Poisson bivector on `base × fiber`, regular on the locus where the
/// certificate does not vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonModel {
    bivector: Multivector,
    certificate: ScalarExpr,
    base_dim: usize,
    rank: usize,
}

impl PoissonModel {
    pub fn bivector(&self) -> &Multivector {
        &self.bivector
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.bivector.chart()
    }

    /// `det(Id + ⟨z,U⟩)`.
    pub fn certificate(&self) -> &ScalarExpr {
        &self.certificate
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fiber_indices(&self) -> Vec<usize> {
        (self.base_dim..self.base_dim + self.rank).collect()
    }

    pub fn zero_section(&self) -> Submanifold {
        Submanifold::new(self.chart(), &self.fiber_indices()).expect("fiber indices in range")
    }

    /// Every coefficient's denominator divides a power of the certificate.
    pub fn certificate_covers(&self) -> bool {
        let Some(det) = self.certificate.as_poly() else {
            return false;
        };
        self.bivector.terms().values().all(|c| {
            let mut den: Poly = c.denominator().clone();
            while den.as_constant().is_none() {
                let g = gcd(&den, det);
                if g.as_constant().is_some() {
                    return false;
                }
                den = den.div_exact(&g).expect("gcd divides");
            }
            true
        })
    }

    pub fn to_json(&self) -> Value {
        let names = self.chart().names();
        json!({
            "chart": names,
            "base_dim": self.base_dim,
            "fiber": names[self.base_dim..].to_vec(),
            "bivector": self.bivector.to_pairs().into_iter().map(|(i, c)| json!({"indices": i, "coeff": c})).collect::<Vec<_>>(),
            "domain_certificate": self.certificate.to_string_with(names),
        })
    }
}

/// Fiber coordinate names: `t` for rank one, else `z1…zm`, primed on clashes.
pub fn default_fiber_names(base: &Chart, rank: usize) -> Vec<String> {
    let raw: Vec<String> = if rank == 1 {
        vec!["t".into()]
    } else {
        (1..=rank).map(|a| format!("z{a}")).collect()
    };
    raw.into_iter()
        .map(|mut n| {
            while base.index_of(&n).is_some() {
                n.push('\'');
            }
            n
        })
        .collect()
}

fn total_chart(base: &Chart, fiber: &[String]) -> Arc<Chart> {
    let names: Vec<String> = base.names().iter().chain(fiber).cloned().collect();
    Chart::split(&names, base.dim())
}

/// Block-matrix assembly `L·diag(γ, Λ)·Lᵀ` with `L = [[Id,0],[Γz,Id]]`,
/// `γ = (Id + ⟨z,U⟩)^{-1}·π_S` and `Λ_{ab} = C^c_{ab} z_c`.
pub fn build_local_model(c: &CouplingData) -> Result<PoissonModel, ModelError> {
    let v = check_coupling(c);
    if !v.passed() {
        return Err(ModelError::CouplingFails(v.failed_names().join(", ")));
    }
    assemble(c, &default_fiber_names(c.chart(), c.rank()))
}

/// Assemble without re-checking the structure equations.
pub fn assemble(c: &CouplingData, fiber: &[String]) -> Result<PoissonModel, ModelError> {
    let (n, m) = (c.dim(), c.rank());
    if fiber.len() != m {
        return Err(ModelError::ChartMismatch);
    }
    let chart = total_chart(c.chart(), fiber);
    let z: Vec<ScalarExpr> = (0..m).map(|a| ScalarExpr::var(n + a)).collect();
    let mut nmat = c.pairing_matrix(&z);
    for (i, row) in nmat.iter_mut().enumerate() {
        row[i] = &row[i] + &ScalarExpr::one();
    }
    let det = determinant(&nmat);
    if det.is_zero() {
        return Err(ModelError::Singular);
    }
    let gamma_num = matmul(&adjugate(&nmat), &c.pi_matrix().to_vec());
    let gamma: Matrix = gamma_num
        .iter()
        .map(|r| r.iter().map(|e| e.checked_div(&det)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    // g[a][j] = Σ_c Γ^c_{ja} z_c
    let g: Matrix = (0..m)
        .map(|a| {
            (0..n)
                .map(|j| {
                    let mut acc = ScalarExpr::zero();
                    for (cc, zc) in z.iter().enumerate() {
                        let gam = c.gamma(j, a, cc);
                        if !gam.is_zero() {
                            acc = acc + gam * zc;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let lie: Matrix = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let mut acc = ScalarExpr::zero();
                    for (cc, zc) in z.iter().enumerate() {
                        if !c.c(a, b, cc).is_zero() {
                            acc = acc + c.c(a, b, cc) * zc;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let top_right = matmul(&gamma, &transpose(&g));
    let bottom_left = matmul(&g, &gamma);
    let bottom_right = matmul(&bottom_left, &transpose(&g));
    let size = n + m;
    let mut p = vec![vec![ScalarExpr::zero(); size]; size];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = gamma[i][j].clone();
        }
        for a in 0..m {
            p[i][n + a] = top_right[i][a].clone();
            p[n + a][i] = bottom_left[a][i].clone();
        }
    }
    for a in 0..m {
        for b in 0..m {
            p[n + a][n + b] = &bottom_right[a][b] + &lie[a][b];
        }
    }
    for i in 0..size {
        for j in i..size {
            if !(&p[i][j] + &p[j][i]).is_zero() {
                return Err(ModelError::NotAntisymmetric);
            }
        }
    }
    let bivector = Multivector::from_matrix(&chart, &p)?;
    Ok(PoissonModel {
        bivector,
        certificate: det,
        base_dim: n,
        rank: m,
    })
}

/// Closed codimension-one form `γ_t + γ_t♯(θ)∧t∂t` with `γ_t♯ = π♯∘(Id + tU)^{-1}`.
pub fn build_codim1(t: &Codim1Triple) -> Result<PoissonModel, ModelError> {
    let v = check_codim1_triple(t)?;
    if !v.passed() {
        return Err(ModelError::CouplingFails(v.failed_names().join(", ")));
    }
    codim1_closed_form(t, &default_fiber_names(t.chart(), 1)[0])
}

/// Closed form without re-checking the triple.
pub fn codim1_closed_form(t: &Codim1Triple, fiber: &str) -> Result<PoissonModel, ModelError> {
    let base = t.chart();
    let n = base.dim();
    let chart = total_chart(base, &[fiber.to_string()]);
    let tv = ScalarExpr::var(n);
    let id_tu: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { ScalarExpr::one() } else { ScalarExpr::zero() };
                    d + &tv * &t.u[i][j]
                })
                .collect()
        })
        .collect();
    let det = determinant(&id_tu);
    if det.is_zero() {
        return Err(ModelError::Singular);
    }
    let adj = adjugate(&id_tu);
    let pi = t.pi.matrix()?;
    // γ_t^{kl} = γ_t♯(dx^k)^l = Σ_j [(Id + tU)^{-1}]_{kj} π^{jl}
    let mut entries = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            let mut acc = ScalarExpr::zero();
            for j in 0..n {
                acc = acc + &adj[k][j] * &pi[j][l];
            }
            entries.push((k, l, acc.checked_div(&det)?));
        }
    }
    let gamma_t = Multivector::bivector(&chart, &entries)?;
    let theta_total = DiffForm::from_terms(&chart, 1, t.theta.terms().clone())?;
    let y = gamma_t.sharp(&theta_total)?;
    let euler = Multivector::basis(&chart, n).scale(&tv);
    let bivector = gamma_t.add(&y.wedge(&euler)?)?;
    Ok(PoissonModel {
        bivector,
        certificate: det,
        base_dim: n,
        rank: 1,
    })
}

/// Algebroid determined by coupling data in the frame `{dx_i} ∪ {dz_a}`.
pub fn expected_algebroid(c: &CouplingData) -> Result<AlgebroidData, AlgebroidError> {
    let (n, m) = (c.dim(), c.rank());
    let r = n + m;
    let p = c.pi_matrix();
    let mut alg = AlgebroidData::new(c.chart(), r);
    for i in 0..n {
        alg = alg.with_anchor(i, p[i].clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                alg = alg.with_bracket(i, j, k, p[i][j].differentiate(k));
            }
            for a in 0..m {
                let mut acc = ScalarExpr::zero();
                for k in 0..n {
                    acc = acc + c.u(i, a, k) * &p[j][k];
                }
                alg = alg.with_bracket(i, j, n + a, acc);
            }
        }
        for a in 0..m {
            for cc in 0..m {
                let mut acc = ScalarExpr::zero();
                for j in 0..n {
                    acc = acc + &p[i][j] * c.gamma(j, a, cc);
                }
                alg = alg.with_bracket(i, n + a, n + cc, acc);
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            for cc in 0..m {
                alg = alg.with_bracket(n + a, n + b, n + cc, c.c(a, b, cc).clone());
            }
        }
    }
    let im = (0..r)
        .map(|a| (0..n).map(|j| if a == j { ScalarExpr::one() } else { ScalarExpr::zero() }).collect())
        .collect();
    Ok(alg.with_im(im))
}

/// Labelled differences of anchor, structure functions and `μ`, using `got`'s labels.
pub fn compare_algebroids(got: &AlgebroidData, want: &AlgebroidData) -> Vec<(String, ScalarExpr)> {
    let mut out = Vec::new();
    let r = want.rank();
    let l = got.labels();
    for a in 0..r {
        for (j, (x, y)) in got.anchor()[a].iter().zip(&want.anchor()[a]).enumerate() {
            out.push((format!("anchor[{},{}]", l[a], j), x - y));
        }
        for b in a + 1..r {
            for cc in 0..r {
                out.push((
                    format!("C[{},{}]^{}", l[a], l[b], l[cc]),
                    got.c(a, b, cc) - want.c(a, b, cc),
                ));
            }
        }
        if let (Some(g), Some(w)) = (got.im(), want.im()) {
            for (j, (x, y)) in g[a].iter().zip(&w[a]).enumerate() {
                out.push((format!("mu[{},{}]", l[a], j), x - y));
            }
        }
    }
    out
}

/// Jacobi, jet recovery and tangency to `pr⁻¹(P)` for each coordinate
/// Poisson submanifold `P` of the base, given by its normal base indices.
pub fn verify_local_model(m: &PoissonModel, c: &CouplingData, leaves: &[Vec<usize>]) -> Result<Verdict, ModelError> {
    verify_local_model_with(m, c, leaves, &NumericOpts::default())
}

pub fn verify_local_model_with(
    m: &PoissonModel,
    c: &CouplingData,
    leaves: &[Vec<usize>],
    opts: &NumericOpts,
) -> Result<Verdict, ModelError> {
    if m.base_dim != c.dim() || m.rank != c.rank() || m.chart().names()[..m.base_dim] != c.chart().names()[..] {
        return Err(ModelError::ChartMismatch);
    }
    let pi0 = &m.bivector;
    let names = m.chart().names();
    let sq = pi0.schouten(pi0)?;
    let items = sq.terms().iter().map(|(idx, e)| (format!("[pi0,pi0]{idx:?}"), e.clone())).collect();
    let jacobi = decide("jacobi", items, names, opts).cite("local model");

    let zs = m.zero_section();
    let recovery = match jet_truncate(pi0, &zs).map_err(AlgebroidError::from).and_then(|j| jet_to_algebroid(&j)) {
        Ok(got) => {
            let want = expected_algebroid(c).expect("dimensions agree");
            let items = compare_algebroids(&got, &want);
            decide("jet_recovery", items, zs.base_chart().names(), opts)
        }
        Err(e) => CheckRecord::exact("jet_recovery", vec![e.to_string()]),
    }
    .cite("local model");

    let mut tangency = Vec::new();
    if let Err(e) = check_tangent(pi0, &zs) {
        tangency.push(format!("zero section: {e}"));
    }
    for leaf in leaves {
        let p_base = Submanifold::new(c.chart(), leaf)?;
        if let Err(e) = check_tangent(c.pi(), &p_base) {
            tangency.push(format!("P = {{{}}} is not Poisson in the base: {e}", leaf_name(c, leaf)));
            continue;
        }
        let pre = Submanifold::new(m.chart(), leaf)?;
        if let Err(e) = check_tangent(pi0, &pre) {
            tangency.push(format!("preimage of {{{}}}: {e}", leaf_name(c, leaf)));
        }
    }
    let tangency = CheckRecord::exact("leaf_tangency", tangency).cite("local model");
    Ok(Verdict::new(vec![jacobi, recovery, tangency]))
}

fn leaf_name(c: &CouplingData, leaf: &[usize]) -> String {
    leaf.iter().map(|&i| format!("{} = 0", c.chart().name(i))).collect::<Vec<_>>().join(", ")
}
