//! Explicit Lie-groupoid charts and sampled checks of multiplicative 2-forms.
//!
//! Multiplication is a map on `G × G` (coordinates suffixed `_1`, `_2`) that
//! is only ever evaluated on composable pairs. Composable pairs are produced
//! by sampling `h` in a box and then `g` in the source fiber over `t(h)`,
//! which requires the source map to be a coordinate projection.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebroid::{field_bracket, Field};
use crate::expr::{Chart, ExprError, ScalarExpr};
use crate::geom::{DiffForm, GeomError, SmoothMap};
use crate::par;
use crate::report::{decide, CheckRecord, NumericOpts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("source map must be a coordinate projection; component {0} is not")]
    SourceNotProjection(usize),
    #[error("sampling hit poles too often ({0} valid of {1} requested)")]
    Sampling(usize, usize),
    #[error("form is not closed: {0}")]
    NotClosed(String),
    #[error("section is not tangent to the source fibers: {0}")]
    NotInKernel(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Structure maps of a groupoid `G ⇉ M` in one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidChart {
    arrows: Arc<Chart>,
    base: Arc<Chart>,
    pair: Arc<Chart>,
    source: SmoothMap,
    target: SmoothMap,
    unit: SmoothMap,
    inverse: SmoothMap,
    multiplication: SmoothMap,
    source_coords: Vec<usize>,
    half_width: f64,
}

/// Names of `G × G`: every arrow coordinate with `_1` and then `_2`.
pub fn pair_names(arrows: &Chart) -> Vec<String> {
    ["_1", "_2"]
        .iter()
        .flat_map(|s| arrows.names().iter().map(move |n| format!("{n}{s}")))
        .collect()
}

impl GroupoidChart {
    pub fn new(
        arrows: &Arc<Chart>,
        base: &Arc<Chart>,
        source: Vec<ScalarExpr>,
        target: Vec<ScalarExpr>,
        unit: Vec<ScalarExpr>,
        inverse: Vec<ScalarExpr>,
        multiplication: Vec<ScalarExpr>,
    ) -> Result<Self, GroupoidError> {
        let pair = Chart::new(&pair_names(arrows));
        let source_coords = source
            .iter()
            .enumerate()
            .map(|(k, e)| match e.variables().as_slice() {
                [i] if *e == ScalarExpr::var(*i) => Ok(*i),
                _ => Err(GroupoidError::SourceNotProjection(k)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupoidChart {
            source: SmoothMap::new(arrows, base, source)?,
            target: SmoothMap::new(arrows, base, target)?,
            unit: SmoothMap::new(base, arrows, unit)?,
            inverse: SmoothMap::new(arrows, arrows, inverse)?,
            multiplication: SmoothMap::new(&pair, arrows, multiplication)?,
            arrows: arrows.clone(),
            base: base.clone(),
            pair,
            source_coords,
            half_width: 1.0,
        })
    }

    /// Parse every structure map from strings; multiplication uses [`pair_names`].
    #[allow(clippy::too_many_arguments)]
    pub fn parse<S: AsRef<str>>(
        arrows: &[S],
        base: &[S],
        source: &[S],
        target: &[S],
        unit: &[S],
        inverse: &[S],
        multiplication: &[S],
    ) -> Result<Self, GroupoidError> {
        let a = Chart::new(arrows);
        let b = Chart::new(base);
        let p = Chart::new(&pair_names(&a));
        let on = |c: &Arc<Chart>, xs: &[S]| xs.iter().map(|s| c.parse(s.as_ref())).collect::<Result<Vec<_>, _>>();
        GroupoidChart::new(&a, &b, on(&a, source)?, on(&a, target)?, on(&b, unit)?, on(&a, inverse)?, on(&p, multiplication)?)
    }

    /// Half-width of the sampling box `[-w, w]^n`.
    pub fn with_box(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn arrows(&self) -> &Arc<Chart> {
        &self.arrows
    }

    pub fn base(&self) -> &Arc<Chart> {
        &self.base
    }

    pub fn source(&self) -> &SmoothMap {
        &self.source
    }

    pub fn target(&self) -> &SmoothMap {
        &self.target
    }

    pub fn unit(&self) -> &SmoothMap {
        &self.unit
    }

    pub fn inverse(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn multiplication(&self) -> &SmoothMap {
        &self.multiplication
    }

    pub fn source_coords(&self) -> &[usize] {
        &self.source_coords
    }

    pub fn to_json(&self) -> Value {
        let render = |m: &SmoothMap| m.components().iter().map(|c| c.to_string_with(m.source().names())).collect::<Vec<_>>();
        json!({
            "arrows": self.arrows.names(),
            "base": self.base.names(),
            "source": render(&self.source),
            "target": render(&self.target),
            "unit": render(&self.unit),
            "inverse": render(&self.inverse),
            "multiplication": render(&self.multiplication),
        })
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-self.half_width..=self.half_width)
    }

    /// An arrow with `s(g) = q` (or free when `q` is `None`).
    fn sample_arrow(&self, rng: &mut ChaCha8Rng, q: Option<&[f64]>) -> Vec<f64> {
        let mut g: Vec<f64> = (0..self.arrows.dim()).map(|_| self.uniform(rng)).collect();
        if let Some(q) = q {
            for (k, &i) in self.source_coords.iter().enumerate() {
                g[i] = q[k];
            }
        }
        g
    }

    /// A tangent vector at `g` with `ds(v) = w` (or free).
    fn sample_tangent(&self, rng: &mut ChaCha8Rng, w: Option<&[f64]>) -> Vec<f64> {
        self.sample_arrow(rng, w)
    }

    pub fn s(&self, g: &[f64]) -> Result<Vec<f64>, GroupoidError> {
        eval_map(&self.source, g)
    }

    pub fn t(&self, g: &[f64]) -> Result<Vec<f64>, GroupoidError> {
        eval_map(&self.target, g)
    }

    pub fn u(&self, x: &[f64]) -> Result<Vec<f64>, GroupoidError> {
        eval_map(&self.unit, x)
    }

    pub fn inv(&self, g: &[f64]) -> Result<Vec<f64>, GroupoidError> {
        eval_map(&self.inverse, g)
    }

    /// `g·h`; the caller is responsible for `s(g) = t(h)`.
    pub fn mul(&self, g: &[f64], h: &[f64]) -> Result<Vec<f64>, GroupoidError> {
        eval_map(&self.multiplication, &concat(g, h))
    }

    /// `(g, h)` with `s(g) = t(h)`.
    fn sample_composable(&self, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, Vec<f64>), GroupoidError> {
        let h = self.sample_arrow(rng, None);
        let q = self.t(&h)?;
        Ok((self.sample_arrow(rng, Some(&q)), h))
    }

    /// Right-invariant extension of a section `a` of `ker ds` along the units:
    /// `a^R(g) = dm_{(u(t(g)), g)}(a(t(g)), 0)`.
    pub fn right_invariant(&self, a: &[ScalarExpr]) -> Result<Field, GroupoidError> {
        let n = self.arrows.dim();
        if a.len() != n {
            return Err(GroupoidError::Dimension(format!("section needs {n} components")));
        }
        // first factor at u(t(g)), second factor at g
        let ut = self.target.then(&self.unit)?;
        let first: Vec<ScalarExpr> = ut.components().to_vec();
        let sub = |e: &ScalarExpr| e.substitute(&|j| if j < n { first[j].clone() } else { ScalarExpr::var(j - n) });
        let at = a.iter().map(|c| self.target.compose_scalar(c)).collect::<Result<Vec<_>, _>>()?;
        let mut field = vec![ScalarExpr::zero(); n];
        for (l, m) in self.multiplication.components().iter().enumerate() {
            for (k, ak) in at.iter().enumerate() {
                if ak.is_zero() {
                    continue;
                }
                let d = sub(&m.differentiate(k))?;
                field[l] = &field[l] + &(d * ak);
            }
        }
        Ok(field)
    }

    /// Restrict a field on `G` to the units, as a function of the base.
    fn at_units(&self, x: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, GroupoidError> {
        Ok(x.iter().map(|c| self.unit.compose_scalar(c)).collect::<Result<Vec<_>, _>>()?)
    }

    /// Algebroid bracket of two sections of `A = ker ds|_M`, computed exactly
    /// as `[a^R, b^R]` restricted to the units.
    pub fn algebroid_bracket(&self, a: &[ScalarExpr], b: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, GroupoidError> {
        self.require_kernel(a)?;
        self.require_kernel(b)?;
        let br = field_bracket(&self.right_invariant(a)?, &self.right_invariant(b)?);
        self.at_units(&br)
    }

    /// `dt(a)` along the units.
    pub fn anchor(&self, a: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, GroupoidError> {
        self.pushforward_at_units(&self.target, a)
    }

    fn pushforward_at_units(&self, map: &SmoothMap, a: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, GroupoidError> {
        let mut out = Vec::with_capacity(map.components().len());
        for c in map.components() {
            let mut acc = ScalarExpr::zero();
            for (k, ak) in a.iter().enumerate() {
                if !ak.is_zero() {
                    acc = acc + self.unit.compose_scalar(&c.differentiate(k))? * ak;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn require_kernel(&self, a: &[ScalarExpr]) -> Result<(), GroupoidError> {
        let ds = self.pushforward_at_units(&self.source, a)?;
        let names = self.base.names();
        if let Some(bad) = ds.iter().find(|c| !c.is_zero()) {
            return Err(GroupoidError::NotInKernel(bad.to_string_with(names)));
        }
        Ok(())
    }
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

fn eval_map(m: &SmoothMap, p: &[f64]) -> Result<Vec<f64>, GroupoidError> {
    m.components().iter().map(|c| c.eval(p).map_err(GroupoidError::from)).collect()
}

fn diff_map(m: &SmoothMap, p: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>), GroupoidError> {
    Ok(m.eval_dual(p, v)?)
}

/// Coefficient matrix `Ω_{ij} = ω(∂_i, ∂_j)` of a 2-form at a point.
pub fn form_matrix(omega: &DiffForm, p: &[f64]) -> Result<DMatrix<f64>, GroupoidError> {
    let n = omega.dim();
    let mut m = DMatrix::zeros(n, n);
    for (idx, c) in omega.terms() {
        let v = c.eval(p)?;
        m[(idx[0], idx[1])] = v;
        m[(idx[1], idx[0])] = -v;
    }
    Ok(m)
}

fn pair_value(m: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += a[i] * m[(i, j)] * b[j];
        }
    }
    acc
}

/// Outcome of a sampled numeric check.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVerdict {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub seed: u64,
    pub tol: f64,
    pub notes: Vec<String>,
}

impl SampledVerdict {
    fn from_samples(name: &str, seed: u64, tol: f64, batches: Vec<Result<Batch, GroupoidError>>, want: usize) -> Result<Self, GroupoidError> {
        let mut samples = 0;
        let mut worst = 0.0f64;
        let mut notes = Vec::new();
        for b in batches {
            let b = b?;
            samples += b.taken;
            if b.worst > worst || b.worst.is_nan() {
                worst = if b.worst.is_nan() { f64::INFINITY } else { b.worst };
            }
            notes.extend(b.notes);
        }
        if samples < want {
            return Err(GroupoidError::Sampling(samples, want));
        }
        notes.truncate(8);
        Ok(SampledVerdict {
            name: name.into(),
            passed: worst < tol,
            samples,
            max_residual: worst,
            seed,
            tol,
            notes,
        })
    }

    pub fn to_record(&self) -> CheckRecord {
        CheckRecord::numeric(self.name.clone(), self.passed, self.max_residual, self.samples, self.notes.clone())
    }
}

struct Batch {
    taken: usize,
    worst: f64,
    notes: Vec<String>,
}

const BATCH: usize = 16;

/// Run `samples` draws of `one` in seeded batches; a draw returning `Err` is a
/// pole and is retried within a 10× budget.
fn sampled<F>(name: &str, samples: usize, seed: u64, tol: f64, stream: u64, one: F) -> Result<SampledVerdict, GroupoidError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(f64, Option<String>), GroupoidError> + Sync + Send,
{
    let nb = samples.div_ceil(BATCH);
    let batches = par::map_indexed(nb, |b| {
        let want = BATCH.min(samples - b * BATCH);
        let mut rng = par::rng(seed, (stream << 32) | b as u64);
        let mut batch = Batch {
            taken: 0,
            worst: 0.0,
            notes: Vec::new(),
        };
        let mut attempts = 0;
        while batch.taken < want && attempts < 10 * want {
            attempts += 1;
            match one(&mut rng) {
                Ok((r, note)) => {
                    batch.taken += 1;
                    if r > batch.worst || r.is_nan() {
                        batch.worst = if r.is_nan() { f64::INFINITY } else { r };
                    }
                    if r >= tol {
                        batch.notes.extend(note);
                    }
                }
                Err(GroupoidError::Expr(ExprError::Pole)) | Err(GroupoidError::Geom(GeomError::Expr(ExprError::Pole))) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(batch)
    });
    SampledVerdict::from_samples(name, seed, tol, batches, samples)
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / 1f64.max(x.abs()).max(y.abs()))
        .fold(0.0, f64::max)
}

/// Unit, inverse, source/target and associativity laws at sampled points.
pub fn check_axioms(g: &GroupoidChart, samples: usize, seed: u64) -> Result<SampledVerdict, GroupoidError> {
    sampled("groupoid_axioms", samples, seed, 1e-10, 1, |rng| {
        let k = g.sample_arrow(rng, None);
        let h = g.sample_arrow(rng, Some(&g.t(&k)?));
        let a = g.sample_arrow(rng, Some(&g.t(&h)?));
        let x = g.s(&k)?;
        let ux = g.u(&x)?;
        let mut worst = [
            ("s(u(x)) = x", rel(&g.s(&ux)?, &x)),
            ("t(u(x)) = x", rel(&g.t(&ux)?, &x)),
            ("g u(s(g)) = g", rel(&g.mul(&a, &g.u(&g.s(&a)?)?)?, &a)),
            ("u(t(g)) g = g", rel(&g.mul(&g.u(&g.t(&a)?)?, &a)?, &a)),
            ("g g^-1 = u(t(g))", rel(&g.mul(&a, &g.inv(&a)?)?, &g.u(&g.t(&a)?)?)),
            ("g^-1 g = u(s(g))", rel(&g.mul(&g.inv(&a)?, &a)?, &g.u(&g.s(&a)?)?)),
            ("s(gh) = s(h)", rel(&g.s(&g.mul(&a, &h)?)?, &g.s(&h)?)),
            ("t(gh) = t(g)", rel(&g.t(&g.mul(&a, &h)?)?, &g.t(&a)?)),
            ("(gh)k = g(hk)", rel(&g.mul(&g.mul(&a, &h)?, &k)?, &g.mul(&a, &g.mul(&h, &k)?)?)),
        ]
        .into_iter()
        .fold(("", 0.0f64), |acc, (l, r)| if r > acc.1 { (l, r) } else { acc });
        if worst.0.is_empty() {
            worst.0 = "all";
        }
        Ok((worst.1, Some(format!("{} off by {:.3e} at g = {:?}", worst.0, worst.1, a))))
    })
}

/// `m*ω − pr₁*ω − pr₂*ω` on random tangent pairs at random composable points,
/// relative to the size of the three terms.
pub fn check_multiplicative(g: &GroupoidChart, omega: &DiffForm, samples: usize, seed: u64) -> Result<SampledVerdict, GroupoidError> {
    check_multiplicative_with(g, omega, samples, seed, 1e-9)
}

pub fn check_multiplicative_with(
    g: &GroupoidChart,
    omega: &DiffForm,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SampledVerdict, GroupoidError> {
    if omega.chart() != g.arrows() || omega.degree() != 2 {
        return Err(GroupoidError::Dimension("omega must be a 2-form on the arrow chart".into()));
    }
    sampled("multiplicative", samples, seed, tol, 2, |rng| {
        let (a, b) = g.sample_composable(rng)?;
        let mut vecs = Vec::new();
        for _ in 0..2 {
            let db = g.sample_tangent(rng, None);
            let (_, dt) = diff_map(g.target(), &b, &db)?;
            let da = g.sample_tangent(rng, Some(&dt));
            vecs.push((da, db));
        }
        let p = concat(&a, &b);
        let (m, dm1) = diff_map(g.multiplication(), &p, &concat(&vecs[0].0, &vecs[0].1))?;
        let (_, dm2) = diff_map(g.multiplication(), &p, &concat(&vecs[1].0, &vecs[1].1))?;
        let lhs = pair_value(&form_matrix(omega, &m)?, &dm1, &dm2);
        let t1 = pair_value(&form_matrix(omega, &a)?, &vecs[0].0, &vecs[1].0);
        let t2 = pair_value(&form_matrix(omega, &b)?, &vecs[0].1, &vecs[1].1);
        let scale = 1f64.max(lhs.abs()).max(t1.abs()).max(t2.abs());
        let r = (lhs - t1 - t2).abs() / scale;
        Ok((r, Some(format!("residual {r:.3e} at g = {a:?}, h = {b:?}"))))
    })
}

/// Exact `dω = 0` when the coefficients are rational, sampled otherwise.
pub fn check_closed(omega: &DiffForm, opts: &NumericOpts) -> CheckRecord {
    let d = omega.exterior_derivative();
    let items = d.terms().iter().map(|(idx, c)| (format!("d(omega){idx:?}"), c.clone())).collect();
    decide("closed", items, omega.chart().names(), opts)
}

/// Rank of `ω` equals `2·dim M` at sampled units and arrows, and sampled
/// kernel vectors are killed by `ds` and `dt`.
pub fn check_oversymplectic(g: &GroupoidChart, omega: &DiffForm, samples: usize, seed: u64) -> Result<SampledVerdict, GroupoidError> {
    let closed = check_closed(
        omega,
        &NumericOpts {
            samples,
            seed,
            ..NumericOpts::default()
        },
    );
    if !closed.passed() {
        return Err(GroupoidError::NotClosed(closed.residuals.join("; ")));
    }
    let want = 2 * g.base().dim();
    sampled("oversymplectic", samples, seed, 1e-8, 3, |rng| {
        // alternate units and general arrows
        let p = if rng.gen_bool(0.5) {
            let x: Vec<f64> = (0..g.base().dim()).map(|_| g.uniform(rng)).collect();
            g.u(&x)?
        } else {
            g.sample_arrow(rng, None)
        };
        let m = form_matrix(omega, &p)?;
        let svd = m.clone().svd(false, true);
        let top = svd.singular_values.max();
        let cut = 1e-8 * top.max(f64::MIN_POSITIVE);
        let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
        if rank != want {
            let r = (rank as f64 - want as f64).abs();
            return Ok((r, Some(format!("rank {rank} (want {want}) at {p:?}"))));
        }
        let vt = svd.v_t.expect("requested");
        let mut worst = 0.0f64;
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > cut {
                continue;
            }
            let v: Vec<f64> = vt.row(k).iter().copied().collect();
            let (_, ds) = diff_map(g.source(), &p, &v)?;
            let (_, dt) = diff_map(g.target(), &p, &v)?;
            worst = ds.iter().chain(&dt).fold(worst, |w, x| w.max(x.abs()));
        }
        Ok((worst, Some(format!("kernel leaves ker ds ∩ ker dt by {worst:.3e} at {p:?}"))))
    })
}

/// `μ(a)_j = ω(a, du(∂_j))` at the units, exactly.
pub fn induced_im(g: &GroupoidChart, omega: &DiffForm, frame: &[Vec<ScalarExpr>]) -> Result<Vec<Vec<ScalarExpr>>, GroupoidError> {
    let n = g.arrows().dim();
    let om: Vec<Vec<ScalarExpr>> = (0..n)
        .map(|i| (0..n).map(|j| g.unit().compose_scalar(&omega.component(&[i, j]))).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(frame.len());
    for a in frame {
        g.require_kernel(a)?;
        let row = (0..g.base().dim())
            .map(|j| {
                let mut acc = ScalarExpr::zero();
                for (k, ak) in a.iter().enumerate() {
                    for (l, ul) in g.unit().components().iter().enumerate() {
                        let du = ul.differentiate(j);
                        if !ak.is_zero() && !du.is_zero() && !om[k][l].is_zero() {
                            acc = acc + ak * &om[k][l] * du;
                        }
                    }
                }
                acc
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// Sampled comparison of `μ(a) = i_a ω|_{TM}` at units with expected rows.
pub fn check_induced_im(
    g: &GroupoidChart,
    omega: &DiffForm,
    frame: &[Vec<ScalarExpr>],
    expected: &[Vec<ScalarExpr>],
    samples: usize,
    seed: u64,
) -> Result<SampledVerdict, GroupoidError> {
    let nb = g.base().dim();
    if frame.len() != expected.len() || expected.iter().any(|r| r.len() != nb) {
        return Err(GroupoidError::Dimension("expected IM rows must be rank x dim base".into()));
    }
    for a in frame {
        g.require_kernel(a)?;
    }
    sampled("induced_im", samples, seed, 1e-9, 4, |rng| {
        let x: Vec<f64> = (0..nb).map(|_| g.uniform(rng)).collect();
        let p = g.u(&x)?;
        let m = form_matrix(omega, &p)?;
        let mut worst = 0.0f64;
        for (a, want) in frame.iter().zip(expected) {
            let av = a.iter().map(|c| c.eval(&x)).collect::<Result<Vec<_>, _>>()?;
            for (j, w) in want.iter().enumerate() {
                let mut e = vec![0.0; nb];
                e[j] = 1.0;
                let (_, du) = diff_map(g.unit(), &x, &e)?;
                let got = pair_value(&m, &av, &du);
                worst = worst.max((got - w.eval(&x)?).abs());
            }
        }
        Ok((worst, Some(format!("mismatch {worst:.3e} at x = {x:?}"))))
    })
}
