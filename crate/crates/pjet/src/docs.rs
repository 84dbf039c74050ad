//! JSON model documents and their conversion into domain objects.
//!
//! Every document carries a `kind` tag and refers to coordinates by name.
//! Expressions are strings in the chart's variables. See
//! `docs/documents.md` for the full format.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebroid::{AlgebroidData, Connection, Section, Splitting};
use crate::coupling::{Codim1Triple, CouplingData, CouplingError};
use crate::expr::{Chart, ScalarExpr};
use crate::geom::{DiffForm, Multivector};
use crate::groupoid::GroupoidChart;
use crate::homotopy::BundleChart;
use crate::jets::Submanifold;

/// Malformed input: unknown names, unparsable expressions, wrong shapes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct DocError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, DocError> {
    Err(DocError(msg.into()))
}

/// `[i, j, coeff]` entries of a bivector.
pub type BivectorDoc = Vec<(String, String, String)>;
/// `{name: coeff}` components of a vector field or 1-form.
pub type ComponentsDoc = BTreeMap<String, String>;
/// `[[names...], coeff]` terms of a form.
pub type FormDoc = Vec<(Vec<String>, String)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Poisson(PoissonDoc),
    Jet(JetDoc),
    Algebroid(AlgebroidDoc),
    Coupling(CouplingDoc),
    Codim1(Codim1Doc),
    Model(ModelDoc),
    Homotopy(HomotopyDoc),
    Groupoid(GroupoidDoc),
}

impl Document {
    pub fn from_json(src: &str) -> Result<Self, DocError> {
        serde_json::from_str(src).map_err(|e| DocError(format!("invalid document: {e}")))
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self, DocError> {
        serde_json::from_value(v).map_err(|e| DocError(format!("invalid document: {e}")))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Poisson(_) => "poisson",
            Document::Jet(_) => "jet",
            Document::Algebroid(_) => "algebroid",
            Document::Coupling(_) => "coupling",
            Document::Codim1(_) => "codim1",
            Document::Model(_) => "model",
            Document::Homotopy(_) => "homotopy",
            Document::Groupoid(_) => "groupoid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonDoc {
    pub chart: Vec<String>,
    pub pi: BivectorDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetDoc {
    pub chart: Vec<String>,
    pub pi: BivectorDoc,
    pub normal: Vec<String>,
    /// Algebroid the jet should induce, in the frame `dx_i, dz_a`.
    #[serde(default)]
    pub expected: Option<ExpectedAlgebroidDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedAlgebroidDoc {
    #[serde(default)]
    pub anchor: BTreeMap<String, ComponentsDoc>,
    #[serde(default)]
    pub brackets: Vec<(String, String, ComponentsDoc)>,
    #[serde(default)]
    pub im: Option<BTreeMap<String, ComponentsDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidDoc {
    pub chart: Vec<String>,
    pub labels: Vec<String>,
    #[serde(default)]
    pub anchor: BTreeMap<String, ComponentsDoc>,
    /// `[a, b, {c: coeff}]` meaning `[e_a, e_b] = Σ coeff e_c`.
    #[serde(default)]
    pub brackets: Vec<(String, String, ComponentsDoc)>,
    /// Rows of `μ`: `{label: {base name: coeff}}`.
    #[serde(default)]
    pub im: Option<BTreeMap<String, ComponentsDoc>>,
    #[serde(default)]
    pub cartan: Option<CartanDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartanDoc {
    /// `[x, a, b, coeff]`: coefficient of `e_b` in `∇_{∂x} e_a`.
    #[serde(default)]
    pub connection: Vec<(String, String, String, String)>,
    pub kernel: Vec<String>,
    /// `{k: {a: coeff}}`: coefficient of `e_k` in `l(e_a)`; coordinate projection when absent.
    #[serde(default)]
    pub splitting: Option<BTreeMap<String, ComponentsDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDoc {
    pub chart: Vec<String>,
    pub pi: BivectorDoc,
    /// Labels of the kernel frame.
    pub kernel: Vec<String>,
    #[serde(default)]
    pub structure: Vec<(String, String, ComponentsDoc)>,
    /// `[x, a, b, coeff]`: `Γ^b_{x a}`.
    #[serde(default)]
    pub connection: Vec<(String, String, String, String)>,
    /// `[x_i, a, x_j, coeff]`: `U^{i a}_j`.
    #[serde(default)]
    pub u: Vec<(String, String, String, String)>,
    /// Normal names of coordinate Poisson submanifolds of the base.
    #[serde(default)]
    pub leaves: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codim1Doc {
    pub chart: Vec<String>,
    pub pi: BivectorDoc,
    #[serde(default)]
    pub v: ComponentsDoc,
    #[serde(default)]
    pub lambda0: BivectorDoc,
    #[serde(default)]
    pub theta: ComponentsDoc,
    #[serde(default)]
    pub z: ComponentsDoc,
    /// Rows of `U`: `U(dx_i) = Σ_j u[i][j] dx_j`; zero when absent.
    #[serde(default)]
    pub u: Vec<Vec<String>>,
    #[serde(default)]
    pub leaves: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(default)]
    pub coupling: Option<CouplingDoc>,
    #[serde(default)]
    pub codim1: Option<Codim1Doc>,
    /// Expected bivector on base × fiber, compared coefficient by coefficient.
    #[serde(default)]
    pub expected: Option<BivectorDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyDoc {
    pub chart: Vec<String>,
    pub fiber: Vec<String>,
    pub degree: usize,
    pub form: FormDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposableDoc {
    /// Arrow coordinates equal to the source point.
    pub source_coordinates: Vec<String>,
    /// Remaining arrow coordinates, sampled freely.
    pub free: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub arrows: Vec<String>,
    pub base: Vec<String>,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub unit: Vec<String>,
    pub inverse: Vec<String>,
    /// In the coordinates of `G × G`: arrow names suffixed `_1` and `_2`.
    pub multiplication: Vec<String>,
    pub composable_parameterization: ComposableDoc,
    #[serde(default, rename = "box")]
    pub half_width: Option<f64>,
    pub form: FormDoc,
    /// `[label, {arrow name: coeff on base}]` sections of `ker ds` along units.
    #[serde(default)]
    pub frame: Vec<(String, ComponentsDoc)>,
    /// Expected `μ(e)` rows `{label: {base name: coeff}}`.
    #[serde(default)]
    pub im: Option<BTreeMap<String, ComponentsDoc>>,
    /// Expected brackets `[a, b, {c: coeff}]` in the frame.
    #[serde(default)]
    pub brackets: Vec<(String, String, ComponentsDoc)>,
}

/// Name lookups and expression parsing against one chart.
pub struct Names {
    chart: Arc<Chart>,
}

impl Names {
    pub fn new(names: &[String]) -> Result<Self, DocError> {
        let c = Chart::build(names, None).map_err(DocError)?;
        Ok(Names { chart: Arc::new(c) })
    }

    pub fn from_chart(chart: &Arc<Chart>) -> Self {
        Names { chart: chart.clone() }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn index(&self, name: &str) -> Result<usize, DocError> {
        self.chart
            .index_of(name)
            .ok_or_else(|| DocError(format!("unknown coordinate `{name}` (chart is {:?})", self.chart.names())))
    }

    pub fn expr(&self, src: &str) -> Result<ScalarExpr, DocError> {
        self.chart.parse(src).map_err(|e| DocError(format!("in `{src}`: {e}")))
    }

    pub fn bivector(&self, doc: &BivectorDoc) -> Result<Multivector, DocError> {
        let mut entries = Vec::with_capacity(doc.len());
        for (i, j, c) in doc {
            entries.push((self.index(i)?, self.index(j)?, self.expr(c)?));
        }
        Multivector::bivector(&self.chart, &entries).map_err(|e| DocError(e.to_string()))
    }

    pub fn components(&self, doc: &ComponentsDoc) -> Result<Vec<ScalarExpr>, DocError> {
        let mut out = vec![ScalarExpr::zero(); self.chart.dim()];
        for (k, v) in doc {
            out[self.index(k)?] = self.expr(v)?;
        }
        Ok(out)
    }

    pub fn vector(&self, doc: &ComponentsDoc) -> Result<Multivector, DocError> {
        Multivector::from_components(&self.chart, self.components(doc)?).map_err(|e| DocError(e.to_string()))
    }

    pub fn one_form(&self, doc: &ComponentsDoc) -> Result<DiffForm, DocError> {
        DiffForm::from_components(&self.chart, self.components(doc)?).map_err(|e| DocError(e.to_string()))
    }

    pub fn form(&self, degree: usize, doc: &FormDoc) -> Result<DiffForm, DocError> {
        let mut acc = DiffForm::zero(&self.chart, degree);
        for (names, c) in doc {
            if names.len() != degree {
                return err(format!("form term {names:?} does not have degree {degree}"));
            }
            let idx = names.iter().map(|n| self.index(n)).collect::<Result<Vec<_>, _>>()?;
            let mut term = DiffForm::scalar(&self.chart, self.expr(c)?);
            for i in idx {
                term = term.wedge(&DiffForm::basis(&self.chart, i)).map_err(|e| DocError(e.to_string()))?;
            }
            acc = acc.add(&term).map_err(|e| DocError(e.to_string()))?;
        }
        Ok(acc)
    }
}

fn label_index(labels: &[String], l: &str) -> Result<usize, DocError> {
    labels
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| DocError(format!("unknown frame label `{l}` (labels are {labels:?})")))
}

fn combination(labels: &[String], names: &Names, doc: &ComponentsDoc) -> Result<Section, DocError> {
    let mut out = vec![ScalarExpr::zero(); labels.len()];
    for (l, c) in doc {
        out[label_index(labels, l)?] = names.expr(c)?;
    }
    Ok(out)
}

fn normal_indices(names: &Names, normal: &[String]) -> Result<Vec<usize>, DocError> {
    normal.iter().map(|n| names.index(n)).collect()
}

impl PoissonDoc {
    pub fn bivector(&self) -> Result<Multivector, DocError> {
        Names::new(&self.chart)?.bivector(&self.pi)
    }
}

impl JetDoc {
    pub fn parts(&self) -> Result<(Multivector, Submanifold), DocError> {
        let names = Names::new(&self.chart)?;
        let pi = names.bivector(&self.pi)?;
        let s = Submanifold::new(names.chart(), &normal_indices(&names, &self.normal)?).map_err(|e| DocError(e.to_string()))?;
        Ok((pi, s))
    }
}

impl AlgebroidDoc {
    pub fn algebroid(&self) -> Result<AlgebroidData, DocError> {
        let names = Names::new(&self.chart)?;
        let labels = &self.labels;
        let r = labels.len();
        let mut alg = AlgebroidData::new(names.chart(), r).with_labels(labels.clone());
        for (l, comps) in &self.anchor {
            alg = alg.with_anchor(label_index(labels, l)?, names.components(comps)?);
        }
        for (a, b, rhs) in &self.brackets {
            let (a, b) = (label_index(labels, a)?, label_index(labels, b)?);
            if a == b {
                return err("bracket of a frame element with itself must be zero");
            }
            for (c, v) in combination(labels, &names, rhs)?.into_iter().enumerate() {
                alg = alg.with_bracket(a, b, c, v);
            }
        }
        if let Some(im) = &self.im {
            let mut rows = vec![vec![ScalarExpr::zero(); names.chart().dim()]; r];
            for (l, comps) in im {
                rows[label_index(labels, l)?] = names.components(comps)?;
            }
            alg = alg.with_im(rows);
        }
        Ok(alg)
    }

    pub fn cartan(&self) -> Result<Option<(Connection, Splitting)>, DocError> {
        let Some(c) = &self.cartan else {
            return Ok(None);
        };
        let names = Names::new(&self.chart)?;
        let labels = &self.labels;
        let (n, r) = (names.chart().dim(), labels.len());
        let mut nabla = Connection::trivial(n, r);
        for (x, a, b, v) in &c.connection {
            nabla = nabla.with(names.index(x)?, label_index(labels, a)?, label_index(labels, b)?, names.expr(v)?);
        }
        let kernel = c.kernel.iter().map(|k| label_index(labels, k)).collect::<Result<Vec<_>, _>>()?;
        let l = match &c.splitting {
            None => Splitting::projection(r, kernel),
            Some(rows) => {
                let mut matrix = vec![vec![ScalarExpr::zero(); r]; kernel.len()];
                for (k, row) in rows {
                    let ki = label_index(labels, k)?;
                    let pos = kernel
                        .iter()
                        .position(|&x| x == ki)
                        .ok_or_else(|| DocError(format!("splitting row `{k}` is not a kernel label")))?;
                    matrix[pos] = combination(labels, &names, row)?;
                }
                Splitting::new(r, kernel, matrix).map_err(|e| DocError(e.to_string()))?
            }
        };
        Ok(Some((nabla, l)))
    }
}

impl CouplingDoc {
    pub fn names(&self) -> Result<Names, DocError> {
        Names::new(&self.chart)
    }

    /// Domain errors (non-Poisson base, non-Lie kernel) are returned separately
    /// from document errors.
    pub fn coupling(&self) -> Result<Result<CouplingData, CouplingError>, DocError> {
        let names = self.names()?;
        let (n, m) = (names.chart().dim(), self.kernel.len());
        let pi = names.bivector(&self.pi)?;
        let zero_names = Names::new(&[])?;
        let mut structure = vec![vec![vec![ScalarExpr::zero(); m]; m]; m];
        for (a, b, rhs) in &self.structure {
            let (a, b) = (label_index(&self.kernel, a)?, label_index(&self.kernel, b)?);
            if a == b {
                return err("bracket of a kernel element with itself must be zero");
            }
            for (c, v) in combination(&self.kernel, &zero_names, rhs)?.into_iter().enumerate() {
                structure[b][a][c] = -&v;
                structure[a][b][c] = v;
            }
        }
        let mut gamma = vec![vec![vec![ScalarExpr::zero(); m]; m]; n];
        for (x, a, b, v) in &self.connection {
            gamma[names.index(x)?][label_index(&self.kernel, a)?][label_index(&self.kernel, b)?] = names.expr(v)?;
        }
        let mut u = vec![vec![vec![ScalarExpr::zero(); n]; m]; n];
        for (i, a, j, v) in &self.u {
            u[names.index(i)?][label_index(&self.kernel, a)?][names.index(j)?] = names.expr(v)?;
        }
        Ok(CouplingData::new(pi, structure, gamma, u))
    }

    pub fn leaves(&self) -> Result<Vec<Vec<usize>>, DocError> {
        let names = self.names()?;
        self.leaves.iter().map(|l| normal_indices(&names, l)).collect()
    }
}

impl Codim1Doc {
    pub fn triple(&self) -> Result<Result<Codim1Triple, CouplingError>, DocError> {
        let names = Names::new(&self.chart)?;
        let n = names.chart().dim();
        let u = if self.u.is_empty() {
            vec![vec![ScalarExpr::zero(); n]; n]
        } else {
            if self.u.len() != n || self.u.iter().any(|r| r.len() != n) {
                return err(format!("U must be a {n} x {n} matrix"));
            }
            self.u
                .iter()
                .map(|r| r.iter().map(|s| names.expr(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(Codim1Triple::new(
            names.bivector(&self.pi)?,
            names.vector(&self.v)?,
            names.bivector(&self.lambda0)?,
            names.one_form(&self.theta)?,
            names.vector(&self.z)?,
            u,
        ))
    }

    pub fn leaves(&self) -> Result<Vec<Vec<usize>>, DocError> {
        let names = Names::new(&self.chart)?;
        self.leaves.iter().map(|l| normal_indices(&names, l)).collect()
    }
}

impl HomotopyDoc {
    pub fn parts(&self) -> Result<(DiffForm, BundleChart), DocError> {
        let names = Names::new(&self.chart)?;
        let fiber = normal_indices(&names, &self.fiber)?;
        let b = BundleChart::new(names.chart(), &fiber).map_err(|e| DocError(e.to_string()))?;
        Ok((names.form(self.degree, &self.form)?, b))
    }
}

/// Groupoid chart, 2-form, and the optional frame with expected IM rows and brackets.
pub struct GroupoidParts {
    pub chart: GroupoidChart,
    pub omega: DiffForm,
    pub labels: Vec<String>,
    pub frame: Vec<Vec<ScalarExpr>>,
    pub im: Option<Vec<Vec<ScalarExpr>>>,
    /// `(a, b, [e_a, e_b] as a vector on the arrows along the units)`.
    pub brackets: Vec<(usize, usize, Vec<ScalarExpr>)>,
}

impl GroupoidDoc {
    pub fn parts(&self) -> Result<GroupoidParts, DocError> {
        Names::new(&self.arrows)?;
        Names::new(&self.base)?;
        let chart = GroupoidChart::parse(&self.arrows, &self.base, &self.source, &self.target, &self.unit, &self.inverse, &self.multiplication)
            .map_err(|e| DocError(e.to_string()))?;
        let chart = match self.half_width {
            Some(w) if w > 0.0 && w.is_finite() => chart.with_box(w),
            Some(w) => return err(format!("sampling box half-width must be positive, got {w}")),
            None => chart,
        };
        let arrows = Names::from_chart(chart.arrows());
        let base = Names::from_chart(chart.base());
        let declared = normal_indices(&arrows, &self.composable_parameterization.source_coordinates)?;
        if declared != chart.source_coords() {
            return err("composable_parameterization.source_coordinates must list the source map's coordinates in order");
        }
        let mut free = normal_indices(&arrows, &self.composable_parameterization.free)?;
        free.sort_unstable();
        let expect_free: Vec<usize> = (0..chart.arrows().dim()).filter(|i| !declared.contains(i)).collect();
        if free != expect_free {
            return err("composable_parameterization.free must list every other arrow coordinate");
        }
        let omega = arrows.form(2, &self.form)?;
        let labels: Vec<String> = self.frame.iter().map(|(l, _)| l.clone()).collect();
        let mut frame = Vec::with_capacity(self.frame.len());
        for (_, comps) in &self.frame {
            let mut v = vec![ScalarExpr::zero(); chart.arrows().dim()];
            for (k, c) in comps {
                v[arrows.index(k)?] = base.expr(c)?;
            }
            frame.push(v);
        }
        let im = match &self.im {
            None => None,
            Some(rows) => {
                let mut out = vec![vec![ScalarExpr::zero(); chart.base().dim()]; labels.len()];
                for (l, comps) in rows {
                    out[label_index(&labels, l)?] = base.components(comps)?;
                }
                Some(out)
            }
        };
        let mut brackets = Vec::new();
        for (a, b, rhs) in &self.brackets {
            let (a, b) = (label_index(&labels, a)?, label_index(&labels, b)?);
            let coeffs = combination(&labels, &base, rhs)?;
            let mut v = vec![ScalarExpr::zero(); chart.arrows().dim()];
            for (c, k) in coeffs.iter().enumerate() {
                for (i, fi) in frame[c].iter().enumerate() {
                    v[i] = &v[i] + &(k * fi);
                }
            }
            brackets.push((a, b, v));
        }
        Ok(GroupoidParts {
            chart,
            omega,
            labels,
            frame,
            im,
            brackets,
        })
    }
}

#[cfg(test)]
mod tests;
