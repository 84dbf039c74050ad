//! One function per CLI command: document in, verdict and output out.
//!
//! Domain-level refusals (a non-Poisson base, a non-closed form, a jet that is
//! not tangent) become a failing `precondition` record; only malformed
//! documents are errors.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::algebroid::{check_cartan_splitting, check_closed_im, check_jacobi, jet_to_algebroid, AlgebroidData};
use crate::coupling::{check_codim1_triple_with, check_coupling_with, couplingdata_from_codim1, CouplingData};
use crate::docs::{AlgebroidDoc, Codim1Doc, CouplingDoc, DocError, Document, JetDoc, ModelDoc, Names};
use crate::expr::ScalarExpr;
use crate::geom::{DiffForm, Multivector, SmoothMap};
use crate::groupoid::{check_axioms, check_closed, check_induced_im, check_multiplicative_with, check_oversymplectic, induced_im};
use crate::homotopy::{homotopy_primitive, render};
use crate::jets::{check_poisson, check_second_order_with, jet_truncate};
use crate::localmodel::{build_codim1, build_local_model, compare_algebroids, verify_local_model_with, PoissonModel};
use crate::report::{decide, CheckRecord, NumericOpts, Verdict};

/// The operations a pipeline run went through, for coverage accounting.
pub type Ops = BTreeSet<&'static str>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    CheckPoisson,
    JetCompute,
    JetCheck,
    AlgebroidFromJet,
    AlgebroidCheck,
    CouplingCheck,
    Codim1Check,
    ModelBuild,
    ModelVerify,
    HomotopyPrimitive,
    GroupoidCheck,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::CheckPoisson,
        Command::JetCompute,
        Command::JetCheck,
        Command::AlgebroidFromJet,
        Command::AlgebroidCheck,
        Command::CouplingCheck,
        Command::Codim1Check,
        Command::ModelBuild,
        Command::ModelVerify,
        Command::HomotopyPrimitive,
        Command::GroupoidCheck,
    ];

    pub fn words(self) -> [&'static str; 2] {
        match self {
            Command::CheckPoisson => ["check", "poisson"],
            Command::JetCompute => ["jet", "compute"],
            Command::JetCheck => ["jet", "check"],
            Command::AlgebroidFromJet => ["algebroid", "from-jet"],
            Command::AlgebroidCheck => ["algebroid", "check"],
            Command::CouplingCheck => ["coupling", "check"],
            Command::Codim1Check => ["codim1", "check"],
            Command::ModelBuild => ["model", "build"],
            Command::ModelVerify => ["model", "verify"],
            Command::HomotopyPrimitive => ["homotopy", "primitive"],
            Command::GroupoidCheck => ["groupoid", "check"],
        }
    }

    pub fn from_words(group: &str, action: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.words() == [group, action])
    }

    /// The command a catalog entry of this document kind runs.
    pub fn for_kind(kind: &str) -> Option<Command> {
        Some(match kind {
            "poisson" => Command::CheckPoisson,
            "jet" => Command::AlgebroidFromJet,
            "algebroid" => Command::AlgebroidCheck,
            "coupling" => Command::CouplingCheck,
            "codim1" => Command::Codim1Check,
            "model" => Command::ModelVerify,
            "homotopy" => Command::HomotopyPrimitive,
            "groupoid" => Command::GroupoidCheck,
            _ => return None,
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.words();
        write!(f, "{a} {b}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub output: Value,
    pub ops: Ops,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            verdict: Verdict::default(),
            output: Value::Null,
            ops: Ops::new(),
        }
    }

    fn op(&mut self, name: &'static str) {
        self.ops.insert(name);
    }

    fn ops(&mut self, names: &[&'static str]) {
        self.ops.extend(names.iter().copied());
    }

    fn push(&mut self, r: CheckRecord) {
        self.verdict.push(r);
    }

    fn refuse(mut self, why: impl fmt::Display) -> Self {
        self.push(CheckRecord::exact("precondition", vec![why.to_string()]));
        self
    }
}

fn named_terms(terms: &std::collections::BTreeMap<Vec<usize>, ScalarExpr>, names: &[String]) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(idx, c)| json!([idx.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(), c.to_string_with(names)]))
            .collect(),
    )
}

fn multivector_json(m: &Multivector) -> Value {
    named_terms(m.terms(), m.chart().names())
}

fn form_json(f: &DiffForm) -> Value {
    named_terms(f.terms(), f.chart().names())
}

fn wrong_kind<T>(cmd: Command, doc: &Document, want: &str) -> Result<T, DocError> {
    Err(DocError(format!("`{cmd}` expects a {want} document, got kind `{}`", doc.kind())))
}

/// Run one command on a parsed document.
pub fn run(cmd: Command, doc: &Document, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let mut out = Outcome::new();
    out.op("normalize");
    match (cmd, doc) {
        (Command::CheckPoisson, Document::Poisson(p)) => {
            let pi = p.bivector()?;
            poisson(out, &pi)
        }
        (Command::CheckPoisson, Document::Jet(j)) => {
            let (pi, _) = j.parts()?;
            poisson(out, &pi)
        }
        (Command::CheckPoisson, _) => wrong_kind(cmd, doc, "poisson or jet"),
        (Command::JetCompute, Document::Jet(j)) => jet_compute(out, j),
        (Command::JetCheck, Document::Jet(j)) => jet_check(out, j, opts),
        (Command::AlgebroidFromJet, Document::Jet(j)) => algebroid_from_jet(out, j, opts),
        (Command::JetCompute | Command::JetCheck | Command::AlgebroidFromJet, _) => wrong_kind(cmd, doc, "jet"),
        (Command::AlgebroidCheck, Document::Algebroid(a)) => algebroid_check(out, a),
        (Command::AlgebroidCheck, _) => wrong_kind(cmd, doc, "algebroid"),
        (Command::CouplingCheck, Document::Coupling(c)) => coupling_check(out, c, opts),
        (Command::CouplingCheck, _) => wrong_kind(cmd, doc, "coupling"),
        (Command::Codim1Check, Document::Codim1(t)) => codim1_check(out, t, opts),
        (Command::Codim1Check, _) => wrong_kind(cmd, doc, "codim1"),
        (Command::ModelBuild | Command::ModelVerify, Document::Model(m)) => model(out, m, cmd == Command::ModelVerify, opts),
        (Command::ModelBuild | Command::ModelVerify, _) => wrong_kind(cmd, doc, "model"),
        (Command::HomotopyPrimitive, Document::Homotopy(h)) => homotopy(out, h),
        (Command::HomotopyPrimitive, _) => wrong_kind(cmd, doc, "homotopy"),
        (Command::GroupoidCheck, Document::Groupoid(g)) => groupoid(out, g, opts),
        (Command::GroupoidCheck, _) => wrong_kind(cmd, doc, "groupoid"),
    }
}

fn poisson(mut out: Outcome, pi: &Multivector) -> Result<Outcome, DocError> {
    out.ops(&["schouten", "differentiate"]);
    let (rec, sq) = check_poisson(pi).map_err(|e| DocError(e.to_string()))?;
    out.push(rec);
    out.output = json!({"schouten": multivector_json(&sq)});
    Ok(out)
}

fn jet_compute(mut out: Outcome, j: &JetDoc) -> Result<Outcome, DocError> {
    let (pi, s) = j.parts()?;
    out.ops(&["jet_truncate", "ideal_membership"]);
    match jet_truncate(&pi, &s) {
        Ok(jet) => {
            out.push(CheckRecord::exact("tangent", vec![]));
            out.output = json!({
                "normal": j.normal,
                "representative": multivector_json(jet.representative()),
            });
            Ok(out)
        }
        Err(e) => Ok(out.refuse(e)),
    }
}

fn jet_check(mut out: Outcome, j: &JetDoc, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let (pi, s) = j.parts()?;
    out.ops(&["check_second_order", "ideal_membership", "schouten", "differentiate"]);
    match check_second_order_with(&pi, &s, opts.samples, opts.seed, opts.tol) {
        Ok(so) => {
            out.output = json!({
                "schouten": multivector_json(&so.schouten),
                "offending": crate::jets::render(&so.offending, pi.chart().names()),
            });
            out.push(so.record);
            Ok(out)
        }
        Err(e) => Ok(out.refuse(e)),
    }
}

fn algebroid_from_jet(mut out: Outcome, j: &JetDoc, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let expected = j.expected.clone();
    out = jet_check(out, j, opts)?;
    if !out.verdict.passed() {
        return Ok(out);
    }
    let (pi, s) = j.parts()?;
    out.ops(&["jet_truncate", "jet_to_algebroid", "cotangent_bracket"]);
    let alg = match jet_truncate(&pi, &s).map_err(|e| e.to_string()).and_then(|jet| jet_to_algebroid(&jet).map_err(|e| e.to_string())) {
        Ok(a) => a,
        Err(e) => return Ok(out.refuse(e)),
    };
    out = algebroid_records(out, &alg)?;
    if let Some(exp) = expected {
        let doc = AlgebroidDoc {
            chart: alg.chart().names().to_vec(),
            labels: alg.labels().to_vec(),
            anchor: exp.anchor,
            brackets: exp.brackets,
            im: exp.im,
            cartan: None,
        };
        let want = doc.algebroid()?;
        let items = compare_algebroids(&alg, &want);
        out.push(decide("expected_algebroid", items, alg.chart().names(), opts));
    }
    let schouten = out.output["schouten"].take();
    out.output = json!({"schouten": schouten, "algebroid": alg.to_json()});
    Ok(out)
}

fn algebroid_records(mut out: Outcome, alg: &AlgebroidData) -> Result<Outcome, DocError> {
    out.op("check_jacobi");
    out.verdict.extend(check_jacobi(alg));
    if alg.im().is_some() {
        out.op("check_closed_im");
        match check_closed_im(alg) {
            Ok(v) => out.verdict.extend(v),
            Err(e) => return Ok(out.refuse(e)),
        }
    }
    Ok(out)
}

fn algebroid_check(mut out: Outcome, a: &AlgebroidDoc) -> Result<Outcome, DocError> {
    let alg = a.algebroid()?;
    let cartan = a.cartan()?;
    out = algebroid_records(out, &alg)?;
    if let Some((nabla, l)) = cartan {
        out.op("check_cartan_splitting");
        match check_cartan_splitting(&alg, &nabla, &l) {
            Ok(v) => out.verdict.extend(v),
            Err(e) => return Ok(out.refuse(e)),
        }
    }
    out.output = json!({"algebroid": alg.to_json()});
    Ok(out)
}

fn coupling_records(out: &mut Outcome, c: &CouplingData, opts: &NumericOpts) {
    out.op("check_coupling");
    out.verdict.extend(check_coupling_with(c, opts));
}

fn coupling_check(mut out: Outcome, c: &CouplingDoc, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let data = match c.coupling()? {
        Ok(d) => d,
        Err(e) => return Ok(out.refuse(e)),
    };
    coupling_records(&mut out, &data, opts);
    out.output = json!({"coupling": data.to_json()});
    Ok(out)
}

fn codim1_check(mut out: Outcome, t: &Codim1Doc, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let triple = match t.triple()? {
        Ok(t) => t,
        Err(e) => return Ok(out.refuse(e)),
    };
    out.ops(&["check_codim1_triple", "exterior_derivative"]);
    match check_codim1_triple_with(&triple, opts) {
        Ok(v) => out.verdict.extend(v),
        Err(e) => return Ok(out.refuse(e)),
    }
    let mut output = json!({"triple": triple.to_json()});
    if out.verdict.passed() {
        out.op("couplingdata_from_codim1");
        match couplingdata_from_codim1(&triple) {
            Ok(d) => output["coupling"] = d.to_json(),
            Err(e) => return Ok(out.refuse(e)),
        }
    }
    out.output = output;
    Ok(out)
}

fn compare_bivectors(name: &str, got: &Multivector, want: &Multivector, opts: &NumericOpts) -> CheckRecord {
    let names = got.chart().names();
    match got.sub(want) {
        Ok(d) => {
            let items = d.terms().iter().map(|(idx, c)| (format!("{name}{idx:?}"), c.clone())).collect();
            decide(name, items, names, opts)
        }
        Err(e) => CheckRecord::exact(name, vec![e.to_string()]),
    }
}

fn model(mut out: Outcome, m: &ModelDoc, verify: bool, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let (built, data, leaves): (PoissonModel, CouplingData, Vec<Vec<usize>>) = match (&m.coupling, &m.codim1) {
        (Some(c), None) => {
            let data = match c.coupling()? {
                Ok(d) => d,
                Err(e) => return Ok(out.refuse(e)),
            };
            coupling_records(&mut out, &data, opts);
            if !out.verdict.passed() {
                return Ok(out);
            }
            out.op("build_local_model");
            match build_local_model(&data) {
                Ok(b) => (b, data, c.leaves()?),
                Err(e) => return Ok(out.refuse(e)),
            }
        }
        (None, Some(t)) => {
            let triple = match t.triple()? {
                Ok(t) => t,
                Err(e) => return Ok(out.refuse(e)),
            };
            out.ops(&["check_codim1_triple", "build_codim1", "couplingdata_from_codim1", "build_local_model"]);
            match check_codim1_triple_with(&triple, opts) {
                Ok(v) => out.verdict.extend(v),
                Err(e) => return Ok(out.refuse(e)),
            }
            if !out.verdict.passed() {
                return Ok(out);
            }
            let closed = match build_codim1(&triple) {
                Ok(b) => b,
                Err(e) => return Ok(out.refuse(e)),
            };
            let data = match couplingdata_from_codim1(&triple) {
                Ok(d) => d,
                Err(e) => return Ok(out.refuse(e)),
            };
            match build_local_model(&data) {
                Ok(block) => {
                    let mut rec = compare_bivectors("cross_check", closed.bivector(), block.bivector(), opts);
                    if closed.certificate() != block.certificate() {
                        rec = CheckRecord::exact("cross_check", [rec.residuals, vec!["domain certificates differ".into()]].concat());
                    }
                    out.push(rec);
                }
                Err(e) => return Ok(out.refuse(e)),
            }
            (closed, data, t.leaves()?)
        }
        _ => return Err(DocError("a model document needs exactly one of `coupling` or `codim1`".into())),
    };
    let certificate = if built.certificate_covers() {
        vec![]
    } else {
        vec![format!("denominators are not covered by {}", built.certificate().to_string_with(built.chart().names()))]
    };
    out.push(CheckRecord::exact("domain_certificate", certificate));
    if let Some(exp) = &m.expected {
        let want = Names::from_chart(built.chart()).bivector(exp)?;
        out.push(compare_bivectors("closed_form", built.bivector(), &want, opts));
    }
    if verify {
        out.ops(&["verify_local_model", "schouten", "jet_truncate", "jet_to_algebroid"]);
        match verify_local_model_with(&built, &data, &leaves, opts) {
            Ok(v) => out.verdict.extend(v),
            Err(e) => return Ok(out.refuse(e)),
        }
    }
    let mut output = built.to_json();
    output["bivector_named"] = multivector_json(built.bivector());
    out.output = json!({"model": output});
    Ok(out)
}

fn homotopy(mut out: Outcome, h: &crate::docs::HomotopyDoc) -> Result<Outcome, DocError> {
    let (alpha, b) = h.parts()?;
    out.ops(&["homotopy_primitive", "exterior_derivative"]);
    let beta = match homotopy_primitive(&alpha, &b) {
        Ok(beta) => beta,
        Err(e) => return Ok(out.refuse(e)),
    };
    let chart = b.chart();
    let names = chart.names();
    let residual = beta.exterior_derivative().sub(&alpha).map_err(|e| DocError(e.to_string()))?;
    let items = residual.terms().iter().map(|(idx, c)| (format!("d(beta) - alpha {idx:?}"), c.clone())).collect();
    out.push(decide("primitive", items, names, &NumericOpts::default()));

    // i*β along the zero section, as a map from the base coordinates
    out.op("pullback");
    let base_names: Vec<String> = (0..chart.dim()).filter(|&i| !b.is_fiber(i)).map(|i| names[i].clone()).collect();
    let base = Names::new(&base_names)?;
    let comps: Vec<ScalarExpr> = (0..chart.dim())
        .map(|i| match base.chart().index_of(&names[i]) {
            Some(k) if !b.is_fiber(i) => ScalarExpr::var(k),
            _ => ScalarExpr::zero(),
        })
        .collect();
    let zero_section = SmoothMap::new(base.chart(), chart, comps).map_err(|e| DocError(e.to_string()))?;
    let restricted = beta.pullback(&zero_section).map_err(|e| DocError(e.to_string()))?;
    out.push(CheckRecord::exact(
        "vanishes_on_zero_section",
        if restricted.is_zero() { vec![] } else { vec![render(&restricted, base.chart().names())] },
    ));
    out.output = json!({"primitive": form_json(&beta), "rendered": render(&beta, names)});
    Ok(out)
}

fn groupoid(mut out: Outcome, g: &crate::docs::GroupoidDoc, opts: &NumericOpts) -> Result<Outcome, DocError> {
    let parts = g.parts()?;
    let chart = &parts.chart;
    let omega = &parts.omega;
    let (samples, seed) = (opts.samples, opts.seed);
    out.ops(&["eval_dual", "exterior_derivative"]);
    match check_axioms(chart, samples, seed) {
        Ok(v) => out.push(v.to_record()),
        Err(e) => out.push(CheckRecord::exact("groupoid_axioms", vec![e.to_string()])),
    }
    let closed = check_closed(omega, opts);
    let is_closed = closed.passed();
    out.push(closed);
    out.op("check_multiplicative");
    match check_multiplicative_with(chart, omega, samples, seed, opts.tol) {
        Ok(v) => out.push(v.to_record()),
        Err(e) => out.push(CheckRecord::exact("multiplicative", vec![e.to_string()])),
    }
    if is_closed {
        out.op("check_oversymplectic");
        match check_oversymplectic(chart, omega, samples, seed) {
            Ok(v) => out.push(v.to_record()),
            Err(e) => out.push(CheckRecord::exact("oversymplectic", vec![e.to_string()])),
        }
    }
    let mut output = json!({"groupoid": chart.to_json()});
    if !parts.frame.is_empty() {
        let base_names = chart.base().names();
        match induced_im(chart, omega, &parts.frame) {
            Ok(rows) => {
                output["induced_im"] = rows
                    .iter()
                    .zip(&parts.labels)
                    .map(|(r, l)| (l.clone(), json!(r.iter().map(|e| e.to_string_with(base_names)).collect::<Vec<_>>())))
                    .collect::<serde_json::Map<_, _>>()
                    .into();
            }
            Err(e) => out.push(CheckRecord::exact("induced_im", vec![e.to_string()])),
        }
        if let Some(want) = &parts.im {
            match check_induced_im(chart, omega, &parts.frame, want, samples, seed) {
                Ok(v) => out.push(v.to_record()),
                Err(e) => out.push(CheckRecord::exact("induced_im", vec![e.to_string()])),
            }
        }
        if !parts.brackets.is_empty() {
            let arrow_names = chart.arrows().names();
            let mut items = Vec::new();
            for (a, b, want) in &parts.brackets {
                match chart.algebroid_bracket(&parts.frame[*a], &parts.frame[*b]) {
                    Ok(got) => {
                        for (k, (x, y)) in got.iter().zip(want).enumerate() {
                            items.push((format!("[{},{}] d{}", parts.labels[*a], parts.labels[*b], arrow_names[k]), x - y));
                        }
                    }
                    Err(e) => return Ok(out.refuse(e)),
                }
            }
            out.push(decide("brackets", items, base_names, opts));
        }
    }
    out.output = output;
    Ok(out)
}
