//! Verdicts and machine-readable reports.

use serde::{Deserialize, Serialize};

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// Exact checks decide by symbolic zero tests; numeric ones by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Residuals shown per record; the count is always reported in full.
pub const RESIDUAL_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub mode: Mode,
    /// Number of nonzero residual components.
    pub residual_count: usize,
    /// Rendered residual components (first few).
    pub residuals: Vec<String>,
    /// Largest sampled residual for numeric checks.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub citations: Vec<String>,
}

impl CheckRecord {
    /// Exact check: passes iff `residuals` is empty.
    pub fn exact(name: impl Into<String>, residuals: Vec<String>) -> Self {
        let count = residuals.len();
        CheckRecord {
            name: name.into(),
            status: Status::from_bool(count == 0),
            mode: Mode::Exact,
            residual_count: count,
            residuals: residuals.into_iter().take(RESIDUAL_LIMIT).collect(),
            max_residual: None,
            samples: None,
            citations: Vec::new(),
        }
    }

    pub fn numeric(name: impl Into<String>, pass: bool, max_residual: f64, samples: usize, residuals: Vec<String>) -> Self {
        let count = residuals.len();
        CheckRecord {
            name: name.into(),
            status: Status::from_bool(pass),
            mode: Mode::Numeric,
            residual_count: count,
            residuals: residuals.into_iter().take(RESIDUAL_LIMIT).collect(),
            max_residual: Some(max_residual),
            samples: Some(samples),
            citations: Vec::new(),
        }
    }

    pub fn cite(mut self, c: impl Into<String>) -> Self {
        self.citations.push(c.into());
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

/// A list of check records; passes iff every record passes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub checks: Vec<CheckRecord>,
}

impl Verdict {
    pub fn new(checks: Vec<CheckRecord>) -> Self {
        Verdict { checks }
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.checks.push(r);
    }

    pub fn extend(&mut self, other: Verdict) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn status(&self) -> Status {
        Status::from_bool(self.passed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Prefix every record name with `prefix.`.
    pub fn prefixed(mut self, prefix: &str) -> Verdict {
        for c in &mut self.checks {
            c.name = format!("{prefix}.{}", c.name);
        }
        self
    }
}

pub const REPORT_SCHEMA_VERSION: &str = "1";

/// Top-level machine-readable report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub verdict: Status,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null", default)]
    pub output: serde_json::Value,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64, verdict: Verdict, output: serde_json::Value) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed,
            verdict: verdict.status(),
            checks: verdict.checks,
            output,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check plus the overall verdict.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{:<4} {:<9} {}", c.status, format!("[{}]", match c.mode {
                Mode::Exact => "exact",
                Mode::Numeric => "numeric",
            }), c.name));
            if let Some(m) = c.max_residual {
                s.push_str(&format!("  max residual {m:.3e} over {} samples", c.samples.unwrap_or(0)));
            }
            s.push('\n');
            for r in &c.residuals {
                s.push_str(&format!("       residual: {r}\n"));
            }
            if c.residual_count > c.residuals.len() {
                s.push_str(&format!("       ... {} more\n", c.residual_count - c.residuals.len()));
            }
        }
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s
    }
}

/// Sampling parameters for checks whose residuals contain elementary functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOpts {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for NumericOpts {
    fn default() -> Self {
        NumericOpts {
            samples: 128,
            seed: 0,
            tol: 1e-9,
        }
    }
}

/// Decide a list of labelled residuals.
///
/// Rational residuals are decided exactly: the check fails iff one is
/// nonzero. If any residual contains `exp`/`sin`/`cos`, every residual is
/// sampled at seeded points of `[-1,1]^dim` and the check is numeric.
pub fn decide(
    name: &str,
    residuals: Vec<(String, crate::expr::ScalarExpr)>,
    names: &[String],
    opts: &NumericOpts,
) -> CheckRecord {
    use rand::Rng;
    let residuals: Vec<_> = residuals.into_iter().filter(|(_, e)| !e.is_zero()).collect();
    let render = |items: &[(String, crate::expr::ScalarExpr)]| -> Vec<String> {
        items
            .iter()
            .map(|(l, e)| format!("{l}: {}", e.to_string_with(names)))
            .collect()
    };
    if residuals.iter().all(|(_, e)| e.is_rational()) {
        return CheckRecord::exact(name, render(&residuals));
    }
    let dim = names.len();
    let mut rng = crate::par::rng(opts.seed, 0);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut taken = 0;
    let mut attempts = 0;
    while taken < opts.samples && attempts < 10 * opts.samples.max(1) {
        attempts += 1;
        let pt: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vals: Result<Vec<f64>, _> = residuals.iter().map(|(_, e)| e.eval(&pt)).collect();
        let Ok(vals) = vals else { continue };
        taken += 1;
        for (k, v) in vals.iter().enumerate() {
            let v = v.abs();
            if !v.is_finite() || v > opts.tol {
                if !bad.contains(&k) {
                    bad.push(k);
                }
            }
            if v.is_finite() {
                worst = worst.max(v);
            } else {
                worst = f64::INFINITY;
            }
        }
    }
    bad.sort_unstable();
    let offending: Vec<_> = bad.iter().map(|&k| residuals[k].clone()).collect();
    let pass = taken > 0 && offending.is_empty();
    CheckRecord::numeric(name, pass, worst, taken, render(&offending))
}
