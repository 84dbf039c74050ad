//! Named worked examples with expected verdicts.
//!
//! Entries live as JSON files under `data/catalog/` and are compiled into
//! the library, so the catalog needs no files at run time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::docs::{DocError, Document};
use crate::par;
use crate::pipeline::{run, Command, Ops};
use crate::report::{CheckRecord, NumericOpts, Status, Verdict};

const SOURCES: &[(&str, &str)] = &[
    ("cartan-rotation", include_str!("../data/catalog/cartan-rotation.json")),
    ("codim1-U0", include_str!("../data/catalog/codim1-U0.json")),
    ("counterexample-groupoid", include_str!("../data/catalog/counterexample-groupoid.json")),
    ("deformation", include_str!("../data/catalog/deformation.json")),
    ("ex-nonholonomic", include_str!("../data/catalog/ex-nonholonomic.json")),
    ("florian", include_str!("../data/catalog/florian.json")),
    ("ginzburg", include_str!("../data/catalog/ginzburg.json")),
    ("logsymplectic", include_str!("../data/catalog/logsymplectic.json")),
    ("pair-groupoid", include_str!("../data/catalog/pair-groupoid.json")),
    ("perturbed-groupoid", include_str!("../data/catalog/perturbed-groupoid.json")),
    ("primitive-area", include_str!("../data/catalog/primitive-area.json")),
    ("product-jet", include_str!("../data/catalog/product-jet.json")),
    ("so3-liepoisson", include_str!("../data/catalog/so3-liepoisson.json")),
    ("so3-product-model", include_str!("../data/catalog/so3-product-model.json")),
    ("stephane", include_str!("../data/catalog/stephane.json")),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no catalog entry matches `{0}`")]
    UnknownEntry(String),
    #[error("catalog entry `{0}` is malformed: {1}")]
    Malformed(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub verdict: Status,
    /// Statuses of individual records; records not listed are unconstrained.
    #[serde(default)]
    pub checks: BTreeMap<String, Status>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    pub citation: String,
    pub expected: Expected,
    pub input: Document,
}

impl CatalogEntry {
    pub fn kind(&self) -> &'static str {
        self.input.kind()
    }

    pub fn command(&self) -> Command {
        Command::for_kind(self.kind()).expect("every document kind has a command")
    }

    fn parse(name: &str, src: &str) -> Result<Self, CatalogError> {
        let e: CatalogEntry = serde_json::from_str(src).map_err(|e| CatalogError::Malformed(name.into(), e.to_string()))?;
        if e.name != name {
            return Err(CatalogError::Malformed(name.into(), format!("file declares name `{}`", e.name)));
        }
        Ok(e)
    }
}

/// All entries, sorted by name.
pub fn entries() -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out = SOURCES.iter().map(|(n, s)| CatalogEntry::parse(n, s)).collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn names() -> Vec<&'static str> {
    let mut v: Vec<_> = SOURCES.iter().map(|(n, _)| *n).collect();
    v.sort_unstable();
    v
}

/// `*` matches any run of characters; without `*` the pattern must equal the name.
pub fn matches(pattern: &str, name: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == name;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !name.starts_with(first) || name.len() < first.len() + last.len() || !name.ends_with(last) {
        return false;
    }
    let mut rest = &name[first.len()..name.len() - last.len()];
    for p in &parts[1..parts.len() - 1] {
        match rest.find(p) {
            Some(i) => rest = &rest[i + p.len()..],
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryResult {
    pub name: String,
    pub kind: &'static str,
    pub command: Command,
    pub citation: String,
    pub expected: Expected,
    pub verdict: Verdict,
    pub output: Value,
    pub ops: Ops,
    /// Differences between the run and the expected verdicts; empty means the entry matches.
    pub mismatches: Vec<String>,
}

impl EntryResult {
    pub fn matched(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_record(&self) -> CheckRecord {
        CheckRecord::exact(self.name.clone(), self.mismatches.clone()).cite(self.citation.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "kind": self.kind,
            "command": self.command.to_string(),
            "citation": self.citation,
            "expected": self.expected,
            "verdict": self.verdict.status(),
            "checks": self.verdict.checks,
            "output": self.output,
        })
    }
}

pub fn run_entry(e: &CatalogEntry, opts: &NumericOpts) -> EntryResult {
    let cmd = e.command();
    let (verdict, output, ops, mut mismatches) = match run(cmd, &e.input, opts) {
        Ok(o) => (o.verdict, o.output, o.ops, vec![]),
        Err(DocError(msg)) => (Verdict::default(), Value::Null, Ops::new(), vec![format!("input error: {msg}")]),
    };
    if mismatches.is_empty() {
        if verdict.status() != e.expected.verdict {
            mismatches.push(format!("verdict: expected {}, got {}", e.expected.verdict, verdict.status()));
        }
        for (name, want) in &e.expected.checks {
            match verdict.get(name) {
                Some(r) if r.status == *want => {}
                Some(r) => mismatches.push(format!("{name}: expected {want}, got {}", r.status)),
                None => mismatches.push(format!("{name}: expected {want}, no such record")),
            }
        }
    }
    EntryResult {
        name: e.name.clone(),
        kind: e.kind(),
        command: cmd,
        citation: e.citation.clone(),
        expected: e.expected.clone(),
        verdict,
        output,
        ops,
        mismatches,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRun {
    pub results: Vec<EntryResult>,
}

impl CatalogRun {
    /// One record per entry; a record fails when the entry disagrees with its expectation.
    pub fn verdict(&self) -> Verdict {
        Verdict::new(self.results.iter().map(EntryResult::to_record).collect())
    }

    pub fn mismatch_count(&self) -> usize {
        self.results.iter().filter(|r| !r.matched()).count()
    }

    pub fn ops(&self) -> Ops {
        self.results.iter().flat_map(|r| r.ops.iter().copied()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "entries": self.results.iter().map(EntryResult::to_json).collect::<Vec<_>>(),
            "mismatches": self.mismatch_count(),
        })
    }
}

/// Run every entry whose name matches `filter` (all entries when `None`).
pub fn run_catalog(filter: Option<&str>, opts: &NumericOpts) -> Result<CatalogRun, CatalogError> {
    let selected: Vec<CatalogEntry> = entries()?.into_iter().filter(|e| filter.is_none_or(|p| matches(p, &e.name))).collect();
    if selected.is_empty() {
        return Err(CatalogError::UnknownEntry(filter.unwrap_or("").to_string()));
    }
    let results = par::map_slice(&selected, |e| run_entry(e, opts));
    Ok(CatalogRun { results })
}

#[cfg(test)]
mod tests;
