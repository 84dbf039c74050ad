//! Argument parsing and dispatch for the `pjet` binary.
//!
//! [`run_command`] does everything except printing, so tests can drive it
//! directly and inspect exit code, report and streams.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pjet::catalog::{self, run_catalog};
use pjet::docs::Document;
use pjet::pipeline::{run, Command};
use pjet::report::{NumericOpts, Report, Verdict};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pjet", version, about = "Build and verify first-order local models of Poisson structures")]
struct Cli {
    /// Write the machine-readable report to this file (`-` for standard output).
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count for numeric checks.
    #[arg(long, global = true, default_value_t = 128)]
    samples: usize,
    /// Tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    group: Group,
}

#[derive(Debug, Args)]
struct FileArg {
    /// Model document (JSON).
    file: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Group {
    /// Checks on a bare bivector.
    Check {
        #[command(subcommand)]
        action: CheckAction,
    },
    /// First-order jets along a coordinate submanifold.
    Jet {
        #[command(subcommand)]
        action: JetAction,
    },
    /// Lie algebroids with IM data.
    Algebroid {
        #[command(subcommand)]
        action: AlgebroidAction,
    },
    /// Coupling data over a Poisson base.
    Coupling {
        #[command(subcommand)]
        action: CheckOnly,
    },
    /// Codimension-one triples.
    Codim1 {
        #[command(subcommand)]
        action: CheckOnly,
    },
    /// Local-model Poisson structures.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Fiberwise homotopy operator.
    Homotopy {
        #[command(subcommand)]
        action: HomotopyAction,
    },
    /// Groupoid charts with a 2-form.
    Groupoid {
        #[command(subcommand)]
        action: CheckOnly,
    },
    /// Built-in worked examples.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CheckAction {
    /// Jacobi identity of a bivector.
    Poisson(FileArg),
}

#[derive(Debug, Subcommand)]
enum JetAction {
    /// Truncate a bivector to its first-order jet.
    Compute(FileArg),
    /// Poisson up to second order along the submanifold.
    Check(FileArg),
}

#[derive(Debug, Subcommand)]
enum AlgebroidAction {
    /// Restricted cotangent algebroid of a jet.
    FromJet(FileArg),
    /// Jacobi, closed IM form and optional Cartan splitting.
    Check(FileArg),
}

#[derive(Debug, Subcommand)]
enum CheckOnly {
    /// Verify the structure equations.
    Check(FileArg),
}

#[derive(Debug, Subcommand)]
enum ModelAction {
    /// Assemble the local model.
    Build(FileArg),
    /// Assemble and verify the local model.
    Verify(FileArg),
}

#[derive(Debug, Subcommand)]
enum HomotopyAction {
    /// Primitive of a closed form vanishing on the zero section.
    Primitive(FileArg),
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// List entries.
    List,
    /// Run entries matching NAME (`*` wildcards), or all.
    Run { name: Option<String> },
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            report: None,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

enum Job {
    Pipeline(Command, PathBuf),
    CatalogList,
    CatalogRun(Option<String>),
}

fn job(g: Group) -> Job {
    use Job::Pipeline as P;
    match g {
        Group::Check { action: CheckAction::Poisson(f) } => P(Command::CheckPoisson, f.file),
        Group::Jet { action: JetAction::Compute(f) } => P(Command::JetCompute, f.file),
        Group::Jet { action: JetAction::Check(f) } => P(Command::JetCheck, f.file),
        Group::Algebroid { action: AlgebroidAction::FromJet(f) } => P(Command::AlgebroidFromJet, f.file),
        Group::Algebroid { action: AlgebroidAction::Check(f) } => P(Command::AlgebroidCheck, f.file),
        Group::Coupling { action: CheckOnly::Check(f) } => P(Command::CouplingCheck, f.file),
        Group::Codim1 { action: CheckOnly::Check(f) } => P(Command::Codim1Check, f.file),
        Group::Model { action: ModelAction::Build(f) } => P(Command::ModelBuild, f.file),
        Group::Model { action: ModelAction::Verify(f) } => P(Command::ModelVerify, f.file),
        Group::Homotopy { action: HomotopyAction::Primitive(f) } => P(Command::HomotopyPrimitive, f.file),
        Group::Groupoid { action: CheckOnly::Check(f) } => P(Command::GroupoidCheck, f.file),
        Group::Catalog { action: CatalogAction::List } => Job::CatalogList,
        Group::Catalog { action: CatalogAction::Run { name } } => Job::CatalogRun(name),
    }
}

fn load(path: &Path) -> Result<Document, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Document::from_json(&src).map_err(|e| format!("{}: {e}", path.display()))
}

/// The invocation as recorded in the report: without the program name and
/// without the `--json` destination, which does not affect the result.
fn recorded_command(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--json" {
            it.next();
        } else if !a.starts_with("--json=") {
            out.push(a.clone());
        }
    }
    out
}

/// Parse `argv` (program name first), run the command, and write the JSON
/// report if `--json` was given.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    report: None,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_PASS,
                    report: None,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    if cli.samples == 0 {
        return Outcome::input_error("--samples must be at least 1");
    }
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Outcome::input_error("--tol must be a positive number");
    }
    let opts = NumericOpts {
        samples: cli.samples,
        seed: cli.seed,
        tol: cli.tol,
    };
    let command = recorded_command(&argv);
    let (verdict, output) = match job(cli.group) {
        Job::Pipeline(cmd, path) => {
            let doc = match load(&path) {
                Ok(d) => d,
                Err(e) => return Outcome::input_error(e),
            };
            match run(cmd, &doc, &opts) {
                Ok(o) => (o.verdict, o.output),
                Err(e) => return Outcome::input_error(format!("{}: {e}", path.display())),
            }
        }
        Job::CatalogList => match catalog::entries() {
            Ok(entries) => {
                let list: Vec<_> = entries
                    .iter()
                    .map(|e| json!({"name": e.name, "kind": e.kind(), "citation": e.citation, "expected": e.expected.verdict}))
                    .collect();
                (Verdict::default(), json!({"entries": list}))
            }
            Err(e) => return Outcome::input_error(e),
        },
        Job::CatalogRun(name) => match run_catalog(name.as_deref(), &opts) {
            Ok(r) => (r.verdict(), r.to_json()),
            Err(e) => return Outcome::input_error(e),
        },
    };
    let report = Report::new(command, opts.seed, verdict, output);
    let code = if report.verdict.is_pass() { EXIT_PASS } else { EXIT_FAIL };
    let mut stdout = match report.output.get("entries") {
        Some(list) if report.checks.is_empty() => list
            .as_array()
            .into_iter()
            .flatten()
            .map(|e| format!("{:<26} {:<10} {}\n", e["name"].as_str().unwrap_or(""), e["kind"].as_str().unwrap_or(""), e["citation"].as_str().unwrap_or("")))
            .collect(),
        _ => report.to_text(),
    };
    let mut stderr = String::new();
    match cli.json.as_deref() {
        Some(p) if p == Path::new("-") => stdout.push_str(&(report.to_json() + "\n")),
        Some(p) => {
            if let Err(e) = std::fs::write(p, report.to_json() + "\n") {
                stderr.push_str(&format!("error: cannot write {}: {e}\n", p.display()));
                return Outcome {
                    code: EXIT_INPUT,
                    report: Some(report),
                    stdout,
                    stderr,
                };
            }
        }
        None => {}
    }
    Outcome {
        code,
        report: Some(report),
        stdout,
        stderr,
    }
}
