use std::path::PathBuf;

use pjet_cli::{run_command, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> String {
    root().join("models").join(name).display().to_string()
}

fn schema() -> jsonschema::Validator {
    let src = std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&src).unwrap()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pjet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn so3_is_poisson() {
    let out = run_command(&["pjet", "check", "poisson", &model("so3.json")]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    assert!(out.stdout.contains("verdict: PASS"));
}

#[test]
fn florian_fails_the_second_equation() {
    let out = run_command(&["pjet", "codim1", "check", &model("florian.json")]);
    assert_eq!(out.code, EXIT_FAIL);
    let report = out.report.unwrap();
    assert_eq!(report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect::<Vec<_>>(), ["S2''"]);
    assert!(out.stdout.lines().any(|l| l.starts_with("FAIL") && l.ends_with("S2''")), "{}", out.stdout);
}

#[test]
fn malformed_input_exits_two() {
    let p = tmp("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let out = run_command(&["pjet", "check", "poisson", p.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.report.is_none());
    let out = run_command(&["pjet", "check", "poisson", "/nonexistent/file.json"]);
    assert_eq!(out.code, EXIT_INPUT);
    // right document, wrong command
    let out = run_command(&["pjet", "coupling", "check", &model("so3.json")]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("expects a coupling document"));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = run_command(&["pjet", "frobnicate"]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("Usage:"), "{}", out.stderr);
    let out = run_command(&["pjet", "jet", "explode", "x.json"]);
    assert_eq!(out.code, EXIT_INPUT);
    let out = run_command(&["pjet", "--help"]);
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.stdout.contains("catalog"));
}

#[test]
fn bad_numeric_flags_are_input_errors() {
    let m = model("so3.json");
    for flags in [["--samples", "0"], ["--tol", "-1"], ["--seed", "-3"], ["--tol", "abc"]] {
        let out = run_command(&["pjet", "check", "poisson", &m, flags[0], flags[1]]);
        assert_eq!(out.code, EXIT_INPUT, "{flags:?}");
    }
}

#[test]
fn json_reports_validate_against_schema() {
    let v = schema();
    let cases: Vec<Vec<String>> = vec![
        vec!["check".into(), "poisson".into(), model("so3.json")],
        vec!["codim1".into(), "check".into(), model("florian.json")],
        vec!["algebroid".into(), "from-jet".into(), model("nonholonomic.json")],
        vec!["jet".into(), "compute".into(), model("nonholonomic.json")],
        vec!["jet".into(), "check".into(), model("nonholonomic.json")],
        vec!["coupling".into(), "check".into(), model("ginzburg.json")],
        vec!["model".into(), "build".into(), model("deformation.json")],
        vec!["homotopy".into(), "primitive".into(), model("primitive.json")],
        vec!["groupoid".into(), "check".into(), model("groupoid.json"), "--samples".into(), "16".into()],
        vec!["catalog".into(), "list".into()],
        vec!["catalog".into(), "run".into(), "*groupoid".into()],
    ];
    for (i, args) in cases.iter().enumerate() {
        let p = tmp(&format!("report{i}.json"));
        let mut argv = vec!["pjet".to_string()];
        argv.extend(args.iter().cloned());
        argv.extend(["--json".to_string(), p.display().to_string()]);
        let out = run_command(&argv);
        assert!(out.code == EXIT_PASS || out.code == EXIT_FAIL, "{args:?}: {}", out.stderr);
        let text = std::fs::read_to_string(&p).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = v.iter_errors(&value).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        // round trip
        let back: pjet::report::Report = serde_json::from_str(&text).unwrap();
        let report = out.report.unwrap();
        assert_eq!(back.checks, report.checks, "{args:?}");
        assert_eq!(back, report, "{args:?}");
    }
}

#[test]
fn identical_invocations_give_identical_reports() {
    let a = tmp("det-a.json");
    let b = tmp("det-b.json");
    for p in [&a, &b] {
        let out = run_command(&["pjet", "groupoid", "check", &model("groupoid.json"), "--seed", "7", "--json", p.to_str().unwrap()]);
        assert_eq!(out.code, EXIT_PASS);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_changes_sampled_points() {
    let run = |seed: &str| {
        let out = run_command(&["pjet", "groupoid", "check", &model("groupoid.json"), "--seed", seed, "--samples", "16"]);
        out.report.unwrap().checks.iter().find(|c| c.name == "multiplicative").unwrap().max_residual
    };
    assert_ne!(run("1"), run("2"));
}
