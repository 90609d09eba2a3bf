//! Exit-code contract and end-to-end behavior of the command line.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use gridplan_cli::{run, EXIT_NON_CONVERGENCE, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

fn case_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(name)
        .display()
        .to_string()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gridplan-cli-{tag}"));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn every_bundled_case_validates() {
    for name in ["tiny3.json", "garver6.json", "ieee118-lite.json"] {
        let code = run(["gridplan", "validate", &case_path(name)]);
        assert_eq!(code, EXIT_OK, "bundled case {name} failed validation");
    }
}

#[test]
fn solve_converges_and_writes_a_gap_certified_report() {
    let out = temp_dir("solve").join("tiny3.json");
    let code = run([
        "gridplan",
        "solve",
        &case_path("tiny3.json"),
        "--epsilon",
        "1e-6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["converged"], serde_json::Value::Bool(true));
    assert!(report["relative_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn iteration_starved_solve_exits_non_convergence() {
    let out = temp_dir("starved").join("tiny3.json");
    let code = run([
        "gridplan",
        "solve",
        &case_path("tiny3.json"),
        "--max-iter",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_NON_CONVERGENCE);
}

#[test]
fn identical_invocations_produce_identical_reports_modulo_timing() {
    let dir = temp_dir("determinism");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for out in [&a, &b] {
        let code = run([
            "gridplan",
            "solve",
            &case_path("tiny3.json"),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
    }
    let mut ra: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let mut rb: serde_json::Value = serde_json::from_str(&fs::read_to_string(&b).unwrap()).unwrap();
    for r in [&mut ra, &mut rb] {
        for row in r["trace"].as_array_mut().unwrap() {
            row["wall_seconds"] = serde_json::json!(0.0);
        }
    }
    assert_eq!(ra, rb);
}

#[test]
fn csv_format_writes_both_tables() {
    let dir = temp_dir("csv");
    let out = dir.join("tiny3.csv");
    let code = run([
        "gridplan",
        "solve",
        &case_path("tiny3.json"),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(dir.join("tiny3.schedule.csv").exists());
    assert!(dir.join("tiny3.trace.csv").exists());
}

#[test]
fn evaluate_prices_a_plan_file() {
    let dir = temp_dir("evaluate");
    let plan = dir.join("plan.json");
    fs::write(&plan, r#"{"line_build": {"c1-3": 1}, "gen_build": {}}"#).unwrap();
    let code = run(["gridplan", "evaluate", &case_path("tiny3.json"), plan.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);

    let bogus = dir.join("bogus.json");
    fs::write(&bogus, r#"{"line_build": {"no-such-line": 1}}"#).unwrap();
    let code = run(["gridplan", "evaluate", &case_path("tiny3.json"), bogus.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn oracle_agrees_with_solve_on_the_bundled_small_case() {
    let code = run(["gridplan", "oracle", &case_path("tiny3.json"), "--solve"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn broken_cases_exit_validation_failure() {
    let dir = temp_dir("broken");
    let no_slack = dir.join("no-slack.json");
    let text = fs::read_to_string(case_path("tiny3.json"))
        .unwrap()
        .replace("\"slack\": true", "\"slack\": false");
    fs::write(&no_slack, text).unwrap();
    assert_eq!(run(["gridplan", "validate", no_slack.to_str().unwrap()]), EXIT_VALIDATION);

    assert_eq!(
        run(["gridplan", "validate", dir.join("missing.json").to_str().unwrap()]),
        EXIT_VALIDATION
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(["gridplan"]), EXIT_USAGE);
    assert_eq!(run(["gridplan", "frobnicate"]), EXIT_USAGE);
    assert_eq!(
        run(["gridplan", "solve", &case_path("tiny3.json"), "--format", "xml"]),
        EXIT_USAGE
    );
}

#[test]
fn dump_models_writes_lp_text_next_to_the_run() {
    let dir = temp_dir("dump");
    let exe = env!("CARGO_BIN_EXE_gridplan");
    let out = dir.join("report.json");
    let status = Command::new(exe)
        .args([
            "solve",
            &case_path("tiny3.json"),
            "--dump-models",
            "--out",
            out.to_str().unwrap(),
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let master = dir.join("model-dump/master-initial.lp");
    let sub = dir.join("model-dump/subproblem-t1.lp");
    assert!(master.exists() && sub.exists());
    let text = fs::read_to_string(sub).unwrap();
    assert!(text.contains("Maximize") && text.contains("Binary"));
}

#[test]
fn backend_selection_comes_from_the_environment() {
    let exe = env!("CARGO_BIN_EXE_gridplan");
    let ok = Command::new(exe)
        .args(["validate", &case_path("tiny3.json")])
        .env("GRIDPLAN_BACKEND", "builtin")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));

    let bad = Command::new(exe)
        .args(["validate", &case_path("tiny3.json")])
        .env("GRIDPLAN_BACKEND", "no-such-engine")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("no-such-engine"));
}
