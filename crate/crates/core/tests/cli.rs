use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use holcert::cli::{load_job, run_job, verify_report, Overrides, Report};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(name: &str) -> Report {
    run_job(&load_job(&fixture(name), &Overrides::default()).unwrap())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holcert"))
}

#[test]
fn fixture_exit_codes() {
    let expected = [
        ("certificate.json", 0),
        ("degenerate_step.json", 2),
        ("flagship.json", 0),
        ("homotopy_step.json", 0),
        ("parametric.json", 0),
        ("rank_check.json", 0),
        ("rank_locus.json", 0),
        ("solve.json", 0),
        ("stability.json", 0),
        ("tangency_cubic.json", 0),
        ("tangency_flat.json", 2),
    ];
    for (name, code) in expected {
        let r = run(name);
        assert_eq!(r.exit_code, code, "{name}: {:?}", r.message);
        assert!(r.reverification.iter().all(|v| v.passed), "{name}");
    }
}

#[test]
fn malformed_polynomial_is_an_input_error() {
    let r = run("malformed.json");
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.status, "input-error");
    assert!(r.message.unwrap().contains("position"));
}

#[test]
fn results_of_small_fixtures() {
    assert_eq!(run("solve.json").results["f"], "x1");
    assert_eq!(run("tangency_cubic.json").results["order"], 3);
    let deg = run("degenerate_step.json");
    assert!(deg.message.unwrap().contains("rank"));
}

#[test]
fn binary_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = bin().args(["run", "--job"]).arg(fixture("flagship.json")).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let verify = bin().arg("verify").arg(&out).output().unwrap();
    assert_eq!(verify.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&verify.stdout).contains("FAIL"));

    let mut report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let certs = report["certificates"].as_array_mut().unwrap();
    let target = certs
        .iter_mut()
        .find(|c| c["cofactors"].as_array().is_some_and(|a| !a.is_empty()))
        .expect("a certificate with cofactors");
    let old = target["cofactors"][0][1].as_str().unwrap().to_string();
    target["cofactors"][0][1] = Value::String(format!("{old} + x1"));
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, serde_json::to_string(&report).unwrap()).unwrap();
    let verify = bin().arg("verify").arg(&tampered).output().unwrap();
    assert_eq!(verify.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&verify.stdout).contains("FAIL"));
}

#[test]
fn binary_input_errors() {
    let status = bin().args(["run", "--job", "/nonexistent/job.json"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let status = bin().args(["run", "--job"]).arg(fixture("malformed.json")).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
    let status = bin().args(["run", "--job"]).arg(fixture("solve.json")).args(["--order", "bogus"]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["run", "--job"])
        .arg(fixture("stability.json"))
        .args(["--seed", "7", "--grid", "0,2,5"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r: Report = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.options.seed, 7);
    assert_eq!(r.options.grid, "0,2,5");
}

#[test]
fn reports_are_deterministic_and_reverify_after_parsing() {
    for name in ["flagship.json", "homotopy_step.json", "parametric.json"] {
        let a = run(name);
        let b = run(name);
        assert_eq!(a.to_json(), b.to_json(), "{name}");
        let parsed: Report = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(parsed, a);
        assert!(verify_report(&parsed).iter().all(|v| v.passed), "{name}");
    }
}

#[test]
fn unknown_job_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    fs::write(&job, r#"{"command": "solve", "n": 2, "bogus": 1}"#).unwrap();
    assert!(load_job(&job, &Overrides::default()).is_err());
    fs::write(&job, r#"{"command": "solve", "n": 2, "ideal": ["x1"], "field": ["1", "0"]}"#).unwrap();
    let r = run_job(&load_job(&job, &Overrides::default()).unwrap());
    assert_eq!(r.exit_code, 1, "missing g");
}
