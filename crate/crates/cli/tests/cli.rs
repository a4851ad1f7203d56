use std::path::Path;
use std::process::{Command, Output};

fn voa(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_voa"));
    cmd.args(args);
    if let Some(dir) = out {
        cmd.arg("--out-dir").arg(dir);
    }
    cmd.output().unwrap()
}

#[test]
fn passing_run_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = voa(&["verify", "--model", "heisenberg", "--depth", "3", "--suite", "axioms", "--json", "--csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(json.is_array() || json.is_object());
    assert!(!dir.path().join("smear.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("suite,model,depth,check,status"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn failing_unitarity_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = voa(&["verify", "--model", "virasoro", "--c=-1", "--depth", "4", "--suite", "unitarity"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("-1/2"));
}

#[test]
fn config_errors_exit_two() {
    let out = voa(&["verify", "--model", "heisenberg", "--c", "1/2", "--depth", "3"], None);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"kind": "heisenberg", "depth": 3}, "typo": 1}"#).unwrap();
    let out = voa(&["verify", "--config", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));

    let out = voa(&["verify", "--config", dir.path().join("missing.json").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncated_lab_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = voa(
        &["smear", "--model", "virasoro", "--c", "1/2", "--depth", "6", "--null-vectors", "quotient", "--csv"],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["decay.csv", "order.csv", "growth.csv", "summability.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn build_prints_dimensions() {
    let out = voa(&["build", "--model", "virasoro", "--c", "1/2", "--depth", "5"], None);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["dims"], serde_json::json!([1, 0, 1, 1, 2, 2]));
    assert_eq!(summary["working_depth"], 12);
}

#[test]
fn csv_only_skips_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = voa(&["verify", "--model", "heisenberg", "--depth", "2", "--suite", "axioms", "--csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("report.csv").exists());
    assert!(!dir.path().join("report.json").exists());
}
