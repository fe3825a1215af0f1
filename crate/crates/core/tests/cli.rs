//! End-to-end checks of the `iafb` binary: exit codes, outputs and provenance.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iafb"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_configs_load() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["dims"], &path, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["design"], &bad, dir.path()).status.code(), Some(1));
    assert_eq!(run(&["design"], &dir.path().join("missing.json"), dir.path()).status.code(), Some(1));
    let good = configs().join("network_b.json");
    assert_eq!(run(&["design", "--workers", "0"], &good, dir.path()).status.code(), Some(1));
    assert_eq!(run(&["design", "--bogus"], &good, dir.path()).status.code(), Some(1));
    assert_eq!(run(&["sweep"], &configs().join("three_user.json"), dir.path()).status.code(), Some(1));
    let help = Command::new(env!("CARGO_BIN_EXE_iafb")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn overdemanded_network_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("overdemanded.json");
    for cmd in ["design", "check", "solve"] {
        assert_eq!(run(&[cmd], &cfg, dir.path()).status.code(), Some(2), "{cmd}");
    }
    let check = read_json(&dir.path().join("check.json"));
    assert_eq!(check["verdict"], "infeasible");
}

#[test]
fn example_one_solve_aligns_and_records_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--seed", "11"], &configs().join("example_one.json"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let solve = read_json(&dir.path().join("solve.json"));
    assert_eq!(solve["seed"], 11);
    assert_eq!(solve["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(solve["converged"], true);
    assert_eq!(solve["verify"]["pass"], true);
    assert!(solve["verify"]["max_cross_residual"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("leakage.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config_sha256=") && first.ends_with(" seed=11"), "{first}");
}

#[test]
fn unconverged_solve_exits_3_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("three_user.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["solve"] = serde_json::json!({ "solver": { "max_iters": 1 } });
    let cfg = dir.path().join("short.json");
    std::fs::write(&cfg, v.to_string()).unwrap();
    assert_eq!(run(&["solve"], &cfg, dir.path()).status.code(), Some(3));
    assert_eq!(read_json(&dir.path().join("solve.json"))["converged"], false);
    assert!(dir.path().join("leakage.csv").exists());
}

#[test]
fn small_sweep_writes_one_row_per_scheme_and_point() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("network_b.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["sweep"] = serde_json::json!({ "variable": "snr_db", "values": [10.0, 20.0], "trials": 3 });
    let cfg = dir.path().join("small.json");
    std::fs::write(&cfg, v.to_string()).unwrap();
    assert_eq!(run(&["sweep", "--workers", "2"], &cfg, dir.path()).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert_eq!(lines[1], "scheme,sweep_var,mean_tput,ci95,trials,feedback_dim,seed");
    assert_eq!(lines.len(), 2 + 4 * 2);
}
