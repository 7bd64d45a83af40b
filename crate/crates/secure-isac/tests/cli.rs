//! Exit-code and output contract of the `isac` binary.

use std::process::Command;

fn isac() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isac"))
}

#[test]
fn feasibility_verdicts_exit_zero() {
    let out = isac().args(["feasibility", "--gamma-pcrb", "1e-3"]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("feasible"));

    // An unreachable threshold is still a successful verdict.
    let out = isac().args(["feasibility", "--gamma-pcrb", "1e-9"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("infeasible"));
}

#[test]
fn config_errors_exit_two() {
    let dir = std::env::temp_dir().join("isac-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = isac()
        .args(["run", "--config", bad.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = isac().args(["run", "--method", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = isac().args(["run", "--seed-count", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pcrb_sweep_writes_csv() {
    let dir = std::env::temp_dir().join("isac-cli-sweep");
    let out = isac()
        .args(["pcrb-sweep", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("pcrb_sweep.csv")).unwrap();
    assert!(csv.starts_with("sigma_theta_sq,pcrb_exact,pcrb_upper,pcrb_approx,xi"));
    assert!(csv.lines().count() > 10);
}
