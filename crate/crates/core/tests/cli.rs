use std::process::Command;

fn windings() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_windings"));
    cmd.env_remove("WINDINGS_OUT_DIR");
    cmd
}

#[test]
fn experiment_writes_reports_and_report_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = windings()
        .args(["experiment", "--suite", "lil", "--alpha", "1.0", "--seed", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stem = "lil_alpha-1_seed-5";
    for ext in ["json", "csv", "timing.json"] {
        assert!(dir.path().join(format!("{stem}.{ext}")).exists(), "{ext}");
    }
    let csv = std::fs::read_to_string(dir.path().join(format!("{stem}.csv"))).unwrap();
    assert!(csv.starts_with("suite,check,alpha,n,statistic,reference,threshold,rule,passed,gate\n"));

    let shown = windings().arg("report").arg(dir.path().join(format!("{stem}.json"))).output().unwrap();
    assert_eq!(shown.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&shown.stdout).contains("integral_test_verdicts"));
}

#[test]
fn environment_sets_the_report_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = windings()
        .env("WINDINGS_OUT_DIR", dir.path())
        .args(["experiment", "--suite", "lil", "--alpha", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("lil_alpha-1.5_seed-1.json").exists());
}

#[test]
fn failing_gate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("strict.json");
    std::fs::write(&config, r#"{"alphas": [1.0], "lil": {"divergent_fraction": 1.0}}"#).unwrap();
    let out = windings()
        .args(["experiment", "--suite", "lil", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"no_such_field": 1}"#).unwrap();
    let out = windings().args(["experiment", "--suite", "rho", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constants_to_stdout() {
    let out = windings().args(["constants", "--alpha", "0.5", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}
