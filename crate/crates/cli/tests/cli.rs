use std::process::{Command, Output};

fn pimfft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pimfft"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn run_reports_crossbar_count() {
    let out = pimfft(&["run", "--n", "2048"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["crossbar_count"], 65_536);
    assert_eq!(r["verification"], "pass");
    assert_eq!(r["workload"], "fft");
}

#[test]
fn verify_prints_error_norm() {
    let out = pimfft(&["verify", "--n", "256", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("pass: verify n=256") && err.contains("rel_l2="), "{err}");
    assert_eq!(json(&out)["replay_mismatches"], 0);
}

#[test]
fn configuration_errors_exit_with_2() {
    assert_eq!(pimfft(&["run", "--n", "4096"]).status.code(), Some(2));
    assert_eq!(pimfft(&["run", "--n", "100"]).status.code(), Some(2));
    assert_eq!(pimfft(&["run", "--config", "2rb", "--beta", "3"]).status.code(), Some(2));
    assert_eq!(pimfft(&["run", "--format", "quad"]).status.code(), Some(2));
}

#[test]
fn env_overrides_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_pimfft"))
        .args(["run", "--emit", "csv"])
        .env_clear()
        .env("PIMFFT_N", "64")
        .env("PIMFFT_WORKLOAD", "polymul-real")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("polymul-real,64,"));
}

#[test]
fn sweep_writes_one_row_per_member() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = pimfft(&[
        "sweep",
        "--n",
        "64,128,256",
        "--format",
        "single-complex-64,half-complex-32",
        "--emit",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn same_seed_same_bytes() {
    let a = pimfft(&["run", "--n", "128", "--workload", "polymul-complex", "--seed", "3"]);
    let b = pimfft(&["run", "--n", "128", "--workload", "polymul-complex", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sequence_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.seq");
    // a delta transforms to all ones
    std::fs::write(&path, "8 single-complex-64\n1 0\n0 0\n0 0\n0 0\n0 0\n0 0\n0 0\n0 0\n").unwrap();
    let out = pimfft(&["run", "--n", "8", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rel_l2_error"], 0.0);
    let out = pimfft(&["run", "--n", "16", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schedules_table() {
    let out = pimfft(&["schedules", "--format", "half-complex-32"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    assert!(rows.as_array().unwrap().iter().any(|r| r["op"] == "butterfly"));
}
