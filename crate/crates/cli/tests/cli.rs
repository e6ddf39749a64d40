//! End-to-end checks of the binary: exit codes, formats, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entcap"))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("entcap-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_ising() {
    let out = run(&["analyze", &data("ising.json")]);
    let v = stdout_json(&out);
    let cap = &v["capability"];
    assert!((cap["h_max"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((cap["h_tilde_max"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((cap["gamma_max"].as_f64().unwrap() - 1.9123).abs() < 1e-3);
    assert!((cap["tau_h"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["tool"], "entcap");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_heisenberg_ratio() {
    let out = run(&["analyze", &data("heisenberg.json")]);
    let v = stdout_json(&out);
    let ratio = v["ancilla"]["ratio_vs_no_ancilla"].as_f64().unwrap();
    assert!((ratio - 1.3220).abs() < 1e-3, "ratio {ratio}");
    let crossover = v["ancilla"]["crossover_e"].as_f64().unwrap();
    assert!((crossover - 0.08).abs() < 0.01);
}

#[test]
fn analyze_csv_format() {
    let out = run(&["analyze", &data("ising.json"), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l.starts_with("h_max,1")));
}

#[test]
fn analyze_json_reserializes_to_identical_bytes() {
    let out = run(&["analyze", &data("heisenberg.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&value).unwrap();
    again.push('\n');
    assert_eq!(
        text, again,
        "canonical JSON must round-trip byte-identically"
    );
}

#[test]
fn analyze_rejects_bad_inputs() {
    // Both matrix and pauli present.
    let both = tmp("both.json");
    std::fs::write(
        &both,
        r#"{"matrix": [[[0,0],[0,0],[0,0],[1,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[1,0],[0,0],[0,0],[0,0]]], "pauli": {"alpha":[0,0,0],"beta":[0,0,0],"gamma":[[1,0,0],[0,0,0],[0,0,0]]}}"#,
    )
    .unwrap();
    let out = run(&["analyze", both.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Unparsable JSON.
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Non-Hermitian matrix.
    let nonherm = tmp("nonherm.json");
    std::fs::write(
        &nonherm,
        r#"{"matrix": [[[0,0],[2,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#,
    )
    .unwrap();
    let out = run(&["analyze", nonherm.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn protocol_ising_reaches_one_ebit() {
    let out = run(&[
        "protocol",
        &data("ising.json"),
        "--dt",
        "0.001",
        "--initial-p",
        "0",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,P,E,gamma,deviation");
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|x| x.parse().unwrap()).collect();
    let (t, _p, e) = (cols[0], cols[1], cols[2]);
    assert!((e - 1.0).abs() < 1e-2, "final E = {e}");
    assert!(
        (t - std::f64::consts::FRAC_PI_4).abs() < 5e-3,
        "final t = {t}"
    );
}

#[test]
fn protocol_rejects_large_step() {
    let out = run(&["protocol", &data("ising.json"), "--dt", "0.02"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0.005"), "message must state the bound: {err}");
}

#[test]
fn protocol_ancilla_initial_rate() {
    let out = run(&[
        "protocol",
        &data("heisenberg.json"),
        "--mode",
        "ancilla",
        "--dt",
        "0.001",
        "--t-end",
        "0.2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first_data = text.lines().nth(1).unwrap();
    let cols: Vec<f64> = first_data.split(',').map(|x| x.parse().unwrap()).collect();
    let gamma0 = cols[3];
    assert!((gamma0 - 5.056).abs() < 1e-2, "gamma(0) = {gamma0}");
}

#[test]
fn simulate_ising_to_heisenberg() {
    let out = run(&[
        "simulate",
        &data("ising.json"),
        &data("heisenberg.json"),
        "--t",
        "1",
        "--dt",
        "0.001",
    ]);
    let v = stdout_json(&out);
    assert!((v["native_time"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((v["alpha"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["time_bound"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!(v["simulation_error"].as_f64().unwrap() < 1e-2);
}

#[test]
fn simulate_self_is_cheap_and_exact() {
    let out = run(&[
        "simulate",
        &data("ising.json"),
        &data("ising.json"),
        "--t",
        "1",
        "--dt",
        "0.01",
    ]);
    let v = stdout_json(&out);
    assert!((v["native_time"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["simulation_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn simulate_zero_coupling_exits_5() {
    let out = run(&[
        "simulate",
        &data("identity.json"),
        &data("ising.json"),
        "--t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn simulate_dump_schedule() {
    let dump = tmp("schedule.json");
    let out = run(&[
        "simulate",
        &data("ising.json"),
        &data("heisenberg.json"),
        "--t",
        "0.05",
        "--dt",
        "0.01",
        "--dump-schedule",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let steps: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let arr = steps.as_array().unwrap();
    assert!(!arr.is_empty());
    for s in arr {
        assert!(s["duration"].as_f64().unwrap() >= 0.0);
        assert_eq!(s["pre_local_a"].as_array().unwrap().len(), 2);
        assert_eq!(s["post_local_b"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn verify_ising_passes_and_is_deterministic() {
    let args = [
        "verify",
        &data("ising.json"),
        "--seed",
        "7",
        "--restarts",
        "16",
    ];
    let a = run(&args);
    assert!(
        a.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&a.stderr)
    );
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("all checks passed"), "{text}");
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
}

#[test]
fn verify_corrupted_analytic_fails() {
    let out = run(&[
        "verify",
        &data("ising.json"),
        "--seed",
        "7",
        "--restarts",
        "8",
        "--corrupt-analytic",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
}

#[test]
fn analyze_out_flag_writes_file() {
    let path = tmp("report.json");
    let out = run(&[
        "analyze",
        &data("ising.json"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["capability"]["h_max"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}
