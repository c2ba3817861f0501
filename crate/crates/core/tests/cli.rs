use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpde"))
        .args(args)
        .output()
        .expect("spawn qpde")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_QAOA: &str = r#"{
    "M": 3, "N": 4,
    "weighting": [0, 2],
    "solver_mode": "qaoa",
    "p": 2, "shots": 256,
    "optimizer": {"max_evals": 40, "restarts": 1, "seed": 5}
}"#;

#[test]
fn compare_writes_fields_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpde(&["compare", "--out", path_arg(dir.path())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "field_classical.csv",
        "field_quantum.csv",
        "report.csv",
        "report.txt",
    ] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("brute_force"));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 5);
    let field = fs::read_to_string(dir.path().join("field_classical.csv")).unwrap();
    assert_eq!(field.lines().next(), Some("x,y,T"));
    assert_eq!(field.lines().count(), 26);
}

#[test]
fn run_classical_writes_only_the_classical_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpde(&["run", "--mode", "classical", "--out", path_arg(dir.path())]);
    assert!(out.status.success());
    assert!(dir.path().join("field_classical.csv").is_file());
    assert!(!dir.path().join("field_quantum.csv").exists());
}

#[test]
fn qaoa_run_exports_one_trace_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_QAOA);
    let out = qpde(&["run", "--config", &config, "--out", path_arg(dir.path())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("field_quantum.csv").is_file());
    for step in 1..=2 {
        let trace = fs::read_to_string(dir.path().join(format!("trace_step_{step}.csv"))).unwrap();
        let mut lines = trace.lines();
        assert_eq!(
            lines.next(),
            Some("eval_index,gamma_1,gamma_2,beta_1,beta_2,expectation")
        );
        let rows = lines.count();
        assert!((1..=40).contains(&rows), "{rows} evaluations");
    }
}

#[test]
fn identical_inputs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = write_config(a.path(), SMALL_QAOA);
    for dir in [&a, &b] {
        let out = qpde(&[
            "compare",
            "--config",
            &config,
            "--seed",
            "9",
            "--out",
            path_arg(dir.path()),
        ]);
        assert!(out.status.success());
    }
    for name in [
        "field_quantum.csv",
        "report.csv",
        "trace_step_1.csv",
        "trace_step_2.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn classical_field_ignores_quantum_settings() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let plain = write_config(a.path(), r#"{"solver_mode": "classical"}"#);
    let tweaked = write_config(
        b.path(),
        r#"{"solver_mode": "classical", "seed": 77, "shots": 3, "p": 7, "epsilon": 0.1}"#,
    );
    assert!(
        qpde(&["run", "--config", &plain, "--out", path_arg(a.path())])
            .status
            .success()
    );
    assert!(
        qpde(&["run", "--config", &tweaked, "--out", path_arg(b.path())])
            .status
            .success()
    );
    assert_eq!(
        fs::read(a.path().join("field_classical.csv")).unwrap(),
        fs::read(b.path().join("field_classical.csv")).unwrap()
    );
}

#[test]
fn configuration_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"N": 5, "bogus": 1}"#,
        r#"{"params": {"k": -1.0}}"#,
        r#"{"N": 2}"#,
        r#"{"epsilon": 0.9}"#,
        r#"{"solver_mode": "qaoa", "N": 9}"#,
        "not json",
    ];
    for body in cases {
        let config = write_config(dir.path(), body);
        let out = qpde(&["run", "--config", &config, "--out", path_arg(dir.path())]);
        assert_eq!(out.status.code(), Some(2), "config {body}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    assert_eq!(qpde(&["run", "--mode", "annealing"]).status.code(), Some(2));
    assert_eq!(qpde(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = qpde(&[
        "run",
        "--config",
        path_arg(&missing),
        "--out",
        path_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_of_range_values_are_warned_about() {
    let dir = tempfile::tempdir().unwrap();
    // 2 bits only reach 3, the inlet already sits at 4..8.
    let config = write_config(dir.path(), r#"{"M": 2, "N": 4, "weighting": [0, 1]}"#);
    let out = qpde(&[
        "compare",
        "--config",
        &config,
        "--out",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}
