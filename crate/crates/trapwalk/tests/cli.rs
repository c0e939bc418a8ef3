use std::path::Path;
use std::process::{Command, Output};

fn trapwalk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapwalk"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TRAPWALK_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

#[test]
fn run_writes_curve_and_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "spec.json",
        r#"{"size": 101, "rho": 0.2, "init": "up", "steps": 2000, "configurations": 100,
            "output": {"dir": "out"}}"#,
    );
    let out = trapwalk(&["run", &spec, "--workers", "2"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(dir.path().join("out/qw_up_K101_rho0.2.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,mean,stderr");
    assert_eq!(lines.len(), 2002);
    assert!(!csv.contains('\r'));

    let record: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/qw_up_K101_rho0.2.json")).unwrap(),
    )
    .unwrap();
    let fit = &record["analysis"]["crossover"];
    for key in ["beta1", "beta2", "t_c"] {
        assert!(fit[key].is_number(), "missing {key}");
    }
    assert_eq!(record["traps"], 20);
    assert_eq!(record["ensemble"]["master_seed"], 2024);
    assert!(record["code_version"]
        .as_str()
        .unwrap()
        .starts_with("trapwalk "));
}

#[test]
fn reruns_and_records_reproduce_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "spec.json",
        r#"{"size": [41, 61], "rho": 0.2, "init": ["up", "mixed"], "engine": ["qw", "crw"],
            "steps": 200, "configurations": 8}"#,
    );
    assert!(
        trapwalk(&["run", &spec, "--out", "a", "--workers", "1"], dir.path())
            .status
            .success()
    );
    assert!(
        trapwalk(&["run", &spec, "--out", "b", "--workers", "4"], dir.path())
            .status
            .success()
    );
    assert!(trapwalk(
        &["run", "a/qw_mixed_K61_rho0.2.json", "--out", "c"],
        dir.path()
    )
    .status
    .success());
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    let mut compared = 0;
    for entry in std::fs::read_dir(dir.path().join("a")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert_eq!(
            read(&format!("a/{name}")),
            read(&format!("b/{name}")),
            "{name}"
        );
        compared += 1;
    }
    assert_eq!(compared, 8 * 2 + 1);
    assert_eq!(
        read("a/qw_mixed_K61_rho0.2.csv"),
        read("c/qw_mixed_K61_rho0.2.csv")
    );
}

#[test]
fn invalid_spec_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "bad.json",
        r#"{"size": 101, "rho": 1.0, "steps": 100, "configurations": 4}"#,
    );
    let out = trapwalk(&["run", &spec], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`rho`"));

    let spec = write_spec(
        dir.path(),
        "typo.json",
        r#"{"size": 101, "rho": 0.1, "step": 100, "configurations": 4}"#,
    );
    let out = trapwalk(&["run", &spec], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`step`"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocker"), "").unwrap();
    let spec = write_spec(
        dir.path(),
        "spec.json",
        r#"{"size": 21, "rho": 0.1, "steps": 20, "configurations": 2,
            "output": {"dir": "blocker/out"}}"#,
    );
    let out = trapwalk(&["run", &spec], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker"));
}

#[test]
fn fit_reads_a_curve() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,mean,stderr\n");
    for t in 0..=500 {
        csv.push_str(&format!("{t},{},0\n", (-0.2 * (t as f64).powf(0.5)).exp()));
    }
    std::fs::write(dir.path().join("curve.csv"), csv).unwrap();
    let out = trapwalk(&["fit", "curve.csv"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta = report["single"]["beta"].as_f64().unwrap();
    assert!((beta - 0.5).abs() < 1e-9);
    assert_eq!(report["crossover"]["crossover"], false);
}

#[test]
fn predict_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = trapwalk(&["predict", "--rho", "0.2", "--init", "mixed"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["prediction"]["tc_pred"].as_f64(), Some(40.0));
    assert_eq!(report["references"]["rosenstock"].as_f64(), Some(0.5));

    assert!(!trapwalk(&["predict", "--rho", "1.5"], dir.path())
        .status
        .success());
    assert!(!trapwalk(&["preset", "fig9"], dir.path()).status.success());

    let out = trapwalk(
        &["preset", "fig5a", "--dry-run", "--scale-m", "0.1"],
        dir.path(),
    );
    let spec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spec["configurations"], 10);
    assert_eq!(spec["scaling"]["m_factor"].as_f64(), Some(0.1));
}

#[test]
fn preset_runs_at_reduced_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = trapwalk(
        &["preset", "fig6b", "--scale-m", "0.0001", "--out", "f"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(dir.path().join("f/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(summary.starts_with("engine,init,size,rho,beta,beta1,beta2,t_c,crossover\n"));
}
