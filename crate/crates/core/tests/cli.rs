use std::path::Path;
use std::process::{Command, Output};

use harmonic::cli::{parse_args, run, OUTPUT_DIR_ENV};

fn harmonic(args: &[&str], output_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_harmonic"));
    cmd.args(args).env_remove(OUTPUT_DIR_ENV);
    if let Some(dir) = output_dir {
        cmd.env(OUTPUT_DIR_ENV, dir);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_prints_nine_rows_and_metadata() {
    let o = harmonic(&["table1", "--method", "exact", "--n", "2000", "--seed", "3"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("d,method,n,dt,epsilon,theta_1"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.starts_with(['2', '3', '4']) && r.ends_with(",PASS")));
    let meta: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["passed"], true);
}

#[test]
fn output_file_goes_under_the_output_directory_with_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = harmonic(
        &["sample", "--method", "wos", "--dim", "3", "--theta", "0.1,0.2,0.3", "--n", "500", "--output", "s.csv"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tool"], "harmonic");
    assert_eq!(meta["config"]["command"], "sample");
    assert_eq!(meta["config"]["job"]["n"], 500);
}

#[test]
fn kernel_check_text_format() {
    let o = harmonic(&["kernel-check", "--dim", "2", "--rho", "0.9", "--format", "text"], None);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("trapezoid") && out.contains("1.000000") && out.contains("PASS"), "{out}");
}

#[test]
fn privacy_command_reports_each_grid_point() {
    let o = harmonic(
        &["privacy", "--method", "exact", "--house", "0.5,0", "--trips", "10,40", "--replications", "50"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "trips,empirical_rmse,predicted_rmse,ratio");
    assert!(lines[1].starts_with("10,") && lines[2].starts_with("40,"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["sample", "--theta", "2,0"][..],
        &["sample", "--method", "exact", "--lower", "0,0", "--upper", "1,1"],
        &["kernel-check", "--trips", "5"],
        &["table1", "--dt", "0"],
        &["sample", "--config", "/nonexistent/harmonic.json"],
    ] {
        let o = harmonic(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
    let o = harmonic(&["frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(harmonic(&["--help"], None).status.code(), Some(0));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"method": "wos", "n": 40, "seed": 5, "dim": 3}"#).unwrap();
    let out = dir.path().join("out.csv");
    let (path, out) = (path.to_str().unwrap(), out.to_str().unwrap());
    let cfg = parse_args(["harmonic", "sample", "--config", path, "--n", "60", "--output", out]).unwrap();
    assert_eq!(cfg.seed, 5);
    match cfg.job {
        harmonic::cli::Job::Sample { n, ref theta, settings, .. } => {
            assert_eq!(n, 60);
            assert_eq!(theta.dim(), 3);
            assert_eq!(settings.method, harmonic::Method::Wos);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(run(&cfg).ok(), Some(0));
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 2);
}

#[test]
fn identical_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sample", "--method", "brownian", "--dt", "1e-3", "--n", "300", "--seed", "9"];
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let mut full = args.to_vec();
        full.extend(["--output", name]);
        assert_eq!(harmonic(&full, Some(dir.path())).status.code(), Some(0));
        outputs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
