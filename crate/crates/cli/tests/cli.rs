use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaplygin"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"{
  "name": "small",
  "system": "nonrubber-reduced",
  "n": 3,
  "epsilon": 0.7,
  "d": 0.5,
  "inertia": { "kind": "principal", "moments": [1.0, 1.6, 2.3] },
  "initial": { "kind": "explicit", "momentum": [0.4, -0.7, 0.5], "gamma": [0.0, 0.6, 0.8] },
  "integrator": { "h": 0.001, "t_end": 0.5 },
  "checks": ["energy", "gamma_norm", "f4"]
}"#;

#[test]
fn run_smoke_writes_csv_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("chaplygin3d_eps1.json");
    let o = run(&["run", "--scenario", sc.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("chaplygin3d_eps1.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,k_12,k_13,k_23,gamma_1,gamma_2,gamma_3,energy"), "{header}");
    assert_eq!(csv.lines().count(), 1002);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("chaplygin3d_eps1.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("chaplygin3d_eps1.report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn every_shipped_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run".to_string(), "--quiet".into(), "--out".into(), dir.path().display().to_string(), "--scenario".into()];
    for e in std::fs::read_dir(scenario("")).unwrap() {
        args.push(e.unwrap().path().display().to_string());
    }
    let o = bin().args(&args).env("CHAPLYGIN_WORKERS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).lines().count() >= 6);
}

#[test]
fn csv_output_is_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("rubber4d_generic.json");
    let mut outs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let o = bin()
            .args(["run", "--quiet", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("CHAPLYGIN_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outs.push(std::fs::read(out.join("rubber4d_generic.csv")).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn nonconserved_f4_is_reported_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "small.json", SMALL);
    let o = run(&["run", "--scenario", sc.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("not an integral here"));
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = SMALL.replace(r#""h": 0.001, "t_end": 0.5"#, r#""h": 0.25, "t_end": 10.0, "projection": false"#);
    let sc = write(dir.path(), "coarse.json", &coarse);
    let o = run(&["run", "--scenario", sc.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("small.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failed_checks"][0], "energy");
}

#[test]
fn invalid_initial_data_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("[0.0, 0.6, 0.8]", "[0.0, 0.6, 0.9]");
    let sc = write(dir.path(), "bad.json", &bad);
    let o = run(&["run", "--scenario", sc.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma_norm"), "{}", stderr(&o));
}

#[test]
fn parse_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace(r#""h": 0.001"#, r#""h": "fast""#);
    let sc = write(dir.path(), "bad.json", &bad);
    let o = run(&["run", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("integrator.h") && err.contains("line 9"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));
    assert_eq!(run(&["verify-measure", "--system", "planar"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = bin().args(["sweep", "--system", "rubber", "--eps", "1"]).env("CHAPLYGIN_WORKERS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_measure_prints_verdict() {
    let o = run(&["verify-measure", "--system", "nonrubber-reduced", "--n", "4", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("max |div|") && out.contains("PASS"), "{out}");
    let o = run(&["verify-measure", "--system", "negative-control", "--n", "3", "--eps", "0.3", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("must exceed"));
}

#[test]
fn verify_hamiltonization_prints_residual() {
    let o = run(&["verify-hamiltonization", "--n", "4", "--eps", "0.3", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("max residual"));
}

#[test]
fn verify_equivalence_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("eq.json");
    let o = run(&["verify-equivalence", "--eps", "-1,0.3", "--samples", "2", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let o = run(&["sweep", "--system", "reduced-special", "--eps", "0.3,2", "--a", "1.2,1.5,2;1,1.4,3", "--t-end", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("4 points"));
}
