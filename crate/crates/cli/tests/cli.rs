use std::path::Path;
use std::process::{Command, Output};

use dmlab::propagator::{gaussian_exact, ChirpedGaussian};
use dmlab::{snapshot, Complex64, Grid};
use serde_json::Value;

fn dmlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("DMLAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&dmlab(&["--help"], dir.path())), 0);
    assert_eq!(code(&dmlab(&["--version"], dir.path())), 0);
    assert_eq!(code(&dmlab(&[], dir.path())), 64);
    assert_eq!(code(&dmlab(&["verify", "unknown"], dir.path())), 64);
    assert_eq!(code(&dmlab(&["solve", "--threads", "x"], dir.path())), 64);

    std::fs::write(dir.path().join("bad.json"), r#"{"grid": {"n": 1024, "length": 80}, "colour": 1}"#).unwrap();
    assert_eq!(code(&dmlab(&["solve", "--config", "bad.json"], dir.path())), 64);
    std::fs::write(dir.path().join("odd.json"), r#"{"grid": {"n": 1023, "length": 80}}"#).unwrap();
    assert_eq!(code(&dmlab(&["solve", "--config", "odd.json"], dir.path())), 64);
}

#[test]
fn missing_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&dmlab(&["solve", "--config", "nope.json"], dir.path())), 1);
    let o = dmlab(&["tails", "absent.csv"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.csv"));
    std::fs::write(dir.path().join("junk.csv"), "x,re,im\n0,1\n").unwrap();
    assert_eq!(code(&dmlab(&["tails", "junk.csv"], dir.path())), 1);
}

#[test]
fn solve_is_reproducible_and_its_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = dmlab(&["solve", "--deterministic", "--seed", "11", "--out", "a"], d);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&dmlab(&["solve", "--deterministic", "--seed", "11", "--out", "b"], d)), 0);
    for f in ["result.json", "soliton.csv", "soliton.meta.json", "trace.csv"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    let r = json(&d.join("a/result.json"));
    let omega = r["summary"]["omega"].as_f64().unwrap();
    assert!((0.418..=0.538).contains(&omega), "{omega}");
    assert_eq!(r["summary"]["converged"], true);

    // the emitted configuration reproduces the run
    let cfg = json(&d.join("a/config.json"));
    assert_eq!(cfg["seed"], 11);
    assert_eq!(cfg["deterministic"], true);
    let o = dmlab(&["solve", "--config", "a/config.json", "--out", "c"], d);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(d.join("a/result.json")).unwrap(), std::fs::read(d.join("c/result.json")).unwrap());
    assert_eq!(json(&d.join("c/config.json"))["solver"], cfg["solver"]);

    // and the stored soliton passes the tail checks
    let o = dmlab(&["tails", "a/soliton.csv", "--out", "t"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let t = json(&d.join("t/tails.json"));
    assert_eq!(t["advisory"], false);
    assert_eq!(t["pass"], true);
    let csv = std::fs::read_to_string(d.join("t/tails.csv")).unwrap();
    assert!(csv.starts_with("s,alpha,beta,alpha_bar,beta_bar,envelope\n"));
}

#[test]
fn non_convergence_exits_2_with_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"solver": {"lambda": 1.0, "max_iters": 0}}"#).unwrap();
    assert_eq!(code(&dmlab(&["solve", "--config", "cfg.json", "--out", "o"], d)), 2);
    assert!(d.join("o/trace.csv").exists());
    assert_eq!(json(&d.join("o/result.json"))["summary"]["converged"], false);

    std::fs::write(d.join("cfg.json"), r#"{"solver": {"lambda": 1.0, "max_iters": 3}}"#).unwrap();
    assert_eq!(code(&dmlab(&["solve", "--config", "cfg.json", "--out", "o"], d)), 2);
    let trace = std::fs::read_to_string(d.join("o/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4);
}

#[test]
fn output_directory_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dmlab"))
        .args(["verify", "duality"])
        .current_dir(dir.path())
        .env("DMLAB_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let report = json(&dir.path().join("from-env/report-duality.json"));
    assert_eq!(report.as_array().unwrap().len(), 4);
}

#[test]
fn bounds_report_carries_the_optimal_width() {
    let dir = tempfile::tempdir().unwrap();
    let o = dmlab(&["verify", "bounds", "--out", "r", "--threads", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("r/report-bounds.json"));
    let entry = report
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["check"] == "delta-star")
        .expect("delta-star entry");
    assert!((entry["value"].as_f64().unwrap() - 3.32).abs() < 0.05);
    assert!(report.as_array().unwrap().iter().all(|e| e["pass"] == true));
}

#[test]
fn verify_all_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = dmlab(&["verify", "all", "--out", "r"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("r/report-all.json"));
    assert!(report.as_array().unwrap().len() > 30);
}

#[test]
fn a_gaussian_is_analysed_in_advisory_mode() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(1024, 80.0).unwrap();
    let f = gaussian_exact(&ChirpedGaussian::with_mass(Complex64::new(1.0, 0.0), 1.0).unwrap(), 0.0, g).unwrap();
    snapshot::write_field(&dir.path().join("g.csv"), &f).unwrap();
    let o = dmlab(&["tails", "g.csv", "--out", "t"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("t/tails.json"))["advisory"], true);
}
