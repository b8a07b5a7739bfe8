use std::path::PathBuf;

use sbpcg::experiments::{run_advect, run_burgers, Profile};
use sbpcg::{ExperimentConfig, Settings};

fn load(name: &str) -> Settings {
    Settings::from_file(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)).unwrap()
}

fn max_error(p: &Profile) -> f64 {
    p.error().iter().fold(0.0, |m, e| m.max(e.abs()))
}

fn with_dt(s: &Settings, dt: f64) -> ExperimentConfig {
    let mut s = s.clone();
    s.set("time.dt", format!("{dt:?}"));
    ExperimentConfig::from_settings(&s).unwrap()
}

#[test]
fn burgers_error_is_converged_in_time() {
    let s = load("burgers_p4.toml");
    let coarse = max_error(&run_burgers(&with_dt(&s, 1e-4)).unwrap());
    let fine = max_error(&run_burgers(&with_dt(&s, 5e-5)).unwrap());
    assert!((coarse - fine).abs() < 0.01 * fine, "{coarse} vs {fine}");
}

#[test]
fn advect_error_is_converged_in_time() {
    for name in ["advect_p2.toml", "advect_p4.toml"] {
        let s = load(name);
        let coarse = max_error(&run_advect(&with_dt(&s, 1e-4)).unwrap());
        let fine = max_error(&run_advect(&with_dt(&s, 5e-5)).unwrap());
        assert!((coarse - fine).abs() < 0.01 * fine, "{name}: {coarse} vs {fine}");
    }
}

#[test]
fn burgers_midpoint_stays_zero() {
    let mut s = load("burgers_p4.toml");
    s.set("time.t_end", "0.3");
    let p = run_burgers(&ExperimentConfig::from_settings(&s).unwrap()).unwrap();
    let mid = p.x.iter().position(|&x| (x - 0.5).abs() < 1e-14).unwrap();
    assert!(p.u[mid].abs() < 1e-10, "{}", p.u[mid]);
}

#[test]
fn configs_resolve() {
    for name in ["advect_p2.toml", "advect_p3.toml", "advect_p4.toml", "burgers_p4.toml", "steady.toml"] {
        ExperimentConfig::from_settings(&load(name)).unwrap();
    }
}
