use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sbpcg::output::read_columns;

fn sbpcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbpcg")).args(args).env_remove("SBPCG_OUTPUT_DIR").output().unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).display().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn advect_writes_profiles_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["advect", "-c", &config("advect_p2.toml"), "-o", d, "--t-end", "0.01"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (x, u) = read_columns(&dir.path().join("u_advect_p2.csv")).unwrap();
    assert_eq!(x.len(), 79);
    assert_eq!(u.len(), 79);
    assert_eq!(x[0], 0.0);
    assert_eq!(x[78], 1.0);
    let first = read(&dir.path().join("e_advect_p2.csv")).lines().next().unwrap().to_string();
    let fields: Vec<&str> = first.split_whitespace().collect();
    assert_eq!(fields.len(), 2);
    assert!(fields[0].contains('e') && fields[0].split('e').next().unwrap().len() == 18, "{first}");
    let manifest: toml::Table = read(&dir.path().join("manifest_advect_p2.toml")).parse().unwrap();
    assert_eq!(manifest["mesh.nodes"].as_integer(), Some(79));
    assert_eq!(manifest["time.t_end"].as_float(), Some(0.01));
    assert_eq!(manifest["ad.coeffs"].as_array().unwrap()[1].as_float(), Some(0.02));
    assert!(manifest.contains_key("version"));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for tag in ["a", "b"] {
        let out = sbpcg(&["burgers", "-o", d, "--tag", tag, "--t-end", "0.02", "--nodes", "41"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(read(&dir.path().join("u_a.csv")), read(&dir.path().join("u_b.csv")));
}

#[test]
fn flags_override_config_and_set() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["advect", "-c", &config("advect_p3.toml"), "--set", "mesh.nodes=31", "--nodes", "46", "--t-end", "0.005", "-o", d, "--tag", "t"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest: toml::Table = read(&dir.path().join("manifest_t.toml")).parse().unwrap();
    assert_eq!(manifest["mesh.nodes"].as_integer(), Some(46));
    assert_eq!(manifest["mesh.p"].as_integer(), Some(3));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sbpcg"))
        .args(["operators", "--p", "3"])
        .env("SBPCG_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = read(&dir.path().join("operators_p3.txt"));
    assert!(text.contains("# Qx (4x4)"));
    assert!(text.contains("# D3 (4x4)"));
}

#[test]
fn ad_check_reports_verdict_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["ad-check", "--p", "2", "--coeffs", "1,-1/3", "-o", d, "--tag", "edge"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = read(&dir.path().join("ad_check_edge.txt"));
    assert!(text.contains("verdict: ok"), "{text}");
    assert!(text.contains("psd: true"));

    let out = sbpcg(&["ad-check", "--p", "2", "--coeffs", "1,-0.34", "-o", d, "--tag", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = read(&dir.path().join("ad_check_out.txt"));
    assert!(text.contains("verdict: violation e2 >= -e1/3 (e2 = -0.34)"), "{text}");
    assert!(text.contains("psd: false"));
}

#[test]
fn steady_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["steady-convergence", "--ratio", "10", "--p", "2", "--nodes", "19,40", "-o", d]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows: Vec<String> = read(&dir.path().join("table_steady_r10_p2.csv")).lines().map(String::from).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("19 ") && rows[0].ends_with("NaN"), "{}", rows[0]);
    let order: f64 = rows[1].split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((3.5..4.5).contains(&order));
}

#[test]
fn weno_baseline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["weno3", "--problem", "burgers", "--nodes", "41", "--t-end", "0.05", "-o", d, "--tag", "w"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (x, _) = read_columns(&dir.path().join("u_w.csv")).unwrap();
    assert_eq!(x.len(), 41);
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["advect", "--set", "mesh.colour=red"],
        &["advect", "--ad", "e1=-1"],
        &["advect", "--p", "2", "--ad", "e1=1,e2=-1"],
        &["advect", "--dt", "0"],
        &["burgers", "--window", "0.6", "0.4"],
        &["advect", "-c", "/nonexistent/config.toml"],
    ];
    for args in cases {
        let out = sbpcg(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        let err = stderr(&out);
        let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("error ")).collect();
        assert_eq!(lines.len(), 1, "{err}");
        assert!(lines[0].starts_with("error kind="), "{err}");
    }
    let out = sbpcg(&["advect", "--p", "2", "--ad", "e1=1,e2=-1"]);
    assert!(stderr(&out).contains("e2 >= -e1/3"));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sbpcg(&["advect", "--scheme", "rk4", "--dt", "0.5", "--t-end", "200", "--nodes", "41", "-o", d]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("kind=numerical"), "{}", stderr(&out));
}
