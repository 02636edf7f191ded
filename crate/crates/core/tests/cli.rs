//! End-to-end runs of the `hybrid-turbulence` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("config.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hybrid-turbulence"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Data rows of a CSV file with `#` metadata lines stripped.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn sine_norm_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[field]\nkind = \"sine\"\n", &["norm"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("4.49880"));
    let (header, rows) = table(&dir.path().join("out/norm.csv"));
    let value: f64 = rows[0][column(&header, "norm")].parse().unwrap();
    assert!((value - (2.0 * PI * PI + 0.5).sqrt()).abs() < 1e-12);
}

#[test]
fn exponent_at_most_one_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[norm]\np = 1.0\n", &["norm"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("1 < p"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_missing_files_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), "[norm]\nr = 2.0\n", &["norm"])), 2);
    let missing = Command::new(env!("CARGO_BIN_EXE_hybrid-turbulence"))
        .args(["norm", "--config", "/nonexistent/config.toml", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&missing), 2);
    let bad_flag = Command::new(env!("CARGO_BIN_EXE_hybrid-turbulence")).arg("--bogus").output().unwrap();
    assert_eq!(code(&bad_flag), 2);
}

#[test]
fn dirichlet_line_spectrum() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[spectrum]\nn = 512\nk = 5\n", &["spectrum"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = table(&dir.path().join("out/spectrum.csv"));
    assert_eq!(rows.len(), 5);
    let l1: f64 = rows[0][column(&header, "eigenvalue")].parse().unwrap();
    assert!((l1 - PI * PI).abs() < 1e-3 * PI * PI);
    let margin: f64 = rows[0][column(&header, "margin")].parse().unwrap();
    assert!(margin.abs() < 1e-9);
}

#[test]
fn too_many_eigenvalues_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[spectrum]\nn = 8\nk = 9\n", &["spectrum"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn anisotropic_rate_ratio_is_reported() {
    let dir = TempDir::new().unwrap();
    let config = "[dissipate]\nsigma = [[4.0, 0.0], [0.0, 1.0]]\ndecay_modes = [[1, 0], [0, 1]]\ndecay_time = 0.001\n";
    let out = run(dir.path(), config, &["dissipate"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = table(&dir.path().join("out/decay_rates.csv"));
    let m = column(&header, "measured");
    let ratio = rows[0][m].parse::<f64>().unwrap() / rows[1][m].parse::<f64>().unwrap();
    assert!((ratio - 16.0).abs() < 0.16, "{ratio}");
    let (_, traj) = table(&dir.path().join("out/dissipation.csv"));
    assert!(traj.len() > 2);
}

#[test]
fn indefinite_sigma_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[dissipate]\nsigma = [[1.0, 2.0], [2.0, 1.0]]\n", &["dissipate"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("positive definite"), "{}", stderr(&out));
}

#[test]
fn oversized_step_is_a_stability_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[dissipate]\ndt = 0.04\nhorizon = 0.08\n", &["dissipate"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("try dt"), "{}", stderr(&out));
}

#[test]
fn simulation_blow_up_exits_with_four() {
    let dir = TempDir::new().unwrap();
    let config = "[simulate]\nn = 16\nhorizon = 0.1\ndt = 0.01\nsample_interval = 0.05\nensemble_size = 2\nnoise_amplitude = 1e200\n";
    let out = run(dir.path(), config, &["simulate"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn simulation_writes_ensemble_and_residual_study() {
    let dir = TempDir::new().unwrap();
    let config = "seed = 4\n[simulate]\nn = 64\nhorizon = 0.5\ndt = 0.01\nsample_interval = 0.05\nensemble_size = 2\nnoise_amplitude = 0.3\n";
    let out = run(dir.path(), config, &["simulate", "--dt-study"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = table(&dir.path().join("out/ensemble.csv"));
    assert_eq!(rows.len(), 11);
    for name in ["t", "mean_energy", "mean_hybrid_norm_sq", "mean_running_sup", "residual", "bound", "shell4_energy"] {
        column(&header, name);
    }
    let text = std::fs::read_to_string(dir.path().join("out/ensemble.csv")).unwrap();
    assert!(text.contains("# seed=4"));
    assert!(text.contains("# noise="));
    assert!(!text.contains("wall_clock"));

    let (header, rows) = table(&dir.path().join("out/residual_study.csv"));
    let r = column(&header, "max_residual");
    let order = (rows[0][r].parse::<f64>().unwrap() / rows[1][r].parse::<f64>().unwrap()).log2();
    assert!(order >= 1.8, "{order}");

    let manifest: toml::Table = std::fs::read_to_string(dir.path().join("out/simulate.manifest.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(manifest["wall_clock_seconds"].as_float().unwrap() >= 0.0);
    assert_eq!(manifest["seed"].as_integer(), Some(4));
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = TempDir::new().unwrap();
    let config = "seed = 1\n[field]\nkind = \"random\"\n";
    let a = run(dir.path(), config, &["norm", "--seed", "2"]);
    assert_eq!(code(&a), 0);
    let with_flag = std::fs::read_to_string(dir.path().join("out/norm.csv")).unwrap();
    let b = run(dir.path(), "seed = 2\n[field]\nkind = \"random\"\n", &["norm"]);
    assert_eq!(code(&b), 0);
    let with_config = std::fs::read_to_string(dir.path().join("out/norm.csv")).unwrap();
    assert!(with_flag.contains("# seed=2"));
    assert_eq!(table_rows(&with_flag), table_rows(&with_config));
}

fn table_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn reduced_verification_passes_and_detects_an_injected_fault() {
    let dir = TempDir::new().unwrap();
    let clean = run(dir.path(), "", &["verify", "--reduced"]);
    assert_eq!(code(&clean), 0, "{}", stdout(&clean));
    let (header, rows) = table(&dir.path().join("out/verify.csv"));
    let passed = column(&header, "passed");
    assert!(rows.iter().all(|r| r[passed] == "true"));

    let faulty = run(dir.path(), "", &["verify", "--reduced", "--inject-fault", "symmetry"]);
    assert_eq!(code(&faulty), 1);
    let (header, rows) = table(&dir.path().join("out/verify.csv"));
    let (name, passed) = (column(&header, "check"), column(&header, "passed"));
    let failing: Vec<&str> = rows.iter().filter(|r| r[passed] == "false").map(|r| r[name].as_str()).collect();
    assert_eq!(failing, ["symmetry_defect"]);
}
