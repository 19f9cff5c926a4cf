use std::fs;
use std::path::Path;
use std::process::Command;

use kgsae_cli::{check_eigenvalues, preset, run_verify, simulate, spectrum_report, ScenarioConfig, SolverKind};

fn kgsae(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kgsae")).args(args).output().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn column(path: &Path, i: usize) -> Vec<f64> {
    rows(path).iter().map(|r| r[i].parse().unwrap()).collect()
}

const MINIMAL_CIRCLE: &str = r#"
[manifold]
kind = "circle"
circumference = 2.0

[extension]
kind = "circle_closure"

[data]
phi0 = [{ kind = "bump", center = 1.0, halfwidth = 0.3, amplitude = 1.0 }]

[time]
start = 0.0
end = 0.5
steps = 5
"#;

#[test]
fn minimal_circle_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("circle.toml");
    fs::write(&cfg, MINIMAL_CIRCLE).unwrap();
    let out = dir.path().join("out");
    let run = kgsae(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["meta.json", "spectrum.csv", "snapshots.csv", "conserved.csv"] {
        assert!(fs::metadata(out.join(f)).unwrap().len() > 0, "{f} empty");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert!(meta["truncation"]["modes"].as_u64().unwrap() > 0);
    assert!(meta["truncation"]["parseval_defect"].as_f64().unwrap() < 1e-8);
    assert_eq!(meta["content_hash"].as_str().unwrap().len(), 40);
    let energy = column(&out.join("conserved.csv"), 1);
    assert!(energy.iter().all(|e| (e - energy[0]).abs() <= 1e-10 * energy[0]));
}

#[test]
fn reruns_are_byte_identical() {
    let sc = ScenarioConfig::from_toml(MINIMAL_CIRCLE).unwrap().validate().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ra, rb) = (simulate(&sc, a.path()).unwrap(), simulate(&sc, b.path()).unwrap());
    assert_eq!(ra.content_hash, rb.content_hash);
    for f in &ra.files {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn counterexample_leaks_after_the_causal_window() {
    let dir = tempfile::tempdir().unwrap();
    let sc = preset("nonlocal_counterexample").unwrap().validate().unwrap();
    simulate(&sc, dir.path()).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("meta.json")).unwrap()).unwrap();
    let t_inf = meta["geometry"]["t_infinity"].as_f64().unwrap();
    assert!((t_inf - 0.25).abs() < 1e-15);
    let path = dir.path().join("conserved.csv");
    let (t, leak) = (column(&path, 0), column(&path, 3));
    let first = t.iter().zip(&leak).find(|(_, &l)| l >= 1e-3).map(|(&t, _)| t).unwrap();
    assert!(first > t_inf && first < 0.35, "leakage crosses 1e-3 at t = {first}");
    for (t, l) in t.iter().zip(&leak) {
        if *t < t_inf {
            assert!(*l < 1e-6, "leakage {l} at t = {t}");
        }
    }
}

#[test]
fn both_solvers_write_a_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("interval_first_kind").unwrap();
    cfg.solver = SolverKind::Both;
    cfg.time.end = 0.5;
    cfg.time.steps = 5;
    let summary = simulate(&cfg.validate().unwrap(), dir.path()).unwrap();
    for f in ["snapshots.csv", "snapshots_fd.csv", "comparison.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let diff = column(&dir.path().join("comparison.csv"), 1);
    assert!(diff.iter().all(|d| *d <= 1e-3), "{diff:?}");
    assert!(summary.fd_difference.unwrap() < 1e-2);
    let spectral = rows(&dir.path().join("snapshots.csv"));
    let fd = rows(&dir.path().join("snapshots_fd.csv"));
    assert_eq!(spectral.len(), fd.len());
    assert_eq!(spectral[7][1], fd[7][1]);
}

fn listed(cfg: &ScenarioConfig) -> Vec<(f64, usize, usize)> {
    let dir = tempfile::tempdir().unwrap();
    spectrum_report(cfg, dir.path()).unwrap();
    rows(&dir.path().join("spectrum.csv"))
        .iter()
        .filter(|r| r[3] != "continuum")
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap(), r[4].parse().unwrap()))
        .collect()
}

#[test]
fn spectrum_presets_match_closed_forms() {
    let dirichlet = listed(&preset("interval_dirichlet").unwrap());
    assert_eq!(dirichlet.len(), 20);
    for (n, (l, m, _)) in dirichlet.iter().enumerate() {
        let exact = ((n + 1) as f64 * std::f64::consts::PI).powi(2);
        assert!((l - exact).abs() <= 1e-10 * exact);
        assert_eq!(*m, 1);
    }
    let robin = listed(&preset("half_line_robin").unwrap());
    assert_eq!(robin.len(), 1);
    assert!((robin[0].0 + (1.0 / 0.3f64.tan()).powi(2)).abs() < 1e-12);

    let sum = listed(&preset("direct_sum_half_lines").unwrap());
    let mut expected: Vec<(f64, usize)> = (0..3).map(|n| (-(1.0 / (1.0 / (n as f64 + 2.0)).tan()).powi(2), n)).collect();
    expected.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(sum.len(), 3);
    for ((l, _, c), (e, n)) in sum.iter().zip(&expected) {
        assert!((l - e).abs() <= 1e-12 * e.abs());
        assert_eq!(c, n);
    }
}

#[test]
fn verify_passes_on_interval_presets() {
    for name in ["circle", "circle_mass_shift", "interval_dirichlet", "interval_neumann", "interval_first_kind", "interval_second_kind_periodic", "half_line_robin_bound_state", "nonlocal_counterexample"] {
        let report = run_verify(&preset(name).unwrap().validate().unwrap()).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
        assert!(report.pass, "{name}: {failed:?}");
    }
}

#[test]
fn verify_passes_on_half_line_presets() {
    for name in ["half_line_robin", "direct_sum_half_lines"] {
        let report = run_verify(&preset(name).unwrap().validate().unwrap()).unwrap();
        assert!(report.pass, "{name}: {:?}", report.checks);
    }
}

#[test]
fn corrupted_eigenvalue_fails_by_name() {
    let p = preset("interval_first_kind").unwrap().validate().unwrap().problem;
    let good = [0.21179105108675266, 8.5116251908491169];
    assert!(check_eigenvalues(&p, &good).pass);
    let check = check_eigenvalues(&p, &[good[0], good[1] * (1.0 + 1e-4)]);
    assert!(!check.pass);
    assert_eq!(check.name, "eigenvalues");
    assert!(check.detail.contains("8.51"));
}

#[test]
fn zero_data_passes_vacuously() {
    let mut cfg = preset("interval_dirichlet").unwrap();
    cfg.data = Default::default();
    let report = run_verify(&cfg.validate().unwrap()).unwrap();
    assert!(report.pass);
    assert!(report.checks.iter().skip(1).all(|c| c.detail.starts_with("vacuous")));
}

#[test]
fn verify_command_reports_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let run = kgsae(&["verify", "--preset", "interval_dirichlet", "--out", dir.path().to_str().unwrap()]);
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["tolerance"].is_number()));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, MINIMAL_CIRCLE.replace("halfwidth = 0.3", "halfwidth = 1.5")).unwrap();
    let run = kgsae(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("data.phi0[0]"));
}

#[test]
fn greens_table_is_symmetric_for_real_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("interval_dirichlet").unwrap();
    cfg.greens.lambda = num_complex::Complex64::new(-2.0, 0.0);
    cfg.greens.points = 6;
    kgsae_cli::greens_table(&cfg, dir.path()).unwrap();
    let table = rows(&dir.path().join("greens.csv"));
    assert_eq!(table.len(), 36);
    let g = |i: usize, j: usize| table[i * 6 + j][4].parse::<f64>().unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert!((g(i, j) - g(j, i)).abs() < 1e-14);
        }
    }
}
