//! End-to-end runs of the `hdlab` binary.

use hdlab::nonlocal::{characteristic_residual, NonlocalParams};
use hdlab_cli::{Command, ExperimentConfig};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::Output;

fn hdlab(out: &Path, args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_hdlab"))
        .args(args)
        .env("HDLAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn header(path: &Path) -> Vec<(String, String)> {
    hdlab_cli::output::read_header(path).unwrap()
}

fn note<'a>(h: &'a [(String, String)], key: &str) -> &'a str {
    &h.iter().find(|(k, _)| k == key).unwrap().1
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classical_trajectory_csv_embeds_its_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdlab(dir.path(), &["pu", "classical", "--omega", "1", "--t-max", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("pu-classical.csv");
    let h = header(&path);
    assert!(fs::read_to_string(&path).unwrap().starts_with("# hdlab "));
    assert_eq!(note(&h, "artifact"), "pu classical");
    let cfg = ExperimentConfig::from_json(note(&h, "config")).unwrap();
    assert_eq!(cfg.command, Command::PuClassical);
    assert_eq!((cfg.omega, cfg.t_max), (1.0, 5.0));

    let text = fs::read_to_string(&path).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "t,q1,q2,pi1,pi2,energy,x_observable");
    assert_eq!(body.len(), 1 + 201);
    // 17 significant digits in every cell
    for cell in body[1].split(',') {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{cell}");
    }
    let last: Vec<f64> = body[201].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    // the energy column is conserved
    let e0: f64 = body[1].split(',').nth(5).unwrap().parse().unwrap();
    assert!((last[5] - e0).abs() <= 1e-8 * e0.abs().max(1.0));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["nonlocal", "pf-check", "--seed", "7", "--truncations", "4,8,16"];
    assert_eq!(code(&hdlab(a.path(), &args)), 0);
    assert_eq!(code(&hdlab(b.path(), &args)), 0);
    let read = |d: &Path| fs::read(d.join("nonlocal-pf-check.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"command": "pu x-growth", "omega": 2.0}"#).unwrap();
    let o = hdlab(dir.path(), &["pu", "x-growth", "--omega", "0.5", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("pu-x-growth.json"));
    assert_eq!(r["config"]["omega"], 2.0);
    assert!((r["result"]["rate"].as_f64().unwrap() - 2.0).abs() <= 2e-6);

    // a file naming another command is refused
    let o = hdlab(dir.path(), &["pu", "classical", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn run_replays_an_embedded_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hdlab(dir.path(), &["propagator", "closed", "--extent", "2", "--samples", "11"])), 0);
    let path = dir.path().join("propagator-closed.csv");
    let first = fs::read(&path).unwrap();
    let cfg = dir.path().join("replay.json");
    fs::write(&cfg, note(&header(&path), "config")).unwrap();
    fs::remove_file(&path).unwrap();
    assert_eq!(code(&hdlab(dir.path(), &["run", "--config", cfg.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn modes_json_roots_pass_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdlab(dir.path(), &["nonlocal", "modes", "--omega", "1", "--delay", "1", "--pairs", "32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("nonlocal-modes.json"));
    let d: hdlab::nonlocal::ModeDecomposition = serde_json::from_value(r["result"]["decomposition"].clone()).unwrap();
    assert!(d.complex_modes.len() >= 32);
    let p = NonlocalParams::new(1.0, 1.0, 1.0).unwrap();
    for z in d.roots() {
        let res = characteristic_residual(z, &p).unwrap();
        assert!(res <= 1e-10 * z.norm_sqr().max(1.0), "{z}: {res:e}");
    }
}

#[test]
fn spectral_identity_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdlab(dir.path(), &["propagator", "spectral-identity", "--E", "0", "--t-max", "40"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("propagator-spectral-identity.json"));
    let res = &r["result"];
    assert!(res["lhs"].is_array() && res["rhs"].is_number());
    assert!((res["ratio"].as_f64().unwrap() - 1.0).abs() <= 0.02);
    assert_eq!(r["artifact"], "propagator spectral-identity");
    assert!(r["version"].as_str().unwrap().starts_with("hdlab "));
}

#[test]
fn complex_columns_come_in_pairs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hdlab(dir.path(), &["propagator", "trotter-converge", "--trotter-steps", "8,16,32"])), 0);
    let text = fs::read_to_string(dir.path().join("propagator-trotter-converge.csv")).unwrap();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(body.next().unwrap(), "N,kernel_re,kernel_im,relative_error");
    let rows: Vec<Vec<f64>> = body.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    let k = C::new(rows[2][1], rows[2][2]);
    let exact = hdlab::propagator::inverted_propagator(0.3, -0.2, 1.0, 1.0, 1.0).unwrap();
    assert!(((k - exact).norm() / exact.norm() - rows[2][3]).abs() <= 1e-15);
    assert!(rows.windows(2).all(|w| w[1][3] < w[0][3]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // config errors
    assert_eq!(code(&hdlab(d, &["pu", "classical", "--omega", "-1"])), 2);
    assert_eq!(code(&hdlab(d, &["pu", "classical", "--no-such-flag"])), 2);
    assert_eq!(code(&hdlab(d, &["pu", "classical", "--state", "1,2,3"])), 2);
    // degenerate input: a harmonic caustic
    assert_eq!(code(&hdlab(d, &["propagator", "closed", "--time", "3.141592653589793"])), 3);
    // accuracy: an unreachable tolerance
    assert_eq!(code(&hdlab(d, &["lab", "commutator", "--points", "256", "--tolerance", "1e-30"])), 4);
    assert!(d.join("lab-commutator.json").exists());
    // runtime: the output directory is a file
    let blocked = d.join("file");
    fs::write(&blocked, "").unwrap();
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_hdlab"))
        .args(["pu", "x-growth", "--output", blocked.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 5);
    assert_eq!(code(&hdlab(d, &["--help"])), 0);
}

#[test]
fn plot_scripts_for_the_main_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hdlab(d, &["propagator", "trotter-converge"])), 0);
    assert_eq!(code(&hdlab(d, &["lab", "divergence-scan", "--epsilon", "0.8"])), 0);
    assert_eq!(code(&hdlab(d, &["propagator", "euclid-pitfall", "--t-max", "20", "--samples", "2000"])), 0);
    assert_eq!(code(&hdlab(d, &["lab", "evolve", "--points", "256", "--extent", "15", "--steps", "50"])), 0);
    let files = ["propagator-trotter-converge.csv", "lab-divergence-scan.csv", "propagator-euclid-pitfall.csv", "lab-evolve.csv"];
    let mut args = vec!["emit-plots".to_owned()];
    args.extend(files.iter().map(|f| d.join(f).display().to_string()));
    args.extend(["--output".to_owned(), d.join("plots.gp").display().to_string()]);
    let o = hdlab(d, &args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let script = fs::read_to_string(d.join("plots.gp")).unwrap();
    assert!(script.contains("set logscale xy") && script.contains("relative error"));
    assert!(script.contains("'cutoff R'") && script.contains("divergent"));
    assert!(script.contains("detected period 3.14"));
    assert!(script.contains("norm drift"));
    assert_eq!(script.lines().filter(|l| l.starts_with("set output")).count(), 4);

    assert_eq!(code(&hdlab(d, &["emit-plots", d.join("absent.csv").to_str().unwrap()])), 2);
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips_bit_identically(
        omega in finite(), delay in finite(), hbar in finite(), dt in finite(),
        cutoffs in prop::collection::vec(finite(), 0..6), seed in any::<u64>(), tol in prop::option::of(finite()),
        which in 0usize..18,
    ) {
        let mut c = ExperimentConfig { omega, delay, hbar, dt, cutoffs, seed, tolerance: tol, ..Default::default() };
        c.command = Command::ALL[which];
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), c.to_json());
        prop_assert_eq!(back.omega.to_bits(), c.omega.to_bits());
        prop_assert_eq!(back.dt.to_bits(), c.dt.to_bits());
        prop_assert!(back.cutoffs.iter().zip(&c.cutoffs).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back, c);
    }
}
