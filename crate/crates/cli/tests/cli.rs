//! End-to-end CLI behavior: exit codes, output files, sweep consistency.

use std::path::Path;
use std::process::{Command, Output};

fn qtel(args: &[&str], extra: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qtel"));
    cmd.args(args);
    for (flag, path) in extra {
        cmd.arg(flag).arg(path);
    }
    cmd.output().unwrap()
}

fn read_kv(path: &Path) -> Vec<(String, String)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn kv_get<'a>(kv: &'a [(String, String)], key: &str) -> &'a str {
    &kv.iter().find(|(k, _)| k == key).unwrap().1
}

#[test]
fn malformed_config_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "V = 0.05\nbogus_key = 1\n").unwrap();
    let out = qtel(
        &["simulate"],
        &[("--config", cfg.as_path()), ("--out", dir.path())],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bogus_key"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtel(
        &["simulate", "--config", "/nonexistent/path.cfg"],
        &[("--out", dir.path())],
    );
    assert!(!out.status.success());
}

#[test]
fn simulate_writes_rows_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 60\nt_max = 1000\nt_steps = 500\n").unwrap();
    let outdir = dir.path().join("fresh/nested"); // created if missing
    let out = qtel(
        &["simulate"],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(outdir.join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 501); // header + t_steps rows
    assert!(csv.starts_with("t_seconds,occ_alpha,occ_beta\n"));
    let kv = read_kv(&outdir.join("report.txt"));
    assert_eq!(kv_get(&kv, "regime"), "Telegraph");
    assert!(outdir.join("events.csv").exists());
}

#[test]
fn simulate_with_zero_environment_records_rabi_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    // pure four-level oscillation: period ~1.62 s, so 20 s holds ~12 cycles
    std::fs::write(&cfg, "W = 0\nN = 40\nt_max = 20\nt_steps = 2000\n").unwrap();
    let outdir = dir.path().join("out");
    assert!(qtel(
        &["simulate"],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    )
    .status
    .success());
    let events = std::fs::read_to_string(outdir.join("events.csv")).unwrap();
    let n_events = events.lines().count() - 1;
    assert!(n_events >= 20, "only {n_events} events:\n{events}");
    let kv = read_kv(&outdir.join("report.txt"));
    let mean: f64 = kv_get(&kv, "mean_dwell_s").parse().unwrap();
    // dwell equals the half period of the closed-form splitting (1.617/2)
    assert!((mean - 0.8087).abs() < 0.02, "mean dwell {mean}");
}

#[test]
fn spectrum_writes_distribution_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 150\n").unwrap();
    let outdir = dir.path().join("out");
    let out = qtel(
        &["spectrum", "--dump-eigen", "--dump-blocks"],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(outdir.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 152); // header + 2(N+2)
    let report = std::fs::read_to_string(outdir.join("lorentzian.txt")).unwrap();
    assert!(report.contains("branch = minus"));
    assert!(report.contains("half_width_peV = "));
    assert!(report.contains("regime = Telegraph"));
    assert!(outdir.join("eigenstates.csv").exists());
    assert!(outdir.join("h_plus.csv").exists());
    assert!(outdir.join("h_minus.csv").exists());

    // weights in the csv sum to one
    let total: f64 = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10, "total {total}");
}

#[test]
fn verify_reports_inverse_energy_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 200\n").unwrap();
    let outdir = dir.path().join("out");
    assert!(qtel(
        &["verify"],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    )
    .status
    .success());
    let kv = read_kv(&outdir.join("verify.txt"));
    let slope: f64 = kv_get(&kv, "loglog_slope").parse().unwrap();
    assert!((slope + 1.0).abs() < 0.2, "slope {slope}");
    let e2_err: f64 = kv_get(&kv, "degenerate_e2_error").parse().unwrap();
    assert!(e2_err < 1e-10);
    let csv = std::fs::read_to_string(outdir.join("verify.csv")).unwrap();
    assert!(csv.lines().count() > 10);
}

#[test]
fn sweep_classifies_the_three_reference_asymmetries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 100\nt_max = 2000\nt_steps = 300\n").unwrap();
    let outdir = dir.path().join("out");
    let out = qtel(
        &[
            "sweep",
            "--sweep-key",
            "dV",
            "--sweep-values",
            "0.045,0.018,0.005",
        ],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(outdir.join("regime_map.csv")).unwrap();
    let regimes: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(regimes, vec!["SlowRabi", "Telegraph", "Bonding"]);
    // deterministic row order follows the value list
    let dvs: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(dvs, vec!["0.045", "0.018", "0.005"]);
}

#[test]
fn single_point_sweep_matches_simulate_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    // zero environment coupling gives a clean dwell for both paths
    std::fs::write(&cfg, "W = 0\nN = 50\nt_max = 20\nt_steps = 2000\n").unwrap();

    let sim_out = dir.path().join("sim");
    assert!(qtel(
        &["simulate"],
        &[("--config", cfg.as_path()), ("--out", sim_out.as_path())],
    )
    .status
    .success());
    let kv = read_kv(&sim_out.join("report.txt"));

    let sweep_out = dir.path().join("sweep");
    assert!(qtel(
        &["sweep", "--sweep-key", "dV", "--sweep-values", "0.018"],
        &[("--config", cfg.as_path()), ("--out", sweep_out.as_path())],
    )
    .status
    .success());
    let csv = std::fs::read_to_string(sweep_out.join("regime_map.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();

    assert_eq!(row[3], kv_get(&kv, "regime"));
    let sweep_dwell: f64 = row[4].parse().unwrap();
    let sim_dwell: f64 = kv_get(&kv, "mean_dwell_s").parse().unwrap();
    assert_eq!(sweep_dwell, sim_dwell);
}

#[test]
fn dv_sweep_width_shrinks_monotonically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 150\nt_max = 2000\nt_steps = 200\n").unwrap();
    let values: Vec<String> = (0..20)
        .map(|i| format!("{}", 0.045 - 0.002 * i as f64))
        .collect();
    let outdir = dir.path().join("out");
    let out = qtel(
        &[
            "sweep",
            "--sweep-key",
            "dV",
            "--sweep-values",
            &values.join(","),
        ],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(outdir.join("regime_map.csv")).unwrap();
    let widths: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap())
        .collect();
    assert_eq!(widths.len(), 20);
    for w in widths.windows(2) {
        assert!(w[1] < w[0], "widths not decreasing: {widths:?}");
    }
}

#[test]
fn sweep_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 60\nt_max = 800\nt_steps = 200\n").unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let outdir = dir.path().join(format!("t{threads}"));
        let out = qtel(
            &[
                "sweep",
                "--threads",
                threads,
                "--sweep-key",
                "dV",
                "--sweep-values",
                "0.045,0.03,0.018,0.005",
            ],
            &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
        );
        assert!(out.status.success());
        outputs.push(std::fs::read(outdir.join("regime_map.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn multi_key_sweep_builds_a_cartesian_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 40\nt_max = 500\nt_steps = 100\n").unwrap();
    let outdir = dir.path().join("out");
    let out = qtel(
        &[
            "sweep",
            "--threads",
            "2",
            "--sweep-key",
            "dV",
            "--sweep-values",
            "0.04,0.01",
            "--sweep-key",
            "W",
            "--sweep-values",
            "0.005,0.00707",
        ],
        &[("--config", cfg.as_path()), ("--out", outdir.as_path())],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(outdir.join("regime_map.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    // dV varies slowest (first key), W fastest, in list order
    let key_cols: Vec<(&str, &str)> = rows.iter().map(|r| (r[1], r[2])).collect();
    assert_eq!(
        key_cols,
        vec![
            ("0.04", "0.005"),
            ("0.04", "0.00707"),
            ("0.01", "0.005"),
            ("0.01", "0.00707"),
        ]
    );
}

#[test]
fn sweep_grid_argument_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtel(
        &["sweep", "--sweep-key", "E_g", "--sweep-values", "1,2"],
        &[("--out", dir.path())],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = qtel(&["sweep"], &[("--out", dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
