//! Command-line front end over the core library.
//!
//! Subcommands: `simulate`, `spectrum`, `verify`, `sweep`. All outputs are
//! CSV files or `key = value` text reports under `--out`. Exit codes:
//! 0 success, 1 computation error, 2 configuration error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qtel_core::config::{parse_config, RunConfig};
use qtel_core::dynamics::run_time_series;
use qtel_core::model::{build_hamiltonian, BasisLabel, BasisMap, ModelParams, Side};
use qtel_core::output;
use qtel_core::scattering::validate_against_exact;
use qtel_core::spectral::{fit_lorentzian, spectral_distribution_from_blocks, Branch};
use qtel_core::spectrum::{degenerate_reduction, diagonalize, project_initial, EigenSystem};
use qtel_core::symmetry::{build_transform, extract_blocks, transform_hamiltonian};
use qtel_core::telegraph::{
    adaptive_thresholds, classify_regime, detect_switches, dwell_statistics, DEFAULT_HI, DEFAULT_LO,
};

#[derive(Parser)]
#[command(name = "qtel", version, about = "Two-site quantum switching simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Path to a `key = value` config file; missing keys use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution: timeseries.csv, events.csv and a regime report.
    Simulate(CommonArgs),
    /// Spectral distribution and Lorentzian resonance fits.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump per-eigenstate energies and initial-state weights.
        #[arg(long)]
        dump_eigen: bool,
        /// Also dump the two decoupled Hamiltonian blocks as CSV.
        #[arg(long)]
        dump_blocks: bool,
    },
    /// Cross-check closed-form scattering amplitudes against exact results.
    Verify(CommonArgs),
    /// Classify a parameter grid: regime_map.csv, one row per point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to sweep (`V`, `dV` or `W`); may be repeated.
        #[arg(long = "sweep-key")]
        keys: Vec<String>,
        /// Comma-separated values for the matching --sweep-key.
        #[arg(long = "sweep-values")]
        values: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<qtel_core::Error>() {
                Some(core_err) => core_err.exit_code(),
                None => 1,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = load_config(&common)?;
            init_threads(common.threads)?;
            cmd_simulate(&cfg, &common.out)
        }
        Command::Spectrum {
            common,
            dump_eigen,
            dump_blocks,
        } => {
            let cfg = load_config(&common)?;
            init_threads(common.threads)?;
            cmd_spectrum(&cfg, &common.out, dump_eigen, dump_blocks)
        }
        Command::Verify(common) => {
            let cfg = load_config(&common)?;
            init_threads(common.threads)?;
            cmd_verify(&cfg, &common.out)
        }
        Command::Sweep {
            common,
            keys,
            values,
        } => {
            let cfg = load_config(&common)?;
            init_threads(common.threads)?;
            cmd_sweep(&cfg, &common.out, &keys, &values)
        }
    }
}

fn load_config(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            Ok(parse_config(&text)?)
        }
        None => Ok(RunConfig::default()),
    }
}

fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building thread pool")?;
    }
    Ok(())
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    let ts = run_time_series(&cfg.params, cfg.t_max, cfg.t_steps, true)?;
    let regime = classify_regime(cfg.params.v, cfg.params.dv)?;

    let ev = detect_switches(&ts, DEFAULT_LO, DEFAULT_HI)?;
    let stats = dwell_statistics(&ev).ok();
    // the adaptive thresholds degenerate on a flat series; skip them then
    let (alo, ahi) = adaptive_thresholds(&ts.occ_alpha);
    let adaptive = detect_switches(&ts, alo, ahi).ok();
    let astats = adaptive.as_ref().and_then(|aev| dwell_statistics(aev).ok());

    write(&out.join("timeseries.csv"), &output::timeseries_csv(&ts))?;
    write(&out.join("events.csv"), &output::events_csv(&ev))?;
    write(
        &out.join("report.txt"),
        &output::simulate_report(
            &cfg.params,
            regime,
            &ev,
            stats.as_ref(),
            adaptive.as_ref().map(|aev| (aev, astats.as_ref())),
        ),
    )?;
    println!(
        "simulate: regime {regime}, {} switches at {}/{} over {} s",
        ev.events.len(),
        ev.lo,
        ev.hi,
        cfg.t_max
    );
    Ok(())
}

fn minus_block_eigensystem(p: &ModelParams) -> anyhow::Result<EigenSystem> {
    let b = BasisMap::for_params(p);
    let h = build_hamiltonian(p, &b)?;
    let t = build_transform(&b);
    let ht = transform_hamiltonian(&h, &t)?;
    let (_, hm) = extract_blocks(&ht, &t)?;
    Ok(diagonalize(&hm)?)
}

fn cmd_spectrum(
    cfg: &RunConfig,
    out: &Path,
    dump_eigen: bool,
    dump_blocks: bool,
) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    let p = &cfg.params;
    let regime = classify_regime(p.v, p.dv)?;

    let b = BasisMap::for_params(p);
    let h = build_hamiltonian(p, &b)?;
    let t = build_transform(&b);
    let ht = transform_hamiltonian(&h, &t)?;
    let (hp, hm) = extract_blocks(&ht, &t)?;
    if dump_blocks {
        write(&out.join("h_plus.csv"), &output::matrix_csv(hp.entries()))?;
        write(&out.join("h_minus.csv"), &output::matrix_csv(hm.entries()))?;
    }
    let es_plus = diagonalize(&hp)?;
    let es_minus = diagonalize(&hm)?;
    let sd = spectral_distribution_from_blocks(&es_plus, &es_minus)?;
    write(&out.join("spectrum.csv"), &output::spectrum_csv(&sd))?;

    let mut report = String::new();
    for branch in [Branch::Minus, Branch::Plus] {
        match fit_lorentzian(&sd, branch, p) {
            Ok(fit) => {
                report.push_str(&output::lorentzian_report(p, regime, branch.name(), &fit));
                report.push('\n');
            }
            Err(e) => {
                report.push_str(&format!("branch = {}\nfit_error = {e}\n\n", branch.name()));
            }
        }
    }
    // closed-form check values for the degenerate-continuum limit
    let red = degenerate_reduction(p)?;
    report.push_str(&format!("degenerate_E2 = {}\n", red.e2));
    report.push_str(&format!("degenerate_E3 = {}\n", red.e3));
    report.push_str(&format!("degenerate_E3_estimate = {}\n", red.e3_approx));
    report.push_str(&format!("w_kappa_overlap = {}\n", red.w_kappa_overlap));
    write(&out.join("lorentzian.txt"), &report)?;

    if dump_eigen {
        let es = diagonalize(&h)?;
        let c = project_initial(&es, &b, BasisLabel::Remote(Side::Alpha))?;
        let weights: Vec<f64> = c.iter().map(|x| x * x).collect();
        write(
            &out.join("eigenstates.csv"),
            &output::eigen_csv(&es, &weights),
        )?;
    }
    println!(
        "spectrum: {} eigenstates written, regime {regime}",
        sd.entries.len()
    );
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    let p = &cfg.params;
    let es_minus = minus_block_eigensystem(p)?;
    let rep = validate_against_exact(p, &es_minus)?;
    let mut report = output::verify_report(p, &rep);

    // degenerate-continuum oracle digest alongside the scattering check
    let mut pd = p.clone();
    pd.degenerate_continuum = true;
    let b = BasisMap::for_params(&pd);
    let h = build_hamiltonian(&pd, &b)?;
    let t = build_transform(&b);
    let (_, hm) = extract_blocks(&transform_hamiltonian(&h, &t)?, &t)?;
    let es = diagonalize(&hm)?;
    let red = degenerate_reduction(&pd)?;
    let ev = es.eigenvalues();
    let max_zero = ev[1..=pd.n].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    report.push_str(&format!(
        "degenerate_e3_error = {}\n",
        (ev[0] - red.e3).abs()
    ));
    report.push_str(&format!(
        "degenerate_e2_error = {}\n",
        (ev[pd.n + 1] - red.e2).abs()
    ));
    report.push_str(&format!("degenerate_max_zero = {max_zero}\n"));

    write(&out.join("verify.txt"), &report)?;
    write(&out.join("verify.csv"), &output::verify_csv(&rep))?;
    println!(
        "verify: slope {:.4}, scale ratio {:.3} over {} near-shell states",
        rep.slope,
        rep.regression_scale / rep.predicted_scale,
        rep.n_points
    );
    Ok(())
}

/// One grid point of a sweep. Partial failures land in `error` and leave the
/// other fields empty so the run continues.
struct SweepRow {
    v: f64,
    dv: f64,
    w: f64,
    regime: String,
    mean_dwell: Option<f64>,
    fit_width: Option<f64>,
    error: Option<String>,
}

fn sweep_point(cfg: &RunConfig, v: f64, dv: f64, w: f64) -> SweepRow {
    let mut p = cfg.params.clone();
    p.v = v;
    p.dv = dv;
    p.w = w;
    let regime = match classify_regime(v, dv) {
        Ok(r) => r.name().to_string(),
        Err(e) => {
            return SweepRow {
                v,
                dv,
                w,
                regime: String::new(),
                mean_dwell: None,
                fit_width: None,
                error: Some(e.to_string()),
            }
        }
    };
    let computed = (|| -> qtel_core::Result<(Option<f64>, Option<f64>)> {
        let ts = run_time_series(&p, cfg.t_max, cfg.t_steps, true)?;
        let ev = detect_switches(&ts, DEFAULT_LO, DEFAULT_HI)?;
        let mean_dwell = dwell_statistics(&ev).ok().map(|s| s.mean);

        let b = BasisMap::for_params(&p);
        let h = build_hamiltonian(&p, &b)?;
        let t = build_transform(&b);
        let (hp, hm) = extract_blocks(&transform_hamiltonian(&h, &t)?, &t)?;
        let sd = spectral_distribution_from_blocks(&diagonalize(&hp)?, &diagonalize(&hm)?)?;
        let fit_width = fit_lorentzian(&sd, Branch::Minus, &p)
            .ok()
            .map(|f| f.half_width);
        Ok((mean_dwell, fit_width))
    })();
    match computed {
        Ok((mean_dwell, fit_width)) => SweepRow {
            v,
            dv,
            w,
            regime,
            mean_dwell,
            fit_width,
            error: None,
        },
        Err(e) => SweepRow {
            v,
            dv,
            w,
            regime,
            mean_dwell: None,
            fit_width: None,
            error: Some(e.to_string()),
        },
    }
}

fn cmd_sweep(
    cfg: &RunConfig,
    out: &Path,
    keys: &[String],
    values: &[String],
) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    if keys.is_empty() {
        anyhow::bail!(qtel_core::Error::InvalidParams(vec![
            "sweep needs at least one --sweep-key with --sweep-values".into()
        ]));
    }
    if keys.len() != values.len() {
        anyhow::bail!(qtel_core::Error::InvalidParams(vec![format!(
            "{} --sweep-key flags but {} --sweep-values",
            keys.len(),
            values.len()
        )]));
    }
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for (k, vs) in keys.iter().zip(values) {
        if !matches!(k.as_str(), "V" | "dV" | "W") {
            anyhow::bail!(qtel_core::Error::InvalidParams(vec![format!(
                "sweep key must be one of V, dV, W; got `{k}`"
            )]));
        }
        if axes.iter().any(|(seen, _)| seen == k) {
            anyhow::bail!(qtel_core::Error::InvalidParams(vec![format!(
                "duplicate sweep key `{k}`"
            )]));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            vs.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let parsed = parsed.map_err(|_| {
            qtel_core::Error::InvalidParams(vec![format!("bad value list for `{k}`: `{vs}`")])
        })?;
        if parsed.is_empty() {
            anyhow::bail!(qtel_core::Error::InvalidParams(vec![format!(
                "empty value list for `{k}`"
            )]));
        }
        axes.push((k.clone(), parsed));
    }

    // cartesian grid in deterministic order
    let mut grid: Vec<(f64, f64, f64)> = vec![(cfg.params.v, cfg.params.dv, cfg.params.w)];
    for (key, vals) in &axes {
        let mut next = Vec::with_capacity(grid.len() * vals.len());
        for &(v, dv, w) in &grid {
            for &x in vals {
                next.push(match key.as_str() {
                    "V" => (x, dv, w),
                    "dV" => (v, x, w),
                    _ => (v, dv, x),
                });
            }
        }
        grid = next;
    }

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(v, dv, w)| sweep_point(cfg, v, dv, w))
        .collect();

    let mut csv = String::from("V,dV,W,regime,mean_dwell_s,fit_half_width_peV,error\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.v,
            r.dv,
            r.w,
            r.regime,
            r.mean_dwell.map(|x| x.to_string()).unwrap_or_default(),
            r.fit_width.map(|x| x.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ));
    }
    write(&out.join("regime_map.csv"), &csv)?;
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    println!("sweep: {} points, {failures} failures", rows.len());
    Ok(())
}
