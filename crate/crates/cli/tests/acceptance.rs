//! Acceptance suite. One test per criterion; each prints a pass/fail line
//! with the measured numbers (run with `--nocapture` to see them all).
//!
//! Criteria 3 and 8 contain sub-checks that the model's exact dynamics and
//! closed forms provably cannot meet at the reference parameters; they are
//! asserted as stated anyway and fail with the measured values rather than
//! being loosened. See the failure messages for the numbers.

use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use qtel_core::dynamics::{evolve, run_time_series, side_occupation, TimeSeries};
use qtel_core::model::{build_hamiltonian, BasisLabel, BasisMap, ModelParams, Side};
use qtel_core::presets;
use qtel_core::scattering::{onshell_matrix_elements, validate_against_exact};
use qtel_core::spectral::{
    fit_lorentzian, spectral_distribution_from_blocks, Branch, SpectralDistribution,
};
use qtel_core::spectrum::{degenerate_reduction, diagonalize, project_initial, EigenSystem};
use qtel_core::symmetry::{build_transform, extract_blocks, max_off_block, transform_hamiltonian};
use qtel_core::telegraph::{
    adaptive_thresholds, classify_regime, detect_switches, dominant_period, dwell_statistics,
    square_wave_partial_sum, Regime, DEFAULT_HI, DEFAULT_LO,
};

const T_MAX: f64 = 8000.0;
const T_STEPS: usize = 4000;

fn example(k: usize) -> ModelParams {
    match k {
        1 => presets::slow_rabi(),
        2 => presets::telegraph(),
        3 => presets::bonding(),
        _ => unreachable!(),
    }
}

fn series(k: usize) -> &'static TimeSeries {
    static CACHE: [OnceLock<TimeSeries>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[k - 1].get_or_init(|| {
        let t0 = Instant::now();
        let ts = run_time_series(&example(k), T_MAX, T_STEPS, true).unwrap();
        let dt = t0.elapsed();
        assert!(
            dt.as_secs_f64() < 30.0,
            "example {k} run took {dt:?}, over the 30 s budget"
        );
        ts
    })
}

struct Blocks {
    plus: EigenSystem,
    minus: EigenSystem,
}

fn blocks(k: usize) -> &'static Blocks {
    static CACHE: [OnceLock<Blocks>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[k - 1].get_or_init(|| {
        let p = example(k);
        let b = BasisMap::for_params(&p);
        let h = build_hamiltonian(&p, &b).unwrap();
        let t = build_transform(&b);
        let ht = transform_hamiltonian(&h, &t).unwrap();
        let (hp, hm) = extract_blocks(&ht, &t).unwrap();
        Blocks {
            plus: diagonalize(&hp).unwrap(),
            minus: diagonalize(&hm).unwrap(),
        }
    })
}

fn distribution(k: usize) -> SpectralDistribution {
    let b = blocks(k);
    spectral_distribution_from_blocks(&b.plus, &b.minus).unwrap()
}

/// Splitting of the two lowest four-level (W = 0) eigenvalues, evaluated from
/// the closed-form 2x2 block eigenvalues; the side-transfer period is
/// 2 pi hbar over this splitting.
fn w0_rabi_period(p: &ModelParams) -> f64 {
    let half = p.e_w / 2.0;
    let e_plus = half - (half * half + (2.0 * p.v - p.dv).powi(2)).sqrt();
    let e_minus = half - (half * half + p.dv * p.dv).sqrt();
    2.0 * std::f64::consts::PI * p.hbar / (e_plus - e_minus).abs()
}

#[test]
fn criterion_01_block_decoupling() {
    for k in 1..=3 {
        let p = example(k);
        let b = BasisMap::for_params(&p);
        let h = build_hamiltonian(&p, &b).unwrap();
        let t = build_transform(&b);
        let start = Instant::now();
        let ht = transform_hamiltonian(&h, &t).unwrap();
        let leak = max_off_block(&ht, &t);
        let elapsed = start.elapsed();
        let tol = 1e-12 * ht.max_abs();
        println!(
            "criterion 1 (example {k}): {} -- off-block max {leak:e} vs {tol:e}, {elapsed:?}",
            if leak <= tol { "PASS" } else { "FAIL" }
        );
        assert!(leak <= tol, "example {k}: leak {leak:e} > {tol:e}");
        assert!(elapsed.as_secs_f64() < 1.0, "transform took {elapsed:?}");
    }
}

#[test]
fn criterion_02_unitarity_and_trace() {
    let p = example(2);
    let b = BasisMap::for_params(&p);
    let h = build_hamiltonian(&p, &b).unwrap();
    let es = diagonalize(&h).unwrap();
    let c0: Vec<qtel_core::Complex64> = project_initial(&es, &b, BasisLabel::Remote(Side::Alpha))
        .unwrap()
        .into_iter()
        .map(|x| qtel_core::Complex64::new(x, 0.0))
        .collect();
    let mut worst_norm = 0.0f64;
    let mut worst_trace = 0.0f64;
    for i in 0..T_STEPS {
        let t = T_MAX * i as f64 / (T_STEPS as f64 - 1.0);
        let wp = evolve(&es, &c0, t, p.hbar).unwrap();
        worst_norm = worst_norm.max((1.0 - wp.norm_sqr()).abs());
        let occ_a = side_occupation(&wp, &b, Side::Alpha, true);
        let occ_b = side_occupation(&wp, &b, Side::Beta, true);
        worst_trace = worst_trace.max((occ_a + occ_b - 1.0).abs());
    }
    let pass = worst_norm <= 1e-10 && worst_trace <= 1e-9;
    println!(
        "criterion 2: {} -- worst |1-norm| {worst_norm:e}, worst |occ_a+occ_b-1| {worst_trace:e}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(worst_norm <= 1e-10);
    assert!(worst_trace <= 1e-9);
}

#[test]
fn criterion_03_regime_reproduction() {
    // example 1: SlowRabi, dominant period > 10x the W=0 Rabi period, with
    // superposed jump events (detected at thresholds adapted to the series'
    // own range; the criterion pins no thresholds for this clause)
    let p1 = example(1);
    assert_eq!(classify_regime(p1.v, p1.dv).unwrap(), Regime::SlowRabi);
    let ts1 = series(1);
    let period = dominant_period(&ts1.times, &ts1.occ_alpha).unwrap();
    let rabi1 = w0_rabi_period(&p1);
    let (lo1, hi1) = adaptive_thresholds(&ts1.occ_alpha);
    let jumps = detect_switches(ts1, lo1, hi1).unwrap();
    let ex1_pass = period > 10.0 * rabi1 && !jumps.events.is_empty();
    println!(
        "criterion 3 (example 1): {} -- dominant period {period:.0} s vs 10x Rabi {:.1} s, {} jump events at {lo1:.3}/{hi1:.3}",
        if ex1_pass { "PASS" } else { "FAIL" },
        10.0 * rabi1,
        jumps.events.len()
    );

    // example 2: Telegraph, >= 2 full switches at the default hysteresis,
    // plateaus above 0.8 / below 0.2 for >= 60% of samples
    let p2 = example(2);
    assert_eq!(classify_regime(p2.v, p2.dv).unwrap(), Regime::Telegraph);
    let ts2 = series(2);
    let ev2 = detect_switches(ts2, DEFAULT_LO, DEFAULT_HI).unwrap();
    let plateau_frac = ts2
        .occ_alpha
        .iter()
        .filter(|&&x| x > 0.8 || x < 0.2)
        .count() as f64
        / ts2.len() as f64;
    let ex2_pass = ev2.events.len() >= 2 && plateau_frac >= 0.6;
    println!(
        "criterion 3 (example 2): {} -- {} switches at {DEFAULT_LO}/{DEFAULT_HI}, plateau fraction {plateau_frac:.3} (need >= 2 and >= 0.6)",
        if ex2_pass { "PASS" } else { "FAIL" },
        ev2.events.len()
    );

    // example 3: Bonding, occupancy within [0.25, 0.75] for >= 90% of
    // samples, zero full switches at the default hysteresis
    let p3 = example(3);
    assert_eq!(classify_regime(p3.v, p3.dv).unwrap(), Regime::Bonding);
    let ts3 = series(3);
    let ev3 = detect_switches(ts3, DEFAULT_LO, DEFAULT_HI).unwrap();
    let mid_frac = ts3
        .occ_alpha
        .iter()
        .filter(|&&x| (0.25..=0.75).contains(&x))
        .count() as f64
        / ts3.len() as f64;
    let ex3_pass = mid_frac >= 0.9 && ev3.events.is_empty();
    println!(
        "criterion 3 (example 3): {} -- mid-range fraction {mid_frac:.3} (need >= 0.9), {} switches (need 0)",
        if ex3_pass { "PASS" } else { "FAIL" },
        ev3.events.len()
    );

    assert!(
        ex1_pass,
        "example 1: period {period} vs {rabi1}, {} jumps",
        jumps.events.len()
    );
    assert!(
        ex2_pass,
        "example 2: {} switches at 0.3/0.7 with plateau fraction {plateau_frac:.3}; \
         the exact dynamics at these parameters plateau near 0.65/0.35 (swing bounded by \
         inter-sector decoherence), so occ > 0.8 / < 0.2 for 60% of samples is not \
         attainable for any (W, dV) in this model",
        ev2.events.len()
    );
    assert!(
        ex3_pass,
        "example 3: mid fraction {mid_frac:.3}, {} switches; the revival spikes at \
         multiples of 2 pi hbar / d_eps cross the 0.3/0.7 band, so zero events is not \
         attainable at the stated thresholds",
        ev3.events.len()
    );
}

#[test]
fn criterion_04_telegraph_time_scale() {
    let p = example(2);
    let ts = series(2);
    let t_ref = 2.0 * std::f64::consts::PI * p.hbar / p.d_eps;
    let window = (0.3 * t_ref, 3.0 * t_ref);

    // the library-default thresholds cannot measure a dwell on this signal;
    // report them, then measure with the range-adapted hysteresis
    let default_ev = detect_switches(ts, DEFAULT_LO, DEFAULT_HI).unwrap();
    let (lo, hi) = adaptive_thresholds(&ts.occ_alpha);
    let ev = detect_switches(ts, lo, hi).unwrap();
    let stats = dwell_statistics(&ev).unwrap_or_else(|e| {
        panic!(
            "criterion 4: adaptive detector ({lo:.3}/{hi:.3}) found {} events: {e}",
            ev.events.len()
        )
    });
    let pass = stats.mean >= window.0 && stats.mean <= window.1;
    println!(
        "criterion 4: {} -- mean dwell {:.0} s over {} dwells at {lo:.3}/{hi:.3} \
         (window [{:.0}, {:.0}] s; default 0.3/0.7 detector saw {} events)",
        if pass { "PASS" } else { "FAIL" },
        stats.mean,
        stats.count,
        window.0,
        window.1,
        default_ev.events.len()
    );
    assert!(
        pass,
        "mean dwell {} outside [{}, {}]",
        stats.mean, window.0, window.1
    );
}

#[test]
fn invariant_switching_slowdown() {
    // environment coupling slows the side switching well past the bare Rabi
    // half period
    let p = example(2);
    let ts = series(2);
    let (lo, hi) = adaptive_thresholds(&ts.occ_alpha);
    let stats = dwell_statistics(&detect_switches(ts, lo, hi).unwrap()).unwrap();
    let half_rabi = w0_rabi_period(&p) / 2.0;
    println!(
        "slowdown invariant: mean dwell {:.0} s vs bare half period {:.3} s ({}x)",
        stats.mean,
        half_rabi,
        (stats.mean / half_rabi) as u64
    );
    assert!(stats.mean > 10.0 * half_rabi);
}

#[test]
fn criterion_05_degenerate_continuum_oracle() {
    let mut p = example(2);
    p.degenerate_continuum = true;
    let b = BasisMap::for_params(&p);
    let h = build_hamiltonian(&p, &b).unwrap();
    let t = build_transform(&b);
    let (_, hm) = extract_blocks(&transform_hamiltonian(&h, &t).unwrap(), &t).unwrap();
    let es = diagonalize(&hm).unwrap();
    let red = degenerate_reduction(&p).unwrap();

    let ev = es.eigenvalues();
    let e3_err = (ev[0] - red.e3).abs();
    let e2_err = (ev[p.n + 1] - red.e2).abs();
    // the closed form pins E1 = 0 plus N-1 decoupled levels at zero: N zero
    // eigenvalues in total for the (N+2)-dimensional block
    let max_zero = ev[1..=p.n].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let approx_rel = ((red.e3_approx - red.e3) / red.e3).abs();
    let pass = e3_err <= 1e-10 && e2_err <= 1e-10 && max_zero <= 1e-10 && approx_rel <= 0.005;
    println!(
        "criterion 5: {} -- |E3 err| {e3_err:e}, |E2 err| {e2_err:e}, max |zero| {max_zero:e}, \
         estimate vs exact {approx_rel:.4}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(e3_err <= 1e-10 && e2_err <= 1e-10);
    assert!(max_zero <= 1e-10);
    assert!(approx_rel <= 0.005);
}

#[test]
fn criterion_06_perturbative_cross_validation() {
    let p = example(2);
    let rep = validate_against_exact(&p, &blocks(2).minus).unwrap();
    let ratio = rep.regression_scale / rep.predicted_scale;
    let pass = (rep.slope + 1.0).abs() <= 0.15 && (1.0 / 3.0..=3.0).contains(&ratio);
    println!(
        "criterion 6: {} -- slope {:.4} (need -1 ± 0.15), prefactor ratio {:.3} (need within 3x) \
         over {} states",
        if pass { "PASS" } else { "FAIL" },
        rep.slope,
        ratio,
        rep.n_points
    );
    assert!((rep.slope + 1.0).abs() <= 0.15, "slope {}", rep.slope);
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn criterion_07_spectral_sum_rule_and_widths() {
    let mut widths = Vec::new();
    for k in 1..=3 {
        let p = example(k);
        let sd = distribution(k);
        let total = sd.total_weight();
        assert!(
            (total - 1.0).abs() <= 1e-10,
            "example {k}: weights sum to {total}"
        );
        let fit = fit_lorentzian(&sd, Branch::Minus, &p).unwrap();
        if k == 2 {
            let centered = fit.center.abs() <= 2.0 * p.d_eps;
            println!(
                "criterion 7 (example 2 center): {} -- {:.3} level spacings off shell",
                if centered { "PASS" } else { "FAIL" },
                fit.center / p.d_eps
            );
            assert!(centered, "center {} vs 2 d_eps", fit.center);
        }
        widths.push(fit.half_width);
    }
    let ordered = widths[0] > widths[1] && widths[1] > widths[2];
    println!(
        "criterion 7 (widths): {} -- {:.3e} > {:.3e} > {:.3e} peV; sum rule PASS for all three",
        if ordered { "PASS" } else { "FAIL" },
        widths[0],
        widths[1],
        widths[2]
    );
    assert!(ordered, "widths not strictly decreasing: {widths:?}");
}

#[test]
fn criterion_08_order_of_magnitude_claims() {
    let p = example(2);
    let el = onshell_matrix_elements(&p, 1.0).unwrap();
    let overlap_ok = (el.overlap_scale - 5e-2).abs() <= 0.2 * 5e-2;
    println!(
        "criterion 8 (overlap scale): {} -- {:.4e} vs 5e-2 ± 20%",
        if overlap_ok { "PASS" } else { "FAIL" },
        el.overlap_scale
    );
    let ratio = el.g_elem.abs();
    let ratio_ok = (ratio - 1e-2).abs() <= 0.2 * 1e-2;
    println!(
        "criterion 8 (coupling ratio): {} -- closed form dV/sqrt(N(N-1)W²+N dV²) = {:.4e} vs 1e-2 ± 20%",
        if ratio_ok { "PASS" } else { "FAIL" },
        ratio
    );
    assert!(overlap_ok, "overlap scale {}", el.overlap_scale);
    assert!(
        ratio_ok,
        "coupling ratio {ratio:.4e} lies outside [8e-3, 1.2e-2]; the closed form at \
         W = 0.00707, dV = 0.018, N = 398 gives 6.353e-3 exactly (verified symbolically \
         and against explicit construction), so this window is not attainable"
    );
}

#[test]
fn criterion_09_square_wave_reference() {
    // 200-term partial sum within 0.02 of ±pi/4 away from discontinuities
    // (0.1 rad margin; the plateau ripple still exceeds 0.02 at 0.05 rad)
    let target = std::f64::consts::FRAC_PI_4;
    let margin = 0.1;
    let steps = 20000;
    let mut max_dev = 0.0f64;
    for half in 0..2 {
        let offset = half as f64 * std::f64::consts::PI;
        let sign = if half == 0 { 1.0 } else { -1.0 };
        for i in 0..=steps {
            let x =
                offset + margin + (std::f64::consts::PI - 2.0 * margin) * i as f64 / steps as f64;
            max_dev = max_dev.max((square_wave_partial_sum(x, 200) - sign * target).abs());
        }
    }
    let sum_ok = max_dev <= 0.02;
    println!(
        "criterion 9 (plateau): {} -- max deviation {max_dev:.4} at 0.1 rad margin",
        if sum_ok { "PASS" } else { "FAIL" }
    );

    // through the detector: dwells equal the half period within one sample
    let period = 2.0 * std::f64::consts::PI;
    let n = 4000;
    let dt = 4.0 * period / n as f64;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
    let vals: Vec<f64> = times
        .iter()
        .map(|&t| (square_wave_partial_sum(t % period, 200) / target + 1.0) / 2.0)
        .collect();
    let ev = qtel_core::telegraph::detect_switches_on(&times, &vals, 0.3, 0.7).unwrap();
    let worst = ev
        .dwells
        .iter()
        .map(|d| (d - period / 2.0).abs())
        .fold(0.0f64, f64::max);
    let dwell_ok = !ev.dwells.is_empty() && worst <= dt;
    println!(
        "criterion 9 (detector): {} -- {} dwells, worst offset {worst:.4} vs step {dt:.4}",
        if dwell_ok { "PASS" } else { "FAIL" },
        ev.dwells.len()
    );
    assert!(sum_ok, "max deviation {max_dev}");
    assert!(dwell_ok, "worst dwell offset {worst} vs {dt}");
}

#[test]
fn criterion_10_byte_identical_runs() {
    let bin = env!("CARGO_BIN_EXE_qtel");
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.cfg");
    std::fs::write(&config_path, "N = 120\nt_max = 2000\nt_steps = 600\n").unwrap();

    let run = |out: &Path| {
        let status = std::process::Command::new(bin)
            .args(["simulate", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run(&out_a);
    run(&out_b);

    for name in ["timeseries.csv", "events.csv", "report.txt"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    println!("criterion 10: PASS -- simulate outputs byte-identical across runs");
}
