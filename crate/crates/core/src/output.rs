//! CSV and `key = value` report rendering.
//!
//! Floats are written with the shortest representation that round-trips, so
//! files carry full double precision, are locale-independent and byte-stable
//! across runs.

use crate::dynamics::TimeSeries;
use crate::model::ModelParams;
use crate::scattering::ScatteringReport;
use crate::spectral::{LorentzianFit, SpectralDistribution};
use crate::spectrum::EigenSystem;
use crate::telegraph::{DwellStats, Regime, SwitchEvents};

/// `t_seconds,occ_alpha,occ_beta`, one row per sample.
pub fn timeseries_csv(ts: &TimeSeries) -> String {
    let mut out = String::from("t_seconds,occ_alpha,occ_beta\n");
    for i in 0..ts.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            ts.times[i], ts.occ_alpha[i], ts.occ_beta[i]
        ));
    }
    out
}

/// `t_seconds,direction,dwell_seconds`; the first event has no preceding
/// switch, so its dwell field is empty.
pub fn events_csv(ev: &SwitchEvents) -> String {
    let mut out = String::from("t_seconds,direction,dwell_seconds\n");
    for (i, e) in ev.events.iter().enumerate() {
        let dwell = if i == 0 {
            String::new()
        } else {
            format!("{}", ev.dwells[i - 1])
        };
        out.push_str(&format!("{},{},{}\n", e.t_cross, e.direction.name(), dwell));
    }
    out
}

/// `E_peV,weight,branch`, one row per eigenstate.
pub fn spectrum_csv(sd: &SpectralDistribution) -> String {
    let mut out = String::from("E_peV,weight,branch\n");
    for e in &sd.entries {
        out.push_str(&format!("{},{},{}\n", e.energy, e.weight, e.branch.name()));
    }
    out
}

/// `index,E_peV,weight_g_alpha`, one row per eigenstate of the full system.
pub fn eigen_csv(es: &EigenSystem, g_alpha_weights: &[f64]) -> String {
    let mut out = String::from("index,E_peV,weight_g_alpha\n");
    for (i, (e, w)) in es.eigenvalues().iter().zip(g_alpha_weights).enumerate() {
        out.push_str(&format!("{i},{e},{w}\n"));
    }
    out
}

/// Dense matrix block as plain CSV (no header).
pub fn matrix_csv(m: &nalgebra::DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

fn params_lines(p: &ModelParams, out: &mut String) {
    out.push_str(&format!("E_g = {}\n", p.e_g));
    out.push_str(&format!("E_w = {}\n", p.e_w));
    out.push_str(&format!("V = {}\n", p.v));
    out.push_str(&format!("dV = {}\n", p.dv));
    out.push_str(&format!("W = {}\n", p.w));
    out.push_str(&format!("d_eps = {}\n", p.d_eps));
    out.push_str(&format!("N = {}\n", p.n));
    out.push_str(&format!("band_center = {}\n", p.band_center));
    out.push_str(&format!("hbar = {}\n", p.hbar));
}

/// Simulation summary: regime, detector settings, switch and dwell figures.
/// The adaptive block repeats the detection with thresholds scaled to the
/// series' own range, which still resolves switching when the plateaus do
/// not span the full [0, 1] interval.
pub fn simulate_report(
    p: &ModelParams,
    regime: Regime,
    ev: &SwitchEvents,
    stats: Option<&DwellStats>,
    adaptive: Option<(&SwitchEvents, Option<&DwellStats>)>,
) -> String {
    let mut out = String::new();
    params_lines(p, &mut out);
    out.push_str(&format!("regime = {regime}\n"));
    out.push_str(&format!("threshold_lo = {}\n", ev.lo));
    out.push_str(&format!("threshold_hi = {}\n", ev.hi));
    out.push_str(&format!("switch_count = {}\n", ev.events.len()));
    match stats {
        Some(s) => {
            out.push_str(&format!("mean_dwell_s = {}\n", s.mean));
            out.push_str(&format!("dwell_stddev_s = {}\n", s.stddev));
            out.push_str(&format!("dwell_count = {}\n", s.count));
        }
        None => out.push_str("mean_dwell_s = nan\n"),
    }
    if let Some((aev, astats)) = adaptive {
        out.push_str(&format!("adaptive_lo = {}\n", aev.lo));
        out.push_str(&format!("adaptive_hi = {}\n", aev.hi));
        out.push_str(&format!("adaptive_switch_count = {}\n", aev.events.len()));
        match astats {
            Some(s) => out.push_str(&format!("adaptive_mean_dwell_s = {}\n", s.mean)),
            None => out.push_str("adaptive_mean_dwell_s = nan\n"),
        }
    }
    out
}

/// Lorentzian fit report for one branch, plus regime context.
pub fn lorentzian_report(
    p: &ModelParams,
    regime: Regime,
    branch: &str,
    fit: &LorentzianFit,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("regime = {regime}\n"));
    out.push_str(&format!("branch = {branch}\n"));
    out.push_str(&format!("center_peV = {}\n", fit.center));
    out.push_str(&format!("half_width_peV = {}\n", fit.half_width));
    out.push_str(&format!(
        "half_width_over_d_eps = {}\n",
        fit.half_width / p.d_eps
    ));
    out.push_str(&format!("amplitude = {}\n", fit.amplitude));
    out.push_str(&format!("rms_residual = {}\n", fit.rms_residual));
    out.push_str(&format!("n_points = {}\n", fit.n_points));
    out.push_str(&format!("iterations = {}\n", fit.iterations));
    out
}

/// Closed-form-vs-exact comparison report.
pub fn verify_report(p: &ModelParams, rep: &ScatteringReport) -> String {
    let mut out = String::new();
    params_lines(p, &mut out);
    out.push_str(&format!("n_near_shell = {}\n", rep.n_points));
    out.push_str(&format!("loglog_slope = {}\n", rep.slope));
    out.push_str(&format!("regression_scale = {}\n", rep.regression_scale));
    out.push_str(&format!("median_scale = {}\n", rep.median_scale));
    out.push_str(&format!("predicted_scale = {}\n", rep.predicted_scale));
    out.push_str(&format!(
        "regression_over_predicted = {}\n",
        rep.regression_scale / rep.predicted_scale
    ));
    out.push_str(&format!(
        "median_over_predicted = {}\n",
        rep.median_scale / rep.predicted_scale
    ));
    out
}

/// `E_kappa_peV,exact_overlap,predicted_overlap` rows of the comparison.
pub fn verify_csv(rep: &ScatteringReport) -> String {
    let mut out = String::from("E_kappa_peV,exact_overlap,predicted_overlap\n");
    for &(e, exact, predicted) in &rep.rows {
        out.push_str(&format!("{},{},{}\n", e, exact, predicted));
    }
    out
}
