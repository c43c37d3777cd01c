//! wasm-bindgen surface for the browser demo.
//!
//! Each entry point takes the same `key = value` config text the CLI reads
//! and returns a JSON string for the page to plot. Errors become JS
//! exceptions carrying the parser/solver message.

use wasm_bindgen::prelude::*;

use qtel_core::config::parse_config;
use qtel_core::dynamics::run_time_series;
use qtel_core::model::{build_hamiltonian, BasisMap};
use qtel_core::spectral::{fit_lorentzian, spectral_distribution_from_blocks, Branch};
use qtel_core::spectrum::diagonalize;
use qtel_core::symmetry::{build_transform, extract_blocks, transform_hamiltonian};
use qtel_core::telegraph::{
    adaptive_thresholds, classify_regime, detect_switches, dwell_statistics, DEFAULT_HI, DEFAULT_LO,
};

#[derive(serde::Serialize)]
struct SeriesOut {
    regime: String,
    times: Vec<f64>,
    occ_alpha: Vec<f64>,
    /// Switches from the range-adapted detector (falls back to 0.3/0.7 when
    /// the series is too flat to adapt to).
    events: Vec<(f64, String)>,
    mean_dwell: Option<f64>,
    lo: f64,
    hi: f64,
}

#[derive(serde::Serialize)]
struct SpectrumOut {
    regime: String,
    energies: Vec<f64>,
    weights: Vec<f64>,
    branches: Vec<String>,
    fit: Option<FitOut>,
}

#[derive(serde::Serialize)]
struct FitOut {
    center: f64,
    half_width: f64,
    amplitude: f64,
}

#[derive(serde::Serialize)]
struct SweepOut {
    dv: Vec<f64>,
    regime: Vec<String>,
    fit_half_width: Vec<f64>,
}

fn err_to_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&format!("{e}"))
}

/// Side-alpha occupation over time, with detected switches.
#[wasm_bindgen]
pub fn time_series_json(config_text: &str) -> Result<String, JsValue> {
    let cfg = parse_config(config_text).map_err(err_to_js)?;
    let ts = run_time_series(&cfg.params, cfg.t_max, cfg.t_steps, true).map_err(err_to_js)?;
    let regime = classify_regime(cfg.params.v, cfg.params.dv).map_err(err_to_js)?;
    let (alo, ahi) = adaptive_thresholds(&ts.occ_alpha);
    let ev = detect_switches(&ts, alo, ahi)
        .or_else(|_| detect_switches(&ts, DEFAULT_LO, DEFAULT_HI))
        .map_err(err_to_js)?;
    let mean_dwell = dwell_statistics(&ev).ok().map(|s| s.mean);
    let out = SeriesOut {
        regime: regime.name().to_string(),
        times: ts.times.clone(),
        occ_alpha: ts.occ_alpha.clone(),
        events: ev
            .events
            .iter()
            .map(|e| (e.t_cross, e.direction.name().to_string()))
            .collect(),
        mean_dwell,
        lo: ev.lo,
        hi: ev.hi,
    };
    serde_json::to_string(&out).map_err(err_to_js)
}

/// Eigenstate-resolved weights of the initial state, with the antisymmetric
/// branch resonance fit.
#[wasm_bindgen]
pub fn spectrum_json(config_text: &str) -> Result<String, JsValue> {
    let cfg = parse_config(config_text).map_err(err_to_js)?;
    let p = &cfg.params;
    let regime = classify_regime(p.v, p.dv).map_err(err_to_js)?;
    let b = BasisMap::for_params(p);
    let h = build_hamiltonian(p, &b).map_err(err_to_js)?;
    let t = build_transform(&b);
    let ht = transform_hamiltonian(&h, &t).map_err(err_to_js)?;
    let (hp, hm) = extract_blocks(&ht, &t).map_err(err_to_js)?;
    let sd = spectral_distribution_from_blocks(
        &diagonalize(&hp).map_err(err_to_js)?,
        &diagonalize(&hm).map_err(err_to_js)?,
    )
    .map_err(err_to_js)?;
    let fit = fit_lorentzian(&sd, Branch::Minus, p).ok().map(|f| FitOut {
        center: f.center,
        half_width: f.half_width,
        amplitude: f.amplitude,
    });
    let out = SpectrumOut {
        regime: regime.name().to_string(),
        energies: sd.entries.iter().map(|e| e.energy).collect(),
        weights: sd.entries.iter().map(|e| e.weight).collect(),
        branches: sd
            .entries
            .iter()
            .map(|e| e.branch.name().to_string())
            .collect(),
        fit,
    };
    serde_json::to_string(&out).map_err(err_to_js)
}

/// Regime and minus-branch resonance width across a range of asymmetries.
#[wasm_bindgen]
pub fn regime_sweep_json(config_text: &str, dv_csv: &str) -> Result<String, JsValue> {
    let cfg = parse_config(config_text).map_err(err_to_js)?;
    let dvs: Vec<f64> = dv_csv
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| err_to_js(format!("bad dV list: {dv_csv}")))?;
    let mut out = SweepOut {
        dv: Vec::new(),
        regime: Vec::new(),
        fit_half_width: Vec::new(),
    };
    for dv in dvs {
        let mut p = cfg.params.clone();
        p.dv = dv;
        let regime = classify_regime(p.v, p.dv).map_err(err_to_js)?;
        let b = BasisMap::for_params(&p);
        let h = build_hamiltonian(&p, &b).map_err(err_to_js)?;
        let t = build_transform(&b);
        let ht = transform_hamiltonian(&h, &t).map_err(err_to_js)?;
        let (hp, hm) = extract_blocks(&ht, &t).map_err(err_to_js)?;
        let sd = spectral_distribution_from_blocks(
            &diagonalize(&hp).map_err(err_to_js)?,
            &diagonalize(&hm).map_err(err_to_js)?,
        )
        .map_err(err_to_js)?;
        let width = fit_lorentzian(&sd, Branch::Minus, &p)
            .map(|f| f.half_width)
            .unwrap_or(f64::NAN);
        out.dv.push(dv);
        out.regime.push(regime.name().to_string());
        out.fit_half_width.push(width);
    }
    serde_json::to_string(&out).map_err(err_to_js)
}
