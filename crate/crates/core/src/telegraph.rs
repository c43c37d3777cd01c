//! Regime classification, switch detection with hysteresis, dwell statistics
//! and the square-wave Fourier reference.

use crate::dynamics::TimeSeries;
use crate::{Error, Result};

/// Default hysteresis thresholds for switch detection.
pub const DEFAULT_LO: f64 = 0.3;
pub const DEFAULT_HI: f64 = 0.7;

/// Dynamical regime as a function of the coupling asymmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SlowRabi,
    FasterRabi,
    Telegraph,
    Bonding,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SlowRabi => "SlowRabi",
            Regime::FasterRabi => "FasterRabi",
            Regime::Telegraph => "Telegraph",
            Regime::Bonding => "Bonding",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies `(V, dV)` by interval membership: `[5V/6, V] -> SlowRabi`,
/// `[V/2, 5V/6) -> FasterRabi`, `[V/6, V/2) -> Telegraph`,
/// `[0, V/6) -> Bonding`. Boundary values belong to the regime with larger
/// `dV`; a relative guard of 1e-12 keeps values sitting on a boundary up to
/// rounding on that side.
pub fn classify_regime(v: f64, dv: f64) -> Result<Regime> {
    if v <= 0.0 || !v.is_finite() {
        return Err(Error::Domain(format!("V must be positive, got {v}")));
    }
    if !(0.0..=v).contains(&dv) {
        return Err(Error::Domain(format!("dV = {dv} outside [0, V = {v}]")));
    }
    let r = dv / v;
    const GUARD: f64 = 1e-12;
    Ok(if r >= 5.0 / 6.0 - GUARD {
        Regime::SlowRabi
    } else if r >= 0.5 - GUARD {
        Regime::FasterRabi
    } else if r >= 1.0 / 6.0 - GUARD {
        Regime::Telegraph
    } else {
        Regime::Bonding
    })
}

/// Direction of a detected side switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AlphaToBeta,
    BetaToAlpha,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::AlphaToBeta => "alpha->beta",
            Direction::BetaToAlpha => "beta->alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    pub t_cross: f64,
    pub direction: Direction,
}

/// Detected switches and the dwell times between them.
#[derive(Debug, Clone)]
pub struct SwitchEvents {
    pub events: Vec<SwitchEvent>,
    pub dwells: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Hysteresis switch detector on an occupation series.
///
/// A switch is recorded when the value crosses from at or above `hi` to at
/// or below `lo` (alpha to beta) or the reverse; excursions that stay inside
/// the band are failed attempts and do not register. The initial armed state
/// comes from the first sample outside the band.
pub fn detect_switches_on(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Result<SwitchEvents> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            context: "detect_switches",
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(
            "switch detection needs at least 2 samples".into(),
        ));
    }
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::Domain(format!(
            "thresholds must satisfy 0 < lo < hi < 1, got lo={lo} hi={hi}"
        )));
    }
    let mut state: Option<bool> = None; // true = high side
    let mut events = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match state {
            None => {
                if x >= hi {
                    state = Some(true);
                } else if x <= lo {
                    state = Some(false);
                }
            }
            Some(true) => {
                if x <= lo {
                    events.push(SwitchEvent {
                        t_cross: times[i],
                        direction: Direction::AlphaToBeta,
                    });
                    state = Some(false);
                }
            }
            Some(false) => {
                if x >= hi {
                    events.push(SwitchEvent {
                        t_cross: times[i],
                        direction: Direction::BetaToAlpha,
                    });
                    state = Some(true);
                }
            }
        }
    }
    let dwells = events
        .windows(2)
        .map(|w| w[1].t_cross - w[0].t_cross)
        .collect();
    Ok(SwitchEvents {
        events,
        dwells,
        lo,
        hi,
    })
}

/// Convenience wrapper over a [`TimeSeries`], detecting on `occ_alpha`.
pub fn detect_switches(ts: &TimeSeries, lo: f64, hi: f64) -> Result<SwitchEvents> {
    detect_switches_on(&ts.times, &ts.occ_alpha, lo, hi)
}

/// Mean, standard deviation (population) and count of dwell times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellStats {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

pub fn dwell_statistics(ev: &SwitchEvents) -> Result<DwellStats> {
    if ev.dwells.is_empty() {
        return Err(Error::InsufficientData(
            "no dwell intervals (fewer than 2 switches)".into(),
        ));
    }
    let n = ev.dwells.len() as f64;
    let mean = ev.dwells.iter().sum::<f64>() / n;
    let var = ev
        .dwells
        .iter()
        .map(|d| (d - mean) * (d - mean))
        .sum::<f64>()
        / n;
    Ok(DwellStats {
        mean,
        stddev: var.sqrt(),
        count: ev.dwells.len(),
    })
}

/// Partial sum of the odd-harmonic square-wave series,
/// `sum_{k=1..n} sin((2k-1)x)/(2k-1)`.
pub fn square_wave_partial_sum(x: f64, n_terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in 1..=n_terms {
        let m = (2 * k - 1) as f64;
        acc += (m * x).sin() / m;
    }
    acc
}

/// Linear-interpolated quantile of a sample (matching the common "linear"
/// convention). `p` in [0, 1]; the input need not be sorted.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&p));
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (h - lo as f64)
}

/// Hysteresis thresholds adapted to a series' own dynamic range: the 30% and
/// 70% points of its 5-95% quantile span. For signals whose plateaus do not
/// span [0, 1] this still brackets the switching structure.
pub fn adaptive_thresholds(values: &[f64]) -> (f64, f64) {
    let q05 = quantile(values, 0.05);
    let q95 = quantile(values, 0.95);
    let span = q95 - q05;
    (q05 + 0.3 * span, q05 + 0.7 * span)
}

/// Period of the strongest Fourier component of `values - mean` on a uniform
/// grid (plain O(n²) scan over the discrete frequencies).
pub fn dominant_period(times: &[f64], values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 4 || times.len() != n {
        return None;
    }
    let dt = times[1] - times[0];
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut best_k = 0usize;
    let mut best_mag = 0.0f64;
    for k in 1..=n / 2 {
        let w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (j, &x) in values.iter().enumerate() {
            let phi = w * j as f64;
            let y = x - mean;
            re += y * phi.cos();
            im -= y * phi.sin();
        }
        let mag = re * re + im * im;
        if mag > best_mag {
            best_mag = mag;
            best_k = k;
        }
    }
    if best_k == 0 {
        None
    } else {
        Some(n as f64 * dt / best_k as f64)
    }
}
