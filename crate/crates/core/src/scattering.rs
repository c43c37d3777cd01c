//! Closed-form perturbative chain: coupling estimates, on-shell subspace
//! matrix elements, the resummed scattering amplitude, and cross-validation
//! of those forms against exact diagonalization of the antisymmetric block.

use num_complex::Complex64;

use crate::model::ModelParams;
use crate::spectrum::EigenSystem;
use crate::{Error, Result};

/// Near-shell window for the exact-vs-closed-form comparison, in units of the
/// level spacing: eigenstates with `2 d_eps < |E| < 50 d_eps`.
pub const NEAR_SHELL_MIN: f64 = 2.0;
pub const NEAR_SHELL_MAX: f64 = 50.0;

/// Second-order coupling estimates of the remote state to the two transformed
/// continua: `minus = (W/E_w) dV/sqrt(2)`, `plus = (W/E_w)(2V-dV)/sqrt(2)`.
pub fn coupling_estimates(p: &ModelParams) -> Result<(f64, f64)> {
    p.validated()?;
    if p.e_w == 0.0 {
        return Err(Error::Domain(
            "coupling estimates need E_w != 0 (no intermediate detuning)".into(),
        ));
    }
    let base = p.w / p.e_w / std::f64::consts::SQRT_2;
    Ok((base * p.dv, base * (2.0 * p.v - p.dv)))
}

/// On-shell subspace elements for the antisymmetric block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnShellElements {
    /// `<kappa_perp|H|g_perp> = -dV E_kappa / sqrt(N(N-1)W² + N dV²)`.
    pub g_elem: f64,
    /// `<kappa|w_coupled> = W / sqrt(NW² + dV²)`.
    pub overlap_scale: f64,
}

pub fn onshell_matrix_elements(p: &ModelParams, e_kappa: f64) -> Result<OnShellElements> {
    p.validated()?;
    if p.n < 2 {
        return Err(Error::Domain(
            "on-shell subspace needs at least 2 continuum levels".into(),
        ));
    }
    let n = p.n as f64;
    let denom = (n * (n - 1.0) * p.w * p.w + n * p.dv * p.dv).sqrt();
    let s = (n * p.w * p.w + p.dv * p.dv).sqrt();
    Ok(OnShellElements {
        g_elem: -p.dv * e_kappa / denom,
        overlap_scale: p.w / s,
    })
}

/// Residual continuum-continuum element in the on-shell subspace:
/// `[(NW²+dV²)/((N-1)W²+dV²)] (E_k δ - W²(E_k+E_l)/(NW²+dV²))`.
pub fn kappa_kappa_element(
    p: &ModelParams,
    e_kappa: f64,
    e_lambda: f64,
    same_level: bool,
) -> Result<f64> {
    p.validated()?;
    if p.n < 2 {
        return Err(Error::Domain(
            "on-shell subspace needs at least 2 continuum levels".into(),
        ));
    }
    let n = p.n as f64;
    let s2 = n * p.w * p.w + p.dv * p.dv;
    let prefactor = s2 / ((n - 1.0) * p.w * p.w + p.dv * p.dv);
    let kron = if same_level { e_kappa } else { 0.0 };
    Ok(prefactor * (kron - p.w * p.w / s2 * (e_kappa + e_lambda)))
}

/// Resummed scattering amplitude of the remote component on a near-shell
/// continuum eigenstate: `i (d_eps/pi)(dV/W)(1/E_kappa)`.
///
/// Singular at the shell itself; callers must stay off the exact shell point
/// (the discrete spectrum has at most one state within the guard band).
pub fn dyson_amplitude(p: &ModelParams, e_kappa: f64) -> Result<Complex64> {
    p.validated()?;
    if p.w == 0.0 {
        return Err(Error::Domain("dyson amplitude needs W != 0".into()));
    }
    if e_kappa == 0.0 {
        return Err(Error::Domain(
            "dyson amplitude has a pole at the shell energy".into(),
        ));
    }
    if e_kappa.abs() > p.band_half_width() {
        return Err(Error::Domain(format!(
            "E_kappa = {e_kappa} outside the band (half width {})",
            p.band_half_width()
        )));
    }
    let mag = p.d_eps / std::f64::consts::PI * (p.dv / p.w) / e_kappa;
    Ok(Complex64::new(0.0, mag))
}

/// On-shell state density factor: `pi/d_eps` inside the band, zero outside.
pub fn gamma_in_band(p: &ModelParams, e: f64) -> f64 {
    if e.abs() < p.band_half_width() {
        std::f64::consts::PI / p.d_eps
    } else {
        0.0
    }
}

/// Principal-value band integral `ln|(E+a)/(E-a)|`.
pub fn pv_band_integral(e: f64, a: f64) -> f64 {
    ((e + a) / (e - a)).abs().ln()
}

/// Comparison of exact near-shell eigenvector overlaps against the resummed
/// closed form.
#[derive(Debug, Clone)]
pub struct ScatteringReport {
    /// Log-log regression slope of |overlap| vs |E| (closed form: -1).
    pub slope: f64,
    /// exp(intercept) of the regression, i.e. the fitted scale of |E|·|c|.
    pub regression_scale: f64,
    /// Robust scale: median of |E_j|·|c_j| over the window.
    pub median_scale: f64,
    /// Closed-form prediction `(d_eps/pi)(dV/W)`.
    pub predicted_scale: f64,
    pub n_points: usize,
    /// Per-state rows: (E, exact overlap, predicted overlap magnitude).
    pub rows: Vec<(f64, f64, f64)>,
}

/// Compares |<g-|I>| from the exact antisymmetric-block eigensystem against
/// the resummed amplitude over near-shell states. `es_minus` must be the
/// eigensystem of the minus block in its `g, w, kappa` ordering.
pub fn validate_against_exact(p: &ModelParams, es_minus: &EigenSystem) -> Result<ScatteringReport> {
    p.validated()?;
    if es_minus.dim() != p.n + 2 {
        return Err(Error::DimensionMismatch {
            context: "validate_against_exact",
            expected: p.n + 2,
            got: es_minus.dim(),
        });
    }
    let lo = NEAR_SHELL_MIN * p.d_eps;
    let hi = NEAR_SHELL_MAX * p.d_eps;
    let predicted_scale = p.d_eps / std::f64::consts::PI * (p.dv / p.w);

    let mut rows = Vec::new();
    for i in 0..es_minus.dim() {
        let e = es_minus.eigenvalues()[i] - p.e_g;
        if e.abs() > lo && e.abs() < hi {
            let exact = es_minus.component(0, i).abs();
            rows.push((e, exact, predicted_scale / e.abs()));
        }
    }
    if rows.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "only {} near-shell states in ({lo:e}, {hi:e})",
            rows.len()
        )));
    }

    // least squares on (ln|E|, ln|c|)
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let mut scales: Vec<f64> = Vec::with_capacity(rows.len());
    for &(e, c, _) in &rows {
        let (x, y) = (e.abs().ln(), c.max(f64::MIN_POSITIVE).ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        scales.push(e.abs() * c);
    }
    let slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    let intercept = (sy - slope * sx) / n;
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_scale = if scales.len() % 2 == 1 {
        scales[scales.len() / 2]
    } else {
        0.5 * (scales[scales.len() / 2 - 1] + scales[scales.len() / 2])
    };

    Ok(ScatteringReport {
        slope,
        regression_scale: intercept.exp(),
        median_scale,
        predicted_scale,
        n_points: rows.len(),
        rows,
    })
}
