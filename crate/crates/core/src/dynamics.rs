//! Unitary time evolution by spectral synthesis and side-occupation
//! observables on a uniform time grid.
//!
//! Evolution applies phases `exp(-i E_I t / hbar)` to the eigenbasis
//! coefficients and transforms back, so arbitrarily long times cost one
//! matrix-vector product each and carry no integrator drift.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::model::{build_hamiltonian, BasisLabel, BasisMap, ModelParams, Side};
use crate::spectrum::{diagonalize, project_initial, EigenSystem};
use crate::{Error, Result};

/// Complex amplitude vector over the input basis at one instant.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub t: f64,
    amplitudes: Vec<Complex64>,
}

impl WavePacket {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Diagonal of the density operator in the input basis.
    pub fn density_diagonal(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Full density matrix |psi><psi|. O(dim²) memory; intended for small
    /// systems and debugging.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let d = self.amplitudes.len();
        DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Sampled side occupations on a uniform time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub occ_alpha: Vec<f64>,
    pub occ_beta: Vec<f64>,
    pub include_environment: bool,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evolves eigenbasis coefficients `c0` to time `t` (seconds), returning the
/// amplitudes in the input basis. `t` may be negative; NaN anywhere is
/// rejected.
pub fn evolve(es: &EigenSystem, c0: &[Complex64], t: f64, hbar: f64) -> Result<WavePacket> {
    if c0.len() != es.dim() {
        return Err(Error::DimensionMismatch {
            context: "evolve",
            expected: es.dim(),
            got: c0.len(),
        });
    }
    if !t.is_finite() || !hbar.is_finite() || hbar <= 0.0 {
        return Err(Error::Domain(format!("evolve: bad t={t} or hbar={hbar}")));
    }
    if c0.iter().any(|c| c.re.is_nan() || c.im.is_nan()) {
        return Err(Error::Domain("evolve: NaN in coefficients".into()));
    }
    let dim = es.dim();
    let mut re = DVector::<f64>::zeros(dim);
    let mut im = DVector::<f64>::zeros(dim);
    for i in 0..dim {
        let phase = -es.eigenvalues()[i] * t / hbar;
        let (s, c) = phase.sin_cos();
        let rotated = c0[i] * Complex64::new(c, s);
        re[i] = rotated.re;
        im[i] = rotated.im;
    }
    // the eigenvector matrix is real, so one product per real part
    let amp_re = es.eigenvectors() * re;
    let amp_im = es.eigenvectors() * im;
    let amplitudes = (0..dim)
        .map(|k| Complex64::new(amp_re[k], amp_im[k]))
        .collect();
    Ok(WavePacket { t, amplitudes })
}

/// Projects a wave packet back onto the eigenbasis, `c_I = <I|psi>`.
pub fn project_wavepacket(es: &EigenSystem, wp: &WavePacket) -> Result<Vec<Complex64>> {
    if wp.amplitudes.len() != es.dim() {
        return Err(Error::DimensionMismatch {
            context: "project_wavepacket",
            expected: es.dim(),
            got: wp.amplitudes.len(),
        });
    }
    let dim = es.dim();
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            acc += es.component(k, i) * wp.amplitudes[k];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Probability of finding the particle on one side: remote + gateway
/// occupation, plus the side's continuum levels when `include_environment`.
pub fn side_occupation(
    wp: &WavePacket,
    b: &BasisMap,
    side: Side,
    include_environment: bool,
) -> f64 {
    b.side_indices(side, include_environment)
        .iter()
        .map(|&i| wp.amplitudes[i].norm_sqr())
        .sum()
}

/// Builds the Hamiltonian, diagonalizes it, starts the particle in the
/// alpha-side remote state and samples both side occupations on `t_steps`
/// uniform points spanning `[0, t_max]`.
pub fn run_time_series(
    p: &ModelParams,
    t_max: f64,
    t_steps: usize,
    include_environment: bool,
) -> Result<TimeSeries> {
    if t_steps < 2 {
        return Err(Error::Domain(format!(
            "t_steps must be at least 2, got {t_steps}"
        )));
    }
    if t_max <= 0.0 || !t_max.is_finite() {
        return Err(Error::Domain(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    let b = BasisMap::for_params(p);
    let h = build_hamiltonian(p, &b)?;
    let es = diagonalize(&h)?;
    let c0: Vec<Complex64> = project_initial(&es, &b, BasisLabel::Remote(Side::Alpha))?
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();

    let mut times = Vec::with_capacity(t_steps);
    let mut occ_alpha = Vec::with_capacity(t_steps);
    let mut occ_beta = Vec::with_capacity(t_steps);
    let step = t_max / (t_steps as f64 - 1.0);
    for i in 0..t_steps {
        let t = step * i as f64;
        let wp = evolve(&es, &c0, t, p.hbar)?;
        times.push(t);
        occ_alpha.push(side_occupation(&wp, &b, Side::Alpha, include_environment));
        occ_beta.push(side_occupation(&wp, &b, Side::Beta, include_environment));
    }
    Ok(TimeSeries {
        times,
        occ_alpha,
        occ_beta,
        include_environment,
    })
}
