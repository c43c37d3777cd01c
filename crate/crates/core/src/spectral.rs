//! Spectral distribution of the initial state over eigenstates, discrete
//! self-energy evaluation, and Lorentzian resonance fitting.
//!
//! Discrete delta functions are represented as weights; densities are
//! weights per level spacing. No broadening kernels.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::model::ModelParams;
use crate::spectrum::EigenSystem;
use crate::symmetry::SymmetryTransform;
use crate::{Error, Result};

/// Fraction of an eigenvector's norm that must sit in one block for a clean
/// branch classification.
pub const BRANCH_PURITY: f64 = 0.99;
/// Relative weight floor below which entries are excluded from fits.
pub const FIT_WEIGHT_FLOOR: f64 = 1e-6;
/// Half width, in level spacings, of the window used for the local coupling
/// average in the self-energy.
pub const SELF_ENERGY_WINDOW: f64 = 50.0;

/// Which decoupled block an eigenstate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    Mixed,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Mixed => "mixed",
        }
    }
}

/// One eigenstate's contribution to the spectral distribution of the initial
/// alpha-side remote state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEntry {
    pub energy: f64,
    /// `|<I|g_alpha>|²`.
    pub weight: f64,
    pub branch: Branch,
}

/// Eigenstate-resolved weights of the initial state; weights sum to one.
#[derive(Debug, Clone)]
pub struct SpectralDistribution {
    pub entries: Vec<SpectralEntry>,
}

impl SpectralDistribution {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn branch_weight(&self, branch: Branch) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.branch == branch)
            .map(|e| e.weight)
            .sum()
    }
}

/// Builds the distribution from an eigensystem of the *transformed*
/// Hamiltonian, classifying each eigenstate by the block carrying its norm.
///
/// The initial state is `(g+ + g-)/sqrt(2)` in the transformed ordering, so
/// the weight on eigenstate `I` is `(v_I[0] + v_I[1])²/2`.
pub fn spectral_distribution(
    es: &EigenSystem,
    t: &SymmetryTransform,
) -> Result<SpectralDistribution> {
    if es.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            context: "spectral_distribution",
            expected: t.dim(),
            got: es.dim(),
        });
    }
    let mut entries = Vec::with_capacity(es.dim());
    for i in 0..es.dim() {
        let g_plus = es.component(0, i);
        let g_minus = es.component(1, i);
        let amp = (g_plus + g_minus) / std::f64::consts::SQRT_2;
        let plus_norm: f64 = t
            .plus_indices()
            .iter()
            .map(|&k| es.component(k, i).powi(2))
            .sum();
        let minus_norm: f64 = t
            .minus_indices()
            .iter()
            .map(|&k| es.component(k, i).powi(2))
            .sum();
        let total = plus_norm + minus_norm;
        let branch = if plus_norm >= BRANCH_PURITY * total {
            Branch::Plus
        } else if minus_norm >= BRANCH_PURITY * total {
            Branch::Minus
        } else {
            Branch::Mixed
        };
        entries.push(SpectralEntry {
            energy: es.eigenvalues()[i],
            weight: amp * amp,
            branch,
        });
    }
    Ok(SpectralDistribution { entries })
}

/// Builds the distribution from the two block eigensystems (each in `g, w,
/// kappa` ordering). Branch membership is exact by construction; entries are
/// merged in ascending energy.
pub fn spectral_distribution_from_blocks(
    es_plus: &EigenSystem,
    es_minus: &EigenSystem,
) -> Result<SpectralDistribution> {
    if es_plus.dim() != es_minus.dim() {
        return Err(Error::DimensionMismatch {
            context: "spectral_distribution_from_blocks",
            expected: es_plus.dim(),
            got: es_minus.dim(),
        });
    }
    let mut entries: Vec<SpectralEntry> = Vec::with_capacity(2 * es_plus.dim());
    for (es, branch) in [(es_plus, Branch::Plus), (es_minus, Branch::Minus)] {
        for i in 0..es.dim() {
            let g = es.component(0, i);
            entries.push(SpectralEntry {
                energy: es.eigenvalues()[i],
                weight: g * g / 2.0,
                branch,
            });
        }
    }
    entries.sort_by(|a, b| {
        a.energy
            .partial_cmp(&b.energy)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| (a.branch == Branch::Plus).cmp(&(b.branch == Branch::Plus)))
    });
    Ok(SpectralDistribution { entries })
}

/// Per-eigenstate squared couplings `|<I|H|g_alpha>|² = E_I² |<I|g_alpha>|²`,
/// paired with the eigenstate energies.
pub fn couplings_from_distribution(sd: &SpectralDistribution) -> Vec<(f64, f64)> {
    sd.entries
        .iter()
        .map(|e| (e.energy, e.energy * e.energy * e.weight))
        .collect()
}

/// Discrete self-energy at energy `e`.
///
/// Real part: principal-value sum excluding the level nearest to `e`.
/// Imaginary part: `-pi` times the local average of the squared couplings
/// within `SELF_ENERGY_WINDOW` level spacings, divided by the spacing.
/// Returns the complex value and whether `e` lies inside the band (outside,
/// the imaginary part is zero and the flag is false).
pub fn self_energy(p: &ModelParams, couplings: &[(f64, f64)], e: f64) -> Result<(Complex64, bool)> {
    p.validated()?;
    if couplings.is_empty() {
        return Err(Error::InsufficientData("no couplings supplied".into()));
    }
    let in_band = (e - p.band_center).abs() < p.band_half_width();

    let nearest = couplings
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (a.0 - e)
                .abs()
                .partial_cmp(&(b.0 - e).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut re = 0.0;
    for (i, &(ei, c2)) in couplings.iter().enumerate() {
        if i != nearest && ei != e {
            re += c2 / (e - ei);
        }
    }

    let mut im = 0.0;
    if in_band {
        let win = SELF_ENERGY_WINDOW * p.d_eps;
        let mut acc = 0.0;
        let mut count = 0usize;
        for &(ei, c2) in couplings {
            let d = (ei - e).abs();
            if d > 0.0 && d <= win {
                acc += c2;
                count += 1;
            }
        }
        if count > 0 {
            im = -std::f64::consts::PI * (acc / count as f64) / p.d_eps;
        }
    }
    Ok((Complex64::new(re, im), in_band))
}

/// Spectral density `-Im G / pi` with `G = 1/(e - E_g - Sigma(e))`.
pub fn green_density(p: &ModelParams, couplings: &[(f64, f64)], e: f64) -> Result<f64> {
    let (sigma, _) = self_energy(p, couplings, e)?;
    let denom = Complex64::new(e - p.e_g - sigma.re, -sigma.im);
    let g = denom.inv();
    Ok(-g.im / std::f64::consts::PI)
}

/// Least-squares Lorentzian resonance fit.
#[derive(Debug, Clone, Copy)]
pub struct LorentzianFit {
    pub center: f64,
    /// Half width at half maximum; positive.
    pub half_width: f64,
    /// Total weight under the curve (dimensionless).
    pub amplitude: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub iterations: usize,
}

/// Fits `weight/d_eps` against `E` to `A (g/pi) / ((E-c)² + g²)` over a
/// branch, restricted to eigenstates inside the continuum band window
/// (|E - band_center| <= (N/2 + 1) d_eps) and above the relative weight
/// floor. Far off-band bound states belong to the distribution but not to
/// the in-band resonance being fitted.
///
/// Initialization is deterministic: center at the weighted mean, width at
/// the weighted rms spread. Levenberg-Marquardt with a fixed iteration
/// budget; fails if fewer than 5 points qualify.
pub fn fit_lorentzian(
    sd: &SpectralDistribution,
    branch: Branch,
    p: &ModelParams,
) -> Result<LorentzianFit> {
    let window = (p.n as f64 / 2.0 + 1.0) * p.d_eps;
    let candidates: Vec<(f64, f64)> = sd
        .entries
        .iter()
        .filter(|e| e.branch == branch && (e.energy - p.band_center).abs() <= window)
        .map(|e| (e.energy, e.weight / p.d_eps))
        .collect();
    let w_max = candidates.iter().map(|&(_, y)| y).fold(0.0f64, f64::max);
    let pts: Vec<(f64, f64)> = candidates
        .into_iter()
        .filter(|&(_, y)| y >= FIT_WEIGHT_FLOOR * w_max)
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "lorentzian fit needs at least 5 in-band {} points above the weight floor, got {}",
            branch.name(),
            pts.len()
        )));
    }

    let wsum: f64 = pts.iter().map(|&(_, y)| y).sum();
    let mut center: f64 = pts.iter().map(|&(e, y)| e * y).sum::<f64>() / wsum;
    let mut width = (pts
        .iter()
        .map(|&(e, y)| y * (e - center) * (e - center))
        .sum::<f64>()
        / wsum)
        .sqrt();
    if width == 0.0 {
        width = p.d_eps;
    }
    let mut amp = wsum * p.d_eps;

    let model = |a: f64, c: f64, g: f64, e: f64| {
        a * (g / std::f64::consts::PI) / ((e - c) * (e - c) + g * g)
    };
    let cost_of = |a: f64, c: f64, g: f64| {
        pts.iter()
            .map(|&(e, y)| {
                let r = model(a, c, g, e) - y;
                r * r
            })
            .sum::<f64>()
    };

    let mut lambda = 1e-3;
    let mut cost = cost_of(amp, center, width);
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        // Jacobian normal equations
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for &(e, y) in &pts {
            let den = (e - center) * (e - center) + width * width;
            let da = (width / std::f64::consts::PI) / den;
            let dc = amp * (width / std::f64::consts::PI) * 2.0 * (e - center) / (den * den);
            let dg = amp / std::f64::consts::PI * (den - 2.0 * width * width) / (den * den);
            let r = model(amp, center, width, e) - y;
            let j = [da, dc, dg];
            for a in 0..3 {
                for b in 0..3 {
                    jtj[(a, b)] += j[a] * j[b];
                }
                jtr[a] += j[a] * r;
            }
        }
        let mut damped = jtj;
        for d in 0..3 {
            damped[(d, d)] += lambda * jtj[(d, d)];
        }
        let step = match damped.lu().solve(&(-jtr)) {
            Some(s) => s,
            None => {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
                continue;
            }
        };
        let (na, nc, ng) = (amp + step[0], center + step[1], (width + step[2]).abs());
        let new_cost = cost_of(na, nc, ng);
        if new_cost < cost {
            let improved = cost - new_cost;
            amp = na;
            center = nc;
            width = ng;
            cost = new_cost;
            lambda = (lambda * 0.3).max(1e-12);
            if improved <= 1e-12 * cost.max(1e-300) {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }

    if width <= 0.0 || !width.is_finite() || !center.is_finite() || !amp.is_finite() {
        return Err(Error::Eigen(format!(
            "lorentzian fit did not converge (A={amp}, c={center}, g={width})"
        )));
    }
    Ok(LorentzianFit {
        center,
        half_width: width,
        amplitude: amp,
        rms_residual: (cost / pts.len() as f64).sqrt(),
        n_points: pts.len(),
        iterations,
    })
}
