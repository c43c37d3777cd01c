//! Reference parameter sets for the three coupling regimes.

use crate::model::{ModelParams, HBAR_PEV_S};

fn base(dv: f64) -> ModelParams {
    ModelParams {
        e_g: 0.0,
        e_w: 2.5,
        v: 0.05,
        dv,
        w: 0.00707,
        d_eps: 2.22e-6,
        n: 398,
        band_center: 0.0,
        hbar: HBAR_PEV_S,
        degenerate_continuum: false,
    }
}

/// Large asymmetry: slow Rabi oscillation with superposed jumps.
pub fn slow_rabi() -> ModelParams {
    base(0.045)
}

/// Intermediate asymmetry: telegraph-like side switching.
pub fn telegraph() -> ModelParams {
    base(0.018)
}

/// Small asymmetry: the two sides bond and the particle delocalizes.
pub fn bonding() -> ModelParams {
    base(0.005)
}

/// Default time grid covering several switching periods: 8000 s in 4000 steps.
pub const DEFAULT_T_MAX: f64 = 8000.0;
pub const DEFAULT_T_STEPS: usize = 4000;
