//! Simulator and analysis toolkit for a particle switching between the two
//! sides of a symmetric system through gateway states coupled to discretized
//! continua.
//!
//! The model has one remote state, one gateway state and `N` continuum levels
//! per side. Exact diagonalization of the full Hamiltonian plus unitary
//! spectral-synthesis evolution produces the side-occupation time series; the
//! symmetry-adapted (±) basis decouples the problem into two blocks, and the
//! closed-form perturbative chain (degenerate-continuum reduction, on-shell
//! matrix elements, resummed scattering amplitude) provides independent
//! cross-checks of the exact numerics.
//!
//! All energies are in peV, all times in seconds.

pub mod config;
pub mod dynamics;
mod error;
pub mod model;
pub mod output;
pub mod presets;
pub mod scattering;
pub mod spectral;
pub mod spectrum;
pub mod symmetry;
pub mod telegraph;

pub use error::Error;
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
