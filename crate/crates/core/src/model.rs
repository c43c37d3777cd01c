//! Model parameters, basis enumeration, continuum discretization and
//! Hamiltonian assembly.
//!
//! Basis ordering is fixed and documented: `g_alpha, g_beta, w_alpha, w_beta`,
//! then the `N` alpha-side continuum levels, then the `N` beta-side levels.
//! The matrix is assembled exactly symmetric (both triangles written from the
//! same value, never symmetrized after the fact).

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Reduced Planck constant in peV·s (CODATA 2018, converted from eV·s).
pub const HBAR_PEV_S: f64 = 6.582_119_569e-4;

/// One of the two sides of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Alpha,
    Beta,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alpha => Side::Beta,
            Side::Beta => Side::Alpha,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Alpha => "alpha",
            Side::Beta => "beta",
        }
    }
}

/// A physical basis state.
///
/// `Continuum(side, k)` is the k-th continuum level on `side`, `k` running
/// from 0 to N-1 in order of increasing energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Remote state: where the particle resides between switches.
    Remote(Side),
    /// Gateway state: mediates side-to-side hopping and continuum coupling.
    Gateway(Side),
    /// One of the N quasi-continuum levels on a side.
    Continuum(Side, usize),
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisLabel::Remote(s) => write!(f, "g_{}", s.name()),
            BasisLabel::Gateway(s) => write!(f, "w_{}", s.name()),
            BasisLabel::Continuum(s, k) => write!(f, "kappa_{},{}", s.name(), k + 1),
        }
    }
}

/// All physical parameters plus discretization choices.
///
/// Energies in peV, `hbar` in peV·s. `n` is the number of continuum levels
/// per side, so the total basis dimension is `2n + 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Energy of the remote states (defines the energy shell).
    pub e_g: f64,
    /// Energy of the gateway states.
    pub e_w: f64,
    /// Remote-gateway coupling on the same side.
    pub v: f64,
    /// Coupling asymmetry; the cross-side coupling is `v - dv`.
    pub dv: f64,
    /// Gateway-continuum coupling (identical for every level).
    pub w: f64,
    /// Continuum level spacing.
    pub d_eps: f64,
    /// Continuum levels per side.
    pub n: usize,
    /// Center energy of the continuum band.
    pub band_center: f64,
    /// Reduced Planck constant, peV·s.
    pub hbar: f64,
    /// Collapse the continuum onto `band_center` (all levels degenerate).
    /// Exercises the closed-form degenerate reduction.
    pub degenerate_continuum: bool,
}

impl ModelParams {
    /// Total basis dimension `2n + 4`.
    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }

    /// Half the continuum bandwidth, `n * d_eps / 2`.
    pub fn band_half_width(&self) -> f64 {
        self.n as f64 * self.d_eps / 2.0
    }

    /// Returns every violated invariant with the offending field.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let fin = [
            ("E_g", self.e_g),
            ("E_w", self.e_w),
            ("V", self.v),
            ("dV", self.dv),
            ("W", self.w),
            ("d_eps", self.d_eps),
            ("band_center", self.band_center),
            ("hbar", self.hbar),
        ];
        for (name, x) in fin {
            if !x.is_finite() {
                v.push(format!("{name} must be finite"));
            }
        }
        if self.v < 0.0 {
            v.push("V must be non-negative".into());
        }
        if self.w < 0.0 {
            v.push("W must be non-negative".into());
        }
        if self.d_eps <= 0.0 {
            v.push("d_eps must be positive".into());
        }
        if self.n < 1 {
            v.push("N must be at least 1".into());
        }
        if self.hbar <= 0.0 {
            v.push("hbar must be positive".into());
        }
        if self.dv < 0.0 {
            v.push("dV must be non-negative".into());
        }
        if self.dv > self.v {
            v.push("dV exceeds V".into());
        }
        v
    }

    /// `Ok(())` when all invariants hold, otherwise the full violation list.
    pub fn validated(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// Bijection between basis labels and matrix indices.
///
/// Iteration order: `g_alpha, g_beta, w_alpha, w_beta`, then
/// `kappa_alpha,1..N`, then `kappa_beta,1..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisMap {
    n: usize,
}

impl BasisMap {
    pub fn new(n: usize) -> BasisMap {
        BasisMap { n }
    }

    pub fn for_params(p: &ModelParams) -> BasisMap {
        BasisMap { n: p.n }
    }

    /// Continuum levels per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }

    pub fn index_of(&self, label: BasisLabel) -> Result<usize> {
        let idx = match label {
            BasisLabel::Remote(Side::Alpha) => 0,
            BasisLabel::Remote(Side::Beta) => 1,
            BasisLabel::Gateway(Side::Alpha) => 2,
            BasisLabel::Gateway(Side::Beta) => 3,
            BasisLabel::Continuum(side, k) => {
                if k >= self.n {
                    return Err(Error::UnknownLabel(format!(
                        "kappa_{},{} with N = {}",
                        side.name(),
                        k + 1,
                        self.n
                    )));
                }
                match side {
                    Side::Alpha => 4 + k,
                    Side::Beta => 4 + self.n + k,
                }
            }
        };
        Ok(idx)
    }

    pub fn label_at(&self, index: usize) -> Result<BasisLabel> {
        let n = self.n;
        let label = match index {
            0 => BasisLabel::Remote(Side::Alpha),
            1 => BasisLabel::Remote(Side::Beta),
            2 => BasisLabel::Gateway(Side::Alpha),
            3 => BasisLabel::Gateway(Side::Beta),
            i if i < 4 + n => BasisLabel::Continuum(Side::Alpha, i - 4),
            i if i < 4 + 2 * n => BasisLabel::Continuum(Side::Beta, i - 4 - n),
            _ => {
                return Err(Error::UnknownLabel(format!(
                    "index {index} out of range for dimension {}",
                    self.dim()
                )))
            }
        };
        Ok(label)
    }

    /// Labels in iteration order.
    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dim()).map(|i| self.label_at(i).expect("index in range"))
    }

    /// Matrix indices belonging to one side: remote and gateway, plus the
    /// side's continuum levels when `include_environment`.
    pub fn side_indices(&self, side: Side, include_environment: bool) -> Vec<usize> {
        let mut idx = vec![
            self.index_of(BasisLabel::Remote(side)).unwrap(),
            self.index_of(BasisLabel::Gateway(side)).unwrap(),
        ];
        if include_environment {
            for k in 0..self.n {
                idx.push(self.index_of(BasisLabel::Continuum(side, k)).unwrap());
            }
        }
        idx
    }
}

/// Dense real symmetric Hamiltonian (peV).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    mat: DMatrix<f64>,
}

impl HamiltonianMatrix {
    /// Wraps a matrix, rejecting anything not exactly symmetric.
    pub fn new(mat: DMatrix<f64>) -> Result<HamiltonianMatrix> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "HamiltonianMatrix::new",
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        for i in 0..mat.nrows() {
            for j in 0..i {
                if mat[(i, j)] != mat[(j, i)] {
                    return Err(Error::Domain(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(HamiltonianMatrix { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

/// Uniform continuum grid `eps_k = band_center + (k - (N+1)/2) * d_eps`,
/// `k = 1..N`; symmetric about `band_center` and identical for both sides.
///
/// In degenerate-continuum mode every level sits at `band_center`.
pub fn continuum_energies(p: &ModelParams) -> Result<Vec<f64>> {
    p.validated()?;
    if p.degenerate_continuum {
        return Ok(vec![p.band_center; p.n]);
    }
    let mid = (p.n as f64 + 1.0) / 2.0;
    Ok((1..=p.n)
        .map(|k| p.band_center + (k as f64 - mid) * p.d_eps)
        .collect())
}

/// Assembles the full `2N+4` Hamiltonian.
///
/// Diagonal: `E_g, E_g, E_w, E_w`, then the two continuum grids. Couplings:
/// `V` between remote and gateway on the same side, `V - dV` across sides,
/// `W` between each gateway and every continuum level on its own side. All
/// other off-diagonal entries are zero.
pub fn build_hamiltonian(p: &ModelParams, b: &BasisMap) -> Result<HamiltonianMatrix> {
    p.validated()?;
    if b.n() != p.n {
        return Err(Error::DimensionMismatch {
            context: "build_hamiltonian",
            expected: p.n,
            got: b.n(),
        });
    }
    let dim = p.dim();
    let eps = continuum_energies(p)?;
    let mut m = DMatrix::<f64>::zeros(dim, dim);

    let ga = b.index_of(BasisLabel::Remote(Side::Alpha))?;
    let gb = b.index_of(BasisLabel::Remote(Side::Beta))?;
    let wa = b.index_of(BasisLabel::Gateway(Side::Alpha))?;
    let wb = b.index_of(BasisLabel::Gateway(Side::Beta))?;

    m[(ga, ga)] = p.e_g;
    m[(gb, gb)] = p.e_g;
    m[(wa, wa)] = p.e_w;
    m[(wb, wb)] = p.e_w;

    let set = |m: &mut DMatrix<f64>, i: usize, j: usize, val: f64| {
        m[(i, j)] = val;
        m[(j, i)] = val;
    };
    set(&mut m, ga, wa, p.v);
    set(&mut m, gb, wb, p.v);
    set(&mut m, ga, wb, p.v - p.dv);
    set(&mut m, gb, wa, p.v - p.dv);

    for (k, &eps_k) in eps.iter().enumerate() {
        let ka = b.index_of(BasisLabel::Continuum(Side::Alpha, k))?;
        let kb = b.index_of(BasisLabel::Continuum(Side::Beta, k))?;
        m[(ka, ka)] = eps_k;
        m[(kb, kb)] = eps_k;
        set(&mut m, wa, ka, p.w);
        set(&mut m, wb, kb, p.w);
    }

    HamiltonianMatrix::new(m)
}
