//! Orthogonal transformation to the symmetric/antisymmetric (±) basis and
//! extraction of the two decoupled blocks.
//!
//! Transformed basis ordering: `g+, g-, w+, w-`, then `kappa+_1..N`, then
//! `kappa-_1..N`. Each transformed vector is `(x_alpha ± x_beta)/sqrt(2)`.
//! Inside each block the ordering is `g, w, kappa_1..N`.

use nalgebra::DMatrix;

use crate::model::{BasisLabel, BasisMap, HamiltonianMatrix, Side};
use crate::{Error, Result};

/// Maximum allowed coupling between the + and - blocks, relative to the
/// largest matrix entry. Leakage above this signals a model-assembly bug.
pub const BLOCK_LEAK_TOL: f64 = 1e-12;

/// The α↔β symmetry adaptation.
///
/// `u` maps input-basis vectors to the ± basis (rows are the transformed
/// vectors); it is orthogonal with exactly two entries `±1/sqrt(2)` per row.
#[derive(Debug, Clone)]
pub struct SymmetryTransform {
    n: usize,
    u: DMatrix<f64>,
    plus_indices: Vec<usize>,
    minus_indices: Vec<usize>,
    /// Per transformed row: the two input indices combined and the sign of
    /// the beta component (`+1` symmetric, `-1` antisymmetric).
    pairs: Vec<(usize, usize, f64)>,
}

impl SymmetryTransform {
    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Transformed-basis indices of the symmetric block, ordered g+, w+, kappa+.
    pub fn plus_indices(&self) -> &[usize] {
        &self.plus_indices
    }

    /// Transformed-basis indices of the antisymmetric block, ordered g-, w-, kappa-.
    pub fn minus_indices(&self) -> &[usize] {
        &self.minus_indices
    }
}

/// Builds the exact analytic transform for a basis map.
pub fn build_transform(b: &BasisMap) -> SymmetryTransform {
    let n = b.n();
    let dim = b.dim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::<f64>::zeros(dim, dim);
    let mut pairs = Vec::with_capacity(dim);

    let pair_of = |label: BasisLabel| -> (usize, usize) {
        let a = b.index_of(label).unwrap();
        let other = match label {
            BasisLabel::Remote(side) => BasisLabel::Remote(side.other()),
            BasisLabel::Gateway(side) => BasisLabel::Gateway(side.other()),
            BasisLabel::Continuum(side, k) => BasisLabel::Continuum(side.other(), k),
        };
        (a, b.index_of(other).unwrap())
    };

    // row layout: g+, g-, w+, w-, kappa+_k, kappa-_k
    let mut rows: Vec<(usize, usize, f64)> = Vec::with_capacity(dim);
    let (ga, gb) = pair_of(BasisLabel::Remote(Side::Alpha));
    rows.push((ga, gb, 1.0));
    rows.push((ga, gb, -1.0));
    let (wa, wb) = pair_of(BasisLabel::Gateway(Side::Alpha));
    rows.push((wa, wb, 1.0));
    rows.push((wa, wb, -1.0));
    for k in 0..n {
        let (ka, kb) = pair_of(BasisLabel::Continuum(Side::Alpha, k));
        rows.push((ka, kb, 1.0));
    }
    for k in 0..n {
        let (ka, kb) = pair_of(BasisLabel::Continuum(Side::Alpha, k));
        rows.push((ka, kb, -1.0));
    }

    for (row, &(a, bidx, sign)) in rows.iter().enumerate() {
        u[(row, a)] = s;
        u[(row, bidx)] = sign * s;
        pairs.push((a, bidx, sign));
    }

    let mut plus_indices = vec![0, 2];
    plus_indices.extend(4..4 + n);
    let mut minus_indices = vec![1, 3];
    minus_indices.extend(4 + n..4 + 2 * n);

    SymmetryTransform {
        n,
        u,
        plus_indices,
        minus_indices,
        pairs,
    }
}

/// Returns `U H U^T`.
///
/// Each entry is evaluated from the four underlying input-basis entries, and
/// only the upper triangle is computed (then mirrored), so the result is
/// exactly symmetric.
pub fn transform_hamiltonian(
    h: &HamiltonianMatrix,
    t: &SymmetryTransform,
) -> Result<HamiltonianMatrix> {
    let dim = t.dim();
    if h.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "transform_hamiltonian",
            expected: dim,
            got: h.dim(),
        });
    }
    let m = h.entries();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let (ai, bi, si) = t.pairs[i];
        for j in i..dim {
            let (aj, bj, sj) = t.pairs[j];
            let val =
                0.5 * (m[(ai, aj)] + sj * m[(ai, bj)] + si * m[(bi, aj)] + si * sj * m[(bi, bj)]);
            out[(i, j)] = val;
            out[(j, i)] = val;
        }
    }
    HamiltonianMatrix::new(out)
}

/// Splits the transformed Hamiltonian into the + and - blocks, each ordered
/// `g, w, kappa_1..N`.
///
/// Fails if any entry between the blocks exceeds `BLOCK_LEAK_TOL * max|H|`.
pub fn extract_blocks(
    h_t: &HamiltonianMatrix,
    t: &SymmetryTransform,
) -> Result<(HamiltonianMatrix, HamiltonianMatrix)> {
    let dim = t.dim();
    if h_t.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "extract_blocks",
            expected: dim,
            got: h_t.dim(),
        });
    }
    let leak = max_off_block(h_t, t);
    let tol = BLOCK_LEAK_TOL * h_t.max_abs();
    if leak > tol {
        return Err(Error::Domain(format!(
            "off-block leakage {leak:e} exceeds {tol:e}; the input is not block-diagonal in the ± basis"
        )));
    }
    let m = h_t.entries();
    let take = |idx: &[usize]| {
        let k = idx.len();
        let mut blk = DMatrix::<f64>::zeros(k, k);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                blk[(r, c)] = m[(i, j)];
            }
        }
        blk
    };
    Ok((
        HamiltonianMatrix::new(take(t.plus_indices()))?,
        HamiltonianMatrix::new(take(t.minus_indices()))?,
    ))
}

/// Largest |entry| connecting the + and - blocks.
pub fn max_off_block(h_t: &HamiltonianMatrix, t: &SymmetryTransform) -> f64 {
    let m = h_t.entries();
    let mut leak: f64 = 0.0;
    for &i in t.plus_indices() {
        for &j in t.minus_indices() {
            leak = leak.max(m[(i, j)].abs());
        }
    }
    leak
}
