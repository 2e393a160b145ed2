//! Configurations of unit vectors, their Gram matrices and the p-frame energy.
//!
//! The energy is summed over *ordered* pairs `i != j`, so a pair of identical
//! vectors contributes 2 regardless of `p`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `| ||x|| - 1 |` for configuration vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Tolerance on symmetry and on the unit diagonal of a Gram matrix.
pub const GRAM_TOL: f64 = 1e-12;
/// Smallest eigenvalue allowed for a Gram matrix built from vectors.
pub const PSD_TOL: f64 = 1e-9;
/// Default relative threshold for counting singular values in the rank.
pub const RANK_TOL: f64 = 1e-10;

/// `|t|^p` with `|0|^p = 0` for every `p > 0`.
#[inline]
pub fn abs_pow(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        0.0
    } else if a == 1.0 {
        1.0
    } else {
        a.powf(p)
    }
}

/// Energy exponent `p > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(pub(crate) f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::domain(format!("exponent must be finite and > 0, got {p}")))
        }
    }

    /// Exponent restricted to `[1, 2]`, the range where the relaxation bound applies.
    pub fn in_bound_range(p: f64) -> Result<Self> {
        if (1.0..=2.0).contains(&p) {
            Ok(Exponent(p))
        } else {
            Err(Error::domain(format!("exponent must lie in [1, 2], got {p}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

/// `N` unit vectors in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorConfiguration {
    dim: usize,
    coords: Vec<f64>,
}

impl UnitVectorConfiguration {
    /// Validates that every vector has `dim` coordinates and unit norm.
    pub fn new(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        Self::with_tolerance(dim, vectors, UNIT_NORM_TOL)
    }

    pub fn with_tolerance(dim: usize, vectors: &[Vec<f64>], tol: f64) -> Result<Self> {
        if dim == 0 || vectors.is_empty() {
            return Err(Error::Empty);
        }
        let mut coords = Vec::with_capacity(dim * vectors.len());
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    found: v.len(),
                    expected: dim,
                });
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= tol) {
                return Err(Error::NonUnitVector { index, norm, tol });
            }
            coords.extend_from_slice(v);
        }
        Ok(UnitVectorConfiguration { dim, coords })
    }

    /// Normalizes each vector; fails on a zero (or non-finite) vector.
    pub fn normalized(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let scaled: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            })
            .collect();
        Self::new(dim, &scaled)
    }

    /// Wraps flat row-major coordinates that the caller has already normalized.
    pub(crate) fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && coords.len().is_multiple_of(dim));
        UnitVectorConfiguration { dim, coords }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.vectors().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.coords
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric `N x N` matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    /// Checks symmetry and the unit diagonal to [`GRAM_TOL`].
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::InvalidGram(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if !((entries[(i, i)] - 1.0).abs() <= GRAM_TOL) {
                return Err(Error::InvalidGram(format!(
                    "diagonal entry {i} is {}, expected 1",
                    entries[(i, i)]
                )));
            }
            for j in (i + 1)..n {
                if !((entries[(i, j)] - entries[(j, i)]).abs() <= GRAM_TOL) {
                    return Err(Error::InvalidGram(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(GramMatrix { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGram("rows must all have length N".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.order();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Singular values in descending order (absolute eigenvalues for a symmetric matrix).
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.eigenvalues().into_iter().map(f64::abs).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Off-diagonal absolute values (upper triangle), sorted descending.
    pub fn sorted_off_diagonal_abs(&self) -> Vec<f64> {
        let n = self.order();
        let mut v: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).abs())
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Gram matrix of a configuration, diagonal pinned to exactly 1.
pub fn gram_of(config: &UnitVectorConfiguration) -> GramMatrix {
    let n = config.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let t = dot(config.vector(i), config.vector(j));
            a[(i, j)] = t;
            a[(j, i)] = t;
        }
    }
    GramMatrix { entries: a }
}

/// `sum_{i != j} |A_ij|^p` over ordered pairs.
pub fn frame_energy(gram: &GramMatrix, p: Exponent) -> f64 {
    let n = gram.order();
    let p = p.value();
    let mut upper = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            upper += abs_pow(gram.get(i, j), p);
        }
    }
    2.0 * upper
}

/// Energy straight from the vectors, without materializing the Gram matrix.
pub fn config_energy(config: &UnitVectorConfiguration, p: Exponent) -> f64 {
    let n = config.len();
    let p = p.value();
    let mut upper = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            upper += abs_pow(dot(config.vector(i), config.vector(j)), p);
        }
    }
    2.0 * upper
}

/// Standard basis vectors cycled: vector `j` (0-based) is `e_{j mod d}`.
pub fn repeated_ortho_config(dim: usize, n: usize) -> Result<UnitVectorConfiguration> {
    if dim == 0 || n == 0 {
        return Err(Error::Empty);
    }
    let mut coords = vec![0.0; dim * n];
    for j in 0..n {
        coords[j * dim + j % dim] = 1.0;
    }
    Ok(UnitVectorConfiguration { dim, coords })
}

/// Multiplicities of each basis vector in [`repeated_ortho_config`]: `ceil(N/d)` for
/// the first `N mod d` directions, `floor(N/d)` for the rest.
pub fn repeated_ortho_multiplicities(dim: usize, n: usize) -> Vec<usize> {
    (0..dim).map(|i| n / dim + usize::from(i < n % dim)).collect()
}

/// `sum c_i (c_i - 1)`: the energy of mutually orthogonal directions repeated
/// with the given multiplicities. Independent of `p`.
pub fn multiplicity_energy(multiplicities: &[usize]) -> f64 {
    multiplicities
        .iter()
        .map(|&c| (c * c.saturating_sub(1)) as f64)
        .sum()
}

/// Closed-form energy for the conjectured minimizer with `N = m + k d` points:
/// `d (k^2 - k) + 2k`. The direct count is `d k (k - 1) + 2 m k`, so the two agree only when `m = 1`.
pub fn conjecture_formula_value(dim: usize, k: usize) -> f64 {
    let (d, k) = (dim as f64, k as f64);
    d * (k * k - k) + 2.0 * k
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub max_rank: usize,
    pub within: bool,
    pub singular_values: Vec<f64>,
}

/// Numerical rank: singular values strictly above `tol * largest`.
pub fn validate_rank(gram: &GramMatrix, max_rank: usize, tol: f64) -> RankReport {
    let sv = gram.singular_values();
    let largest = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tol * largest).count();
    RankReport {
        rank,
        max_rank,
        within: rank <= max_rank,
        singular_values: sv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn basis_gram_is_identity() {
        let c = UnitVectorConfiguration::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = gram_of(&c);
        assert_eq!(g.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(frame_energy(&g, p(1.3)), 0.0);
    }

    #[test]
    fn repeated_vector_gram() {
        let c = UnitVectorConfiguration::new(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(gram_of(&c).to_rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn non_unit_vector_is_named() {
        let err = UnitVectorConfiguration::new(2, &[vec![1.0, 0.0], vec![0.5, 0.0]]).unwrap_err();
        match err {
            Error::NonUnitVector { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn repeated_ortho_layout() {
        let c = repeated_ortho_config(2, 5).unwrap();
        let firsts: Vec<usize> = c
            .vectors()
            .map(|v| v.iter().position(|&x| x == 1.0).unwrap())
            .collect();
        assert_eq!(firsts, vec![0, 1, 0, 1, 0]);
        assert_eq!(repeated_ortho_multiplicities(2, 5), vec![3, 2]);
        assert_eq!(repeated_ortho_multiplicities(3, 4), vec![2, 1, 1]);
        assert_eq!(repeated_ortho_multiplicities(2, 4), vec![2, 2]);
    }

    #[test]
    fn ortho_plus_m_repeats_has_energy_2m() {
        for d in 2..7 {
            for m in 1..d {
                let g = gram_of(&repeated_ortho_config(d, d + m).unwrap());
                for &pv in &[1.0, 1.17, 1.5, 2.0, 3.3] {
                    assert_eq!(frame_energy(&g, p(pv)), 2.0 * m as f64);
                }
                assert_eq!(multiplicity_energy(&repeated_ortho_multiplicities(d, d + m)), 2.0 * m as f64);
            }
        }
    }

    #[test]
    fn two_three_split_counts_eight() {
        // {e1,e1,e2,e2,e2}: 2*1 + 3*2 ordered pairs
        let v = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]];
        let c = UnitVectorConfiguration::new(2, &v.map(|x| x.to_vec())).unwrap();
        assert_eq!(frame_energy(&gram_of(&c), p(1.7)), 8.0);
        assert_eq!(multiplicity_energy(&[2, 3]), 8.0);
    }

    #[test]
    fn multiplicity_energy_cases() {
        assert_eq!(multiplicity_energy(&[1, 1, 1, 1]), 0.0);
        assert_eq!(multiplicity_energy(&[4, 3]), 18.0);
        assert_eq!(conjecture_formula_value(2, 3), 18.0);
        assert_eq!(multiplicity_energy(&[0, 1]), 0.0);
    }

    #[test]
    fn rank_examples() {
        let id = GramMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let r = validate_rank(&id, 4, RANK_TOL);
        assert_eq!((r.rank, r.within), (4, true));

        let ones = GramMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = validate_rank(&ones, 1, RANK_TOL);
        assert_eq!((r.rank, r.within), (1, true));
    }

    #[test]
    fn gram_rejects_asymmetry_and_bad_diagonal() {
        assert!(GramMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
        assert!(GramMatrix::from_rows(&[vec![0.9, 0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(0.0).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::in_bound_range(2.5).is_err());
        assert!(Exponent::in_bound_range(1.0).is_ok());
    }
}
