//! Sample container and estimator configuration shared by every estimator.
//!
//! A [`Dataset`] holds n joint observations of (X, Y), each side a fixed-width
//! row of finite reals. Discrete values are ordinary reals that happen to
//! repeat exactly; no schema distinguishes them. The estimators detect atoms
//! operationally, through coincident coordinates, never through annotations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};

/// Immutable table of n joint samples, row-major on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    x_dim: usize,
    y_dim: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn y_dim(&self) -> usize {
        self.y_dim
    }

    #[inline]
    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.x_dim..(i + 1) * self.x_dim]
    }

    #[inline]
    pub fn y_row(&self, i: usize) -> &[f64] {
        &self.y[i * self.y_dim..(i + 1) * self.y_dim]
    }

    pub fn x_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.x_dim)
    }

    pub fn y_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.y.chunks_exact(self.y_dim)
    }

    /// Reorder rows so that new row i is old row `perm[i]`.
    ///
    /// # Panics
    /// If `perm` is not a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Dataset {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut seen = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut x = Vec::with_capacity(self.x.len());
        let mut y = Vec::with_capacity(self.y.len());
        for &p in perm {
            x.extend_from_slice(self.x_row(p));
            y.extend_from_slice(self.y_row(p));
        }
        Dataset {
            n: self.n,
            x_dim: self.x_dim,
            y_dim: self.y_dim,
            x,
            y,
        }
    }

    /// Shift every X row by `dx` and every Y row by `dy`.
    pub fn translated(&self, dx: &[f64], dy: &[f64]) -> Dataset {
        assert_eq!(dx.len(), self.x_dim);
        assert_eq!(dy.len(), self.y_dim);
        let mut out = self.clone();
        for row in out.x.chunks_exact_mut(self.x_dim) {
            for (v, d) in row.iter_mut().zip(dx) {
                *v += d;
            }
        }
        for row in out.y.chunks_exact_mut(self.y_dim) {
            for (v, d) in row.iter_mut().zip(dy) {
                *v += d;
            }
        }
        out
    }
}

fn check_table(rows: &[Vec<f64>], side: Side) -> Result<usize> {
    let dim = rows[0].len();
    if dim == 0 {
        return Err(Error::RaggedRow {
            side,
            row: 0,
            got: 0,
            expected: 1,
        });
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::RaggedRow {
                side,
                row: r,
                got: row.len(),
                expected: dim,
            });
        }
        for (c, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    side,
                    row: r,
                    col: c,
                });
            }
        }
    }
    Ok(dim)
}

/// Build a [`Dataset`] from raw row tables, enforcing its invariants:
/// equal row counts, at least one row, rectangular sides, finite entries.
/// Row and column indices in errors are zero-based.
pub fn validate_dataset(x_rows: &[Vec<f64>], y_rows: &[Vec<f64>]) -> Result<Dataset> {
    if x_rows.is_empty() || y_rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x_rows.len() != y_rows.len() {
        return Err(Error::ShapeMismatch {
            x_rows: x_rows.len(),
            y_rows: y_rows.len(),
        });
    }
    let x_dim = check_table(x_rows, Side::X)?;
    let y_dim = check_table(y_rows, Side::Y)?;
    let n = x_rows.len();
    let mut x = Vec::with_capacity(n * x_dim);
    let mut y = Vec::with_capacity(n * y_dim);
    for row in x_rows {
        x.extend_from_slice(row);
    }
    for row in y_rows {
        y.extend_from_slice(row);
    }
    Ok(Dataset {
        n,
        x_dim,
        y_dim,
        x,
        y,
    })
}

/// Norm applied inside each of the X and Y spaces. The joint distance is
/// always the max of the two within-space distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    /// Max-coordinate (l-infinity), the usual k-NN estimator convention.
    #[default]
    MaxCoord,
    Euclidean,
}

/// Knobs for the k-nearest-neighbor estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Neighbor order; must satisfy 1 <= k < n.
    pub k: usize,
    pub within_norm: Norm,
    /// Distances at or below this threshold are treated as coincident
    /// points. Zero (the default) means exact equality, which is what the
    /// synthetic mixtures produce; a positive tolerance is for ingested
    /// data with rounded storage.
    pub atom_tolerance: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            k: 5,
            within_norm: Norm::MaxCoord,
            atom_tolerance: 0.0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_k(k: usize) -> Self {
        EstimatorConfig {
            k,
            ..Default::default()
        }
    }

    pub fn validate_for(&self, dataset: &Dataset) -> Result<()> {
        if self.k == 0 || self.k >= dataset.n() {
            return Err(Error::InvalidK {
                k: self.k,
                n: dataset.n(),
            });
        }
        if !self.atom_tolerance.is_finite() || self.atom_tolerance < 0.0 {
            return Err(Error::invalid_parameter(
                "atom_tolerance",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// Echo of whichever configuration produced an estimate, kept with the
/// result so every output is self-describing.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConfigEcho {
    Knn {
        #[serde(flatten)]
        config: EstimatorConfig,
    },
    NoisyKnn {
        #[serde(flatten)]
        config: EstimatorConfig,
        sigma: f64,
        noise_seed: u64,
    },
    Partition {
        #[serde(flatten)]
        config: crate::estimators::PartitionConfig,
    },
}

/// An estimator's output: the point estimate in nats plus per-sample
/// contributions (empty for the partition estimators).
#[derive(Clone, Debug, Serialize)]
pub struct MiEstimate {
    /// Estimated mutual information in nats; may be negative.
    pub value: f64,
    /// Per-sample contributions whose mean is `value`.
    pub per_sample: Vec<f64>,
    pub estimator_name: String,
    pub config_echo: ConfigEcho,
}

/// Per-sample neighborhood statistics feeding the estimator sum.
///
/// At an atom (`rho` within the atom tolerance) the marginal counts are
/// inclusive at the tolerance and `n_x >= k_tilde`, `n_y >= k_tilde`. In
/// the continuous branch they are strict (inside the open ball of radius
/// `rho`): neighbors sitting exactly at the radius are left out, so the
/// counts may fall below k when distances tie there. The estimator terms
/// `psi(n + 1)` stay well-defined either way. Self is never counted, and
/// the inclusive count at `rho` always dominates `k_tilde`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborProfile {
    /// k-th smallest joint distance to the other samples.
    pub rho: f64,
    /// Effective neighbor count: the coincident-sample count when `rho`
    /// is within the atom tolerance, otherwise k.
    pub k_tilde: usize,
    /// Marginal neighbor count on the X side.
    pub n_x: usize,
    /// Marginal neighbor count on the Y side.
    pub n_y: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(vals: &[f64]) -> Vec<Vec<f64>> {
        vals.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn accepts_well_formed_input() {
        let ds = validate_dataset(&col(&[0.0, 1.0, 2.0]), &col(&[5.0, 6.0, 7.0])).unwrap();
        assert_eq!((ds.n(), ds.x_dim(), ds.y_dim()), (3, 1, 1));
        assert_eq!(ds.x_row(1), &[1.0]);
        assert_eq!(ds.y_row(2), &[7.0]);
    }

    #[test]
    fn rejects_row_count_mismatch() {
        let err = validate_dataset(&col(&[0.0, 1.0, 2.0]), &col(&[0.0; 4])).unwrap_err();
        assert!(matches!(
            err,
            Error::ShapeMismatch {
                x_rows: 3,
                y_rows: 4
            }
        ));
    }

    #[test]
    fn rejects_nan_naming_position() {
        let mut x = col(&[0.0, 1.0, 2.0]);
        x[2][0] = f64::NAN;
        let err = validate_dataset(&x, &col(&[0.0, 0.0, 0.0])).unwrap_err();
        match err {
            Error::NonFinite { side, row, col } => {
                assert_eq!(side, Side::X);
                assert_eq!(row, 2);
                assert_eq!(col, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(matches!(
            validate_dataset(&[], &[]).unwrap_err(),
            Error::EmptyDataset
        ));
        let ragged = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            validate_dataset(&ragged, &col(&[0.0, 0.0])).unwrap_err(),
            Error::RaggedRow { row: 1, .. }
        ));
    }

    #[test]
    fn validate_is_pure() {
        let x = col(&[0.25, -1.5]);
        let y = col(&[3.5, 0.0]);
        let a = validate_dataset(&x, &y).unwrap();
        let b = validate_dataset(&x, &y).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_rejects_bad_k() {
        let ds = validate_dataset(&col(&[0.0]), &col(&[0.0])).unwrap();
        assert!(EstimatorConfig::with_k(1).validate_for(&ds).is_err());
        let ds2 = validate_dataset(&col(&[0.0, 1.0]), &col(&[0.0, 1.0])).unwrap();
        assert!(EstimatorConfig::with_k(1).validate_for(&ds2).is_ok());
        assert!(EstimatorConfig::with_k(0).validate_for(&ds2).is_err());
    }

    #[test]
    fn permuted_moves_rows() {
        let ds = validate_dataset(&col(&[0.0, 1.0, 2.0]), &col(&[5.0, 6.0, 7.0])).unwrap();
        let p = ds.permuted(&[2, 0, 1]);
        assert_eq!(p.x_row(0), &[2.0]);
        assert_eq!(p.y_row(0), &[7.0]);
        assert_eq!(p.x_row(1), &[0.0]);
    }
}
