//! Per-sample neighbor radii and range counts under the joint max-metric.
//!
//! The joint distance between samples i and j is
//! `max(||x_j - x_i||, ||y_j - y_i||)` with the configured within-space norm.
//! Counts always exclude the query sample itself. Ties are never broken:
//! several samples may sit at exactly the k-th radius and the inclusive
//! queries count all of them. The discrete case depends on this, since
//! coincident samples share distance zero. The estimators consume inclusive
//! counts at atoms and strict ones in the continuous branch; both query
//! flavors are exposed.
//!
//! Everything here is exact brute force, O(n) per query. That is the
//! correctness reference the rest of the crate is tested against, and at the
//! sample sizes the benchmarks use it is fast enough when the per-sample
//! loop runs in parallel.

use crate::dataset::{Dataset, EstimatorConfig, NeighborProfile, Norm};
use crate::error::{Result, Side};

/// Read-only distance and range-count queries against one dataset.
/// Queries for different samples may run concurrently.
#[derive(Clone, Copy, Debug)]
pub struct DistanceOracle<'a> {
    dataset: &'a Dataset,
    norm: Norm,
    atom_tolerance: f64,
}

/// Validate the configuration against the dataset and return an oracle.
pub fn build_index<'a>(
    dataset: &'a Dataset,
    config: &EstimatorConfig,
) -> Result<DistanceOracle<'a>> {
    config.validate_for(dataset)?;
    Ok(DistanceOracle {
        dataset,
        norm: config.within_norm,
        atom_tolerance: config.atom_tolerance,
    })
}

#[inline]
fn within_dist(norm: Norm, a: &[f64], b: &[f64]) -> f64 {
    match norm {
        Norm::MaxCoord => {
            let mut m = 0.0f64;
            for (p, q) in a.iter().zip(b) {
                let d = (p - q).abs();
                if d > m {
                    m = d;
                }
            }
            m
        }
        Norm::Euclidean => {
            let mut s = 0.0f64;
            for (p, q) in a.iter().zip(b) {
                let d = p - q;
                s += d * d;
            }
            s.sqrt()
        }
    }
}

/// Reusable per-thread buffers for [`DistanceOracle::profile_into`].
#[derive(Default)]
pub struct Scratch {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dj: Vec<f64>,
    order: Vec<f64>,
}

impl<'a> DistanceOracle<'a> {
    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn atom_tolerance(&self) -> f64 {
        self.atom_tolerance
    }

    fn x_dist(&self, i: usize, j: usize) -> f64 {
        within_dist(self.norm, self.dataset.x_row(i), self.dataset.x_row(j))
    }

    fn y_dist(&self, i: usize, j: usize) -> f64 {
        within_dist(self.norm, self.dataset.y_row(i), self.dataset.y_row(j))
    }

    fn side_dist(&self, side: Side, i: usize, j: usize) -> f64 {
        match side {
            Side::X => self.x_dist(i, j),
            Side::Y => self.y_dist(i, j),
        }
    }

    /// Joint distance `max(||x_j - x_i||, ||y_j - y_i||)`.
    ///
    /// # Panics
    /// If `i` or `j` is out of range.
    pub fn joint_distance(&self, i: usize, j: usize) -> f64 {
        let n = self.dataset.n();
        assert!(i < n && j < n, "sample index out of range");
        self.x_dist(i, j).max(self.y_dist(i, j))
    }

    /// k-th order statistic of the multiset {d(i,j) : j != i}, duplicates
    /// counted with multiplicity.
    ///
    /// # Panics
    /// If `k` is zero or `k >= n`.
    pub fn kth_radius(&self, i: usize, k: usize) -> f64 {
        let n = self.dataset.n();
        assert!(k >= 1 && k < n, "k must satisfy 1 <= k < n");
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| self.joint_distance(i, j))
            .collect();
        let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
        *kth
    }

    /// Number of samples j != i with joint distance within the atom
    /// tolerance (exact coincidences when the tolerance is zero).
    pub fn count_joint_at_zero(&self, i: usize) -> usize {
        self.count_joint_within(i, self.atom_tolerance)
    }

    /// Number of samples j != i with joint distance <= r.
    pub fn count_joint_within(&self, i: usize, r: f64) -> usize {
        let n = self.dataset.n();
        (0..n)
            .filter(|&j| j != i && self.joint_distance(i, j) <= r)
            .count()
    }

    /// Number of samples j != i whose `side` coordinate lies within r of
    /// sample i's, inclusive.
    pub fn count_marginal_within(&self, side: Side, i: usize, r: f64) -> usize {
        assert!(r >= 0.0, "radius must be nonnegative");
        let n = self.dataset.n();
        (0..n)
            .filter(|&j| j != i && self.side_dist(side, i, j) <= r)
            .count()
    }

    /// Number of samples j != i strictly inside radius r on one side. The
    /// continuous branch of the estimators counts this way, leaving the
    /// boundary of the k-th neighbor ball out.
    pub fn count_marginal_strictly_within(&self, side: Side, i: usize, r: f64) -> usize {
        assert!(r >= 0.0, "radius must be nonnegative");
        let n = self.dataset.n();
        (0..n)
            .filter(|&j| j != i && self.side_dist(side, i, j) < r)
            .count()
    }

    /// Full per-sample record in one pass: the k-th joint radius, the
    /// effective neighbor count, and the marginal counts the estimators
    /// consume.
    ///
    /// When the radius falls within the atom tolerance the sample sits on an
    /// atom: the effective count becomes the number of coincident samples
    /// and the marginal counts are taken inclusively at the tolerance, so
    /// every coincident sample is also counted marginally. Otherwise the
    /// marginal counts are taken strictly inside the radius, the
    /// convention under which the k-NN estimators are unbiased in the
    /// continuous regime.
    pub fn profile(&self, i: usize, k: usize) -> NeighborProfile {
        let mut scratch = Scratch::default();
        self.profile_into(i, k, &mut scratch)
    }

    /// As [`profile`](Self::profile), reusing caller-owned buffers.
    pub fn profile_into(&self, i: usize, k: usize, scratch: &mut Scratch) -> NeighborProfile {
        let ds = self.dataset;
        let n = ds.n();
        assert!(k >= 1 && k < n, "k must satisfy 1 <= k < n");

        let Scratch { dx, dy, dj, order } = scratch;
        dx.clear();
        dy.clear();
        dj.clear();
        let xi = ds.x_row(i);
        let yi = ds.y_row(i);
        for j in 0..n {
            if j == i {
                continue;
            }
            let ddx = within_dist(self.norm, xi, ds.x_row(j));
            let ddy = within_dist(self.norm, yi, ds.y_row(j));
            dx.push(ddx);
            dy.push(ddy);
            dj.push(ddx.max(ddy));
        }

        order.clear();
        order.extend_from_slice(dj);
        let (_, kth, _) = order.select_nth_unstable_by(k - 1, f64::total_cmp);
        let rho = *kth;

        let on_atom = rho <= self.atom_tolerance;
        let (k_tilde, n_x, n_y) = if on_atom {
            let tol = self.atom_tolerance;
            (
                dj.iter().filter(|&&d| d <= tol).count(),
                dx.iter().filter(|&&d| d <= tol).count(),
                dy.iter().filter(|&&d| d <= tol).count(),
            )
        } else {
            (
                k,
                dx.iter().filter(|&&d| d < rho).count(),
                dy.iter().filter(|&&d| d < rho).count(),
            )
        };

        NeighborProfile {
            rho,
            k_tilde,
            n_x,
            n_y,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::validate_dataset;

    fn oracle_cfg(k: usize) -> EstimatorConfig {
        EstimatorConfig::with_k(k)
    }

    fn ds(x: &[Vec<f64>], y: &[Vec<f64>]) -> Dataset {
        validate_dataset(x, y).unwrap()
    }

    fn col(vals: &[f64]) -> Vec<Vec<f64>> {
        vals.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn joint_distance_is_nested_max() {
        let d = ds(&col(&[0.0, 3.0]), &col(&[0.0, 1.0]));
        let o = build_index(&d, &oracle_cfg(1)).unwrap();
        assert_eq!(o.joint_distance(0, 1), 3.0);
        assert_eq!(o.joint_distance(1, 0), 3.0);
        assert_eq!(o.joint_distance(0, 0), 0.0);

        // 2-dim X rows (0,0),(1,2); Y rows (0),(0.5): max(max(1,2), 0.5) = 2.
        let d2 = ds(
            &[vec![0.0, 0.0], vec![1.0, 2.0]],
            &col(&[0.0, 0.5]),
        );
        let o2 = build_index(&d2, &oracle_cfg(1)).unwrap();
        assert_eq!(o2.joint_distance(0, 1), 2.0);
    }

    #[test]
    fn identical_rows_have_zero_distance() {
        let d = ds(&col(&[1.5, 1.5]), &col(&[-2.0, -2.0]));
        let o = build_index(&d, &oracle_cfg(1)).unwrap();
        assert_eq!(o.joint_distance(0, 1), 0.0);
    }

    #[test]
    fn kth_radius_is_order_statistic_with_multiplicity() {
        // Distances from sample 0: {0, 0, 5}.
        let d = ds(&col(&[0.0, 0.0, 0.0, 5.0]), &col(&[0.0, 0.0, 0.0, 0.0]));
        let o = build_index(&d, &oracle_cfg(2)).unwrap();
        assert_eq!(o.kth_radius(0, 2), 0.0);
        assert_eq!(o.kth_radius(0, 3), 5.0);

        // Distances {1, 2, 3}: third smallest is 3.
        let d2 = ds(&col(&[0.0, 1.0, 2.0, 3.0]), &col(&[0.0, 0.0, 0.0, 0.0]));
        let o2 = build_index(&d2, &oracle_cfg(3)).unwrap();
        assert_eq!(o2.kth_radius(0, 3), 3.0);

        // Four identical points: every radius is zero.
        let d3 = ds(&col(&[2.0; 4]), &col(&[2.0; 4]));
        let o3 = build_index(&d3, &oracle_cfg(1)).unwrap();
        for i in 0..4 {
            assert_eq!(o3.kth_radius(i, 1), 0.0);
        }
    }

    #[test]
    fn coincidence_counts_exclude_self() {
        // Five copies of one point: any query sees the other four.
        let d = ds(&col(&[3.0; 5]), &col(&[-1.0; 5]));
        let o = build_index(&d, &oracle_cfg(1)).unwrap();
        for i in 0..5 {
            assert_eq!(o.count_joint_at_zero(i), 4);
        }

        // All distinct: zero coincidences.
        let d2 = ds(&col(&[0.0, 1.0, 2.0]), &col(&[0.0, 1.0, 2.0]));
        let o2 = build_index(&d2, &oracle_cfg(1)).unwrap();
        for i in 0..3 {
            assert_eq!(o2.count_joint_at_zero(i), 0);
        }

        // 3 copies of A, 2 of B: querying an A sees 2 other copies.
        let d3 = ds(&col(&[0.0, 0.0, 0.0, 9.0, 9.0]), &col(&[0.0; 5]));
        let o3 = build_index(&d3, &oracle_cfg(1)).unwrap();
        assert_eq!(o3.count_joint_at_zero(0), 2);
        assert_eq!(o3.count_joint_at_zero(3), 1);
    }

    #[test]
    fn marginal_counts_are_inclusive_and_self_excluding() {
        let d = ds(&col(&[0.0, 1.0, 2.0, 5.0]), &col(&[0.0; 4]));
        let o = build_index(&d, &oracle_cfg(1)).unwrap();
        // Inclusive boundary: the point at exactly 2 counts.
        assert_eq!(o.count_marginal_within(Side::X, 0, 2.0), 2);
        assert_eq!(o.count_marginal_within(Side::X, 0, 100.0), 3);

        // r = 0 with duplicates equals the equality count.
        let d2 = ds(&col(&[1.0, 1.0, 1.0, 1.0, 7.0]), &col(&[0.0; 5]));
        let o2 = build_index(&d2, &oracle_cfg(1)).unwrap();
        assert_eq!(o2.count_marginal_within(Side::X, 0, 0.0), 3);
    }

    #[test]
    fn build_index_enforces_k() {
        let one = ds(&col(&[0.0]), &col(&[0.0]));
        assert!(build_index(&one, &oracle_cfg(1)).is_err());
        let two = ds(&col(&[0.0, 1.0]), &col(&[0.0, 1.0]));
        assert!(build_index(&two, &oracle_cfg(1)).is_ok());
    }

    #[test]
    fn profile_matches_individual_queries() {
        let d = ds(
            &col(&[0.0, 0.0, 1.0, 2.0, 2.0, 7.0]),
            &col(&[0.0, 0.0, 1.0, 0.5, 0.5, 3.0]),
        );
        let o = build_index(&d, &oracle_cfg(2)).unwrap();
        for i in 0..d.n() {
            let p = o.profile(i, 2);
            let rho = o.kth_radius(i, 2);
            assert_eq!(p.rho, rho);
            if rho == 0.0 {
                assert_eq!(p.k_tilde, o.count_joint_at_zero(i));
                assert_eq!(p.n_x, o.count_marginal_within(Side::X, i, 0.0));
                assert_eq!(p.n_y, o.count_marginal_within(Side::Y, i, 0.0));
                assert!(p.n_x >= p.k_tilde && p.n_y >= p.k_tilde);
            } else {
                assert_eq!(p.k_tilde, 2);
                assert_eq!(p.n_x, o.count_marginal_strictly_within(Side::X, i, rho));
                assert_eq!(p.n_y, o.count_marginal_strictly_within(Side::Y, i, rho));
            }
            // The inclusive count always dominates the effective count.
            assert!(o.count_marginal_within(Side::X, i, rho) >= p.k_tilde);
            assert!(o.count_marginal_within(Side::Y, i, rho) >= p.k_tilde);
        }
    }

    #[test]
    fn atom_tolerance_groups_near_coincident_points() {
        let d = ds(
            &col(&[0.0, 1e-9, 5e-9, 1.0]),
            &col(&[0.0, -1e-9, 2e-9, 1.0]),
        );
        let cfg = EstimatorConfig {
            k: 1,
            atom_tolerance: 1e-8,
            ..Default::default()
        };
        let o = build_index(&d, &cfg).unwrap();
        let p = o.profile(0, 1);
        assert_eq!(p.k_tilde, 2);
        assert!(p.n_x >= p.k_tilde && p.n_y >= p.k_tilde);
    }
}
