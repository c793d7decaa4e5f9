//! Partition-based plug-in estimators: fixed equal-width binning for any
//! dimensionality, and a recursive median-split scheme for scalar pairs that
//! only refines where a chi-square test finds structure.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dataset::{ConfigEcho, Dataset, MiEstimate};
use crate::error::{Error, Result};
use crate::fsum::fsum;

/// Parameters for both partition estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Equal-width bins per dimension (fixed estimator). At least 2.
    pub bins_per_dim: usize,
    /// Significance level of the adaptive split test, in (0, 1).
    pub significance: f64,
    /// Adaptive recursion floor: a cell is only split when it holds at
    /// least `4 * min_cell` points.
    pub min_cell: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            bins_per_dim: 8,
            significance: 0.05,
            min_cell: 4,
        }
    }
}

impl PartitionConfig {
    fn validate_fixed(&self) -> Result<()> {
        if self.bins_per_dim < 2 {
            return Err(Error::invalid_parameter("bins_per_dim", "must be >= 2"));
        }
        Ok(())
    }

    fn validate_adaptive(&self) -> Result<()> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::invalid_parameter(
                "significance",
                "must lie strictly between 0 and 1",
            ));
        }
        if self.min_cell < 1 {
            return Err(Error::invalid_parameter("min_cell", "must be >= 1"));
        }
        Ok(())
    }
}

/// Empirical plug-in MI from joint and marginal cell counts:
/// sum over joint cells of (c/N) ln(c N / (c_x c_y)). Nonnegative up to
/// rounding; float dust below 1e-12 is snapped to zero.
fn plugin_mi(joint: &HashMap<(u64, u64), usize>, n: usize) -> f64 {
    let mut x_counts: HashMap<u64, usize> = HashMap::new();
    let mut y_counts: HashMap<u64, usize> = HashMap::new();
    for (&(xc, yc), &c) in joint {
        *x_counts.entry(xc).or_default() += c;
        *y_counts.entry(yc).or_default() += c;
    }
    // Deterministic cell order so the sum is value-based, not map-order-based.
    let mut cells: Vec<(&(u64, u64), &usize)> = joint.iter().collect();
    cells.sort_unstable_by_key(|(key, _)| **key);
    let nf = n as f64;
    let terms: Vec<f64> = cells
        .iter()
        .map(|(&(xc, yc), &c)| {
            let cx = x_counts[&xc] as f64;
            let cy = y_counts[&yc] as f64;
            (c as f64 / nf) * ((c as f64) * nf / (cx * cy)).ln()
        })
        .collect();
    let value = fsum(&terms);
    if value < 0.0 && value > -1e-12 {
        0.0
    } else {
        value
    }
}

fn bin_labels(dataset: &Dataset, bins: usize, side_x: bool) -> Vec<u64> {
    let (dim, rows): (usize, Vec<&[f64]>) = if side_x {
        (dataset.x_dim(), dataset.x_rows().collect())
    } else {
        (dataset.y_dim(), dataset.y_rows().collect())
    };
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for row in &rows {
        for d in 0..dim {
            lo[d] = lo[d].min(row[d]);
            hi[d] = hi[d].max(row[d]);
        }
    }
    rows.iter()
        .map(|row| {
            let mut key = 0u64;
            for d in 0..dim {
                let width = hi[d] - lo[d];
                let idx = if width == 0.0 {
                    0
                } else {
                    // Max boundary inclusive: clamp the top edge into the
                    // last bin.
                    (((row[d] - lo[d]) / width * bins as f64) as usize).min(bins - 1)
                };
                key = key * bins as u64 + idx as u64;
            }
            key
        })
        .collect()
}

/// Quantize each dimension into equal-width bins spanning its observed
/// range, then evaluate the plug-in MI of the resulting label table.
pub fn estimate_fixed_partition(
    dataset: &Dataset,
    config: &PartitionConfig,
) -> Result<MiEstimate> {
    config.validate_fixed()?;
    let xs = bin_labels(dataset, config.bins_per_dim, true);
    let ys = bin_labels(dataset, config.bins_per_dim, false);
    let mut joint: HashMap<(u64, u64), usize> = HashMap::new();
    for (&xc, &yc) in xs.iter().zip(&ys) {
        *joint.entry((xc, yc)).or_default() += 1;
    }
    let value = plugin_mi(&joint, dataset.n());
    Ok(MiEstimate {
        value,
        per_sample: Vec::new(),
        estimator_name: "fixed_partition".to_string(),
        config_echo: ConfigEcho::Partition { config: *config },
    })
}

struct AdaptiveState<'a> {
    xs: Vec<f64>,
    ys: Vec<f64>,
    critical: f64,
    min_split: usize,
    terms: Vec<f64>,
    dataset: &'a Dataset,
}

struct CellBounds {
    // Half-open on the low side: lo < v <= hi, with infinities at the root.
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

fn median_of(sorted_scratch: &mut [f64]) -> f64 {
    sorted_scratch.sort_unstable_by(f64::total_cmp);
    let m = sorted_scratch.len();
    if m % 2 == 1 {
        sorted_scratch[m / 2]
    } else {
        0.5 * (sorted_scratch[m / 2 - 1] + sorted_scratch[m / 2])
    }
}

impl AdaptiveState<'_> {
    fn recurse(&mut self, members: Vec<usize>, bounds: CellBounds) {
        let count = members.len();
        if count >= self.min_split {
            let mut vals: Vec<f64> = members.iter().map(|&i| self.xs[i]).collect();
            let mx = median_of(&mut vals);
            vals.clear();
            vals.extend(members.iter().map(|&i| self.ys[i]));
            let my = median_of(&mut vals);

            let mut quads: [Vec<usize>; 4] = Default::default();
            for &i in &members {
                let qx = (self.xs[i] > mx) as usize;
                let qy = (self.ys[i] > my) as usize;
                quads[qy * 2 + qx].push(i);
            }
            let expected = count as f64 / 4.0;
            let stat: f64 = quads
                .iter()
                .map(|q| {
                    let d = q.len() as f64 - expected;
                    d * d / expected
                })
                .sum();
            // A split that leaves everything in one quadrant cannot make
            // progress (all coordinates coincide); treat the cell as a leaf.
            let degenerate = quads.iter().any(|q| q.len() == count);
            if stat > self.critical && !degenerate {
                let child_bounds = |qx: usize, qy: usize| CellBounds {
                    x_lo: if qx == 0 { bounds.x_lo } else { mx },
                    x_hi: if qx == 0 { mx } else { bounds.x_hi },
                    y_lo: if qy == 0 { bounds.y_lo } else { my },
                    y_hi: if qy == 0 { my } else { bounds.y_hi },
                };
                for (q, members) in quads.into_iter().enumerate() {
                    if !members.is_empty() {
                        self.recurse(members, child_bounds(q % 2, q / 2));
                    }
                }
                return;
            }
        }
        self.leaf(count, bounds);
    }

    fn leaf(&mut self, count: usize, bounds: CellBounds) {
        let n = self.dataset.n() as f64;
        let p_xy = count as f64 / n;
        // Marginal masses come from the full sample, restricted to the
        // leaf's coordinate intervals.
        let in_x = self
            .xs
            .iter()
            .filter(|&&v| v > bounds.x_lo && v <= bounds.x_hi)
            .count() as f64;
        let in_y = self
            .ys
            .iter()
            .filter(|&&v| v > bounds.y_lo && v <= bounds.y_hi)
            .count() as f64;
        let p_x = in_x / n;
        let p_y = in_y / n;
        self.terms.push(p_xy * (p_xy / (p_x * p_y)).ln());
    }
}

/// Recursive median-split plug-in estimator for scalar X and Y. Each cell is
/// cut at its marginal medians into four quadrants; the cut is kept only if
/// a chi-square test rejects equidistribution over the quadrants at the
/// configured significance and the cell holds at least `4 * min_cell`
/// points. MI is the plug-in sum over the resulting leaves.
pub fn estimate_adaptive_partition(
    dataset: &Dataset,
    config: &PartitionConfig,
) -> Result<MiEstimate> {
    config.validate_adaptive()?;
    if dataset.x_dim() != 1 || dataset.y_dim() != 1 {
        return Err(Error::DimensionUnsupported {
            estimator: "adaptive_partition",
            x_dim: dataset.x_dim(),
            y_dim: dataset.y_dim(),
        });
    }
    // Chi-square with 3 degrees of freedom (4 quadrants).
    let critical = ChiSquared::new(3.0)
        .expect("valid dof")
        .inverse_cdf(1.0 - config.significance);

    let mut state = AdaptiveState {
        xs: dataset.x_rows().map(|r| r[0]).collect(),
        ys: dataset.y_rows().map(|r| r[0]).collect(),
        critical,
        min_split: 4 * config.min_cell,
        terms: Vec::new(),
        dataset,
    };
    let all: Vec<usize> = (0..dataset.n()).collect();
    state.recurse(
        all,
        CellBounds {
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        },
    );
    let value = fsum(&state.terms);
    Ok(MiEstimate {
        value,
        per_sample: Vec::new(),
        estimator_name: "adaptive_partition".to_string(),
        config_echo: ConfigEcho::Partition { config: *config },
    })
}
