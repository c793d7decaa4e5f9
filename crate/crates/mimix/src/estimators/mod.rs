//! The five mutual information estimators.
//!
//! The mixed estimator walks every sample and finds its k-th neighbor radius
//! rho in the joint space. A zero radius means the sample sits on an atom:
//! with k~ coincident samples and inclusive marginal counts n_x, n_y at the
//! coincidence tolerance it scores the plug-in form
//!
//! `xi_i = psi(k~_i) + ln N - ln(n_x,i + 1) - ln(n_y,i + 1)`.
//!
//! A positive radius means the neighborhood is continuous and the sample
//! scores the k-NN form with strict marginal counts inside rho,
//!
//! `xi_i = psi(k) + ln N - psi(n_x,i + 1) - psi(n_y,i + 1)`,
//!
//! whose digamma terms cancel the inverse-count bias of finite
//! neighborhoods. The estimate is the mean of the `xi_i`. On purely
//! continuous data the radius is never zero and the estimator coincides
//! bitwise with the KSG baseline, which uses k unconditionally; on purely
//! discrete data it tracks the plug-in estimator.
//!
//! Baselines: plain KSG, KSG after seeded Gaussian jitter, an equal-width
//! partition plug-in, and a recursive adaptive partition for scalar pairs.
//!
//! Per-sample work runs in parallel; the final mean is an exactly rounded
//! sum accumulated in index order, so results are bit-identical across
//! thread counts and row orderings.

mod partition;

pub use partition::{estimate_adaptive_partition, estimate_fixed_partition, PartitionConfig};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{ConfigEcho, Dataset, EstimatorConfig, MiEstimate};
use crate::error::{Error, Result};
use crate::fsum::fsum;
use crate::neighbors::{build_index, Scratch};
use crate::seeds::rng_from;
use crate::specfun::digamma_int;

/// Gaussian jitter applied by the noisy-KSG baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Standard deviation of the noise added to every coordinate.
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::invalid_parameter("sigma", "must be finite and > 0"));
        }
        Ok(())
    }
}

fn knn_estimate(
    dataset: &Dataset,
    config: &EstimatorConfig,
    atom_aware: bool,
    name: &str,
    echo: ConfigEcho,
) -> Result<MiEstimate> {
    let oracle = build_index(dataset, config)?;
    let n = dataset.n();
    let k = config.k;
    let ln_n = (n as f64).ln();

    let atom_tolerance = config.atom_tolerance;
    let per_sample: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, i| {
            let p = oracle.profile_into(i, k, scratch);
            if p.rho <= atom_tolerance {
                let k_tilde = if atom_aware { p.k_tilde } else { k };
                digamma_int(k_tilde) + ln_n
                    - ((p.n_x + 1) as f64).ln()
                    - ((p.n_y + 1) as f64).ln()
            } else {
                digamma_int(k) + ln_n - digamma_int(p.n_x + 1) - digamma_int(p.n_y + 1)
            }
        })
        .collect();

    let value = fsum(&per_sample) / n as f64;
    debug_assert!(value.is_finite());
    Ok(MiEstimate {
        value,
        per_sample,
        estimator_name: name.to_string(),
        config_echo: echo,
    })
}

/// The mixed-data estimator: atom-aware k-NN scoring as described in the
/// module docs. Handles discrete, continuous, and mixture distributions.
pub fn estimate_mixed(dataset: &Dataset, config: &EstimatorConfig) -> Result<MiEstimate> {
    knn_estimate(
        dataset,
        config,
        true,
        "mixed",
        ConfigEcho::Knn { config: *config },
    )
}

/// The KSG baseline in its log form: identical pipeline but the digamma
/// argument is always k, with no correction at atoms.
pub fn estimate_ksg(dataset: &Dataset, config: &EstimatorConfig) -> Result<MiEstimate> {
    knn_estimate(
        dataset,
        config,
        false,
        "ksg",
        ConfigEcho::Knn { config: *config },
    )
}

/// Copy of `dataset` with independent N(0, sigma^2) noise added to every
/// coordinate of every sample, in row order. Exposed so the jittered input
/// to [`estimate_noisy_ksg`] can be examined or reproduced.
pub fn add_gaussian_noise(dataset: &Dataset, noise: &NoiseConfig) -> Result<Dataset> {
    noise.validate()?;
    let mut rng = rng_from(noise.seed);
    let mut draw = |v: f64| {
        let z: f64 = StandardNormal.sample(&mut rng);
        v + noise.sigma * z
    };
    let x: Vec<Vec<f64>> = (0..dataset.n())
        .map(|i| dataset.x_row(i).iter().map(|&v| draw(v)).collect())
        .collect();
    let y: Vec<Vec<f64>> = (0..dataset.n())
        .map(|i| dataset.y_row(i).iter().map(|&v| draw(v)).collect())
        .collect();
    crate::dataset::validate_dataset(&x, &y)
}

/// Noisy-KSG baseline: jitter every coordinate with seeded Gaussian noise to
/// break coincidences, then run [`estimate_ksg`] on the perturbed copy. The
/// original dataset is untouched.
pub fn estimate_noisy_ksg(
    dataset: &Dataset,
    config: &EstimatorConfig,
    noise: &NoiseConfig,
) -> Result<MiEstimate> {
    let perturbed = add_gaussian_noise(dataset, noise)?;
    let mut est = estimate_ksg(&perturbed, config)?;
    est.estimator_name = "noisy_ksg".to_string();
    est.config_echo = ConfigEcho::NoisyKnn {
        config: *config,
        sigma: noise.sigma,
        noise_seed: noise.seed,
    };
    Ok(est)
}

/// Neighbor-order schedule `ceil(n^(1/3))` satisfying the growth conditions
/// under which the mixed estimator is consistent (k grows, k log n / n
/// vanishes). Not the default; the benchmarks pin k = 5.
pub fn k_schedule(n: usize) -> usize {
    // Integer correction keeps the float cube root honest at perfect cubes.
    let mut k = (n as f64).powf(1.0 / 3.0).ceil().max(1.0) as usize;
    while k > 1 && (k - 1) * (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    while k * k * k < n {
        k += 1;
    }
    k
}

/// One of the five estimators with its configuration, ready to run. This is
/// the unit the benchmark harness and the CLI pass around.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    Mixed { config: EstimatorConfig },
    Ksg { config: EstimatorConfig },
    NoisyKsg { config: EstimatorConfig, sigma: f64 },
    FixedPartition { config: PartitionConfig },
    AdaptivePartition { config: PartitionConfig },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Mixed { .. } => "mixed",
            Estimator::Ksg { .. } => "ksg",
            Estimator::NoisyKsg { .. } => "noisy_ksg",
            Estimator::FixedPartition { .. } => "fixed_partition",
            Estimator::AdaptivePartition { .. } => "adaptive_partition",
        }
    }

    /// Run the estimator. `seed` feeds stochastic estimators (currently only
    /// the noisy-KSG jitter); deterministic estimators ignore it.
    pub fn estimate(&self, dataset: &Dataset, seed: u64) -> Result<MiEstimate> {
        match self {
            Estimator::Mixed { config } => estimate_mixed(dataset, config),
            Estimator::Ksg { config } => estimate_ksg(dataset, config),
            Estimator::NoisyKsg { config, sigma } => estimate_noisy_ksg(
                dataset,
                config,
                &NoiseConfig {
                    sigma: *sigma,
                    seed,
                },
            ),
            Estimator::FixedPartition { config } => estimate_fixed_partition(dataset, config),
            Estimator::AdaptivePartition { config } => {
                estimate_adaptive_partition(dataset, config)
            }
        }
    }
}
