//! Benchmark protocols: MSE sweeps over sample sizes, feature ranking by
//! estimated MI, and ROC/AUROC scoring of rankings.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::validate_dataset;
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::fsum::fsum;
use crate::seeds::child_seed;
use crate::synthgen::{ground_truth, GeneratorSpec};

/// MSE and bias of one estimator against one generator's ground truth,
/// per sample size, averaged over independent trials.
#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub estimator_name: String,
    pub generator: GeneratorSpec,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub mse_per_size: Vec<f64>,
    pub mean_bias_per_size: Vec<f64>,
    /// Master seed; trial t at size index s runs on
    /// `child_seed(master_seed, (s << 32) | t)`.
    pub master_seed: u64,
}

/// Run `trials` independent generate-and-estimate rounds at every size.
/// Trials execute in parallel but are position-seeded, so the result is a
/// pure function of the arguments.
pub fn mse_sweep(
    estimator: &Estimator,
    spec: &GeneratorSpec,
    sizes: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    if trials == 0 {
        return Err(Error::invalid_parameter("trials", "must be >= 1"));
    }
    if sizes.is_empty() {
        return Err(Error::invalid_parameter("sizes", "must be nonempty"));
    }
    let truth = ground_truth(spec)?.value;

    let mut mse_per_size = Vec::with_capacity(sizes.len());
    let mut bias_per_size = Vec::with_capacity(sizes.len());
    for (si, &n) in sizes.iter().enumerate() {
        let errors: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let trial_seed = child_seed(master_seed, ((si as u64) << 32) | t as u64);
                let ds = spec.with_seed(trial_seed).generate(n)?;
                let est = estimator.estimate(&ds, child_seed(trial_seed, 1))?;
                Ok(est.value - truth)
            })
            .collect::<Result<Vec<f64>>>()?;
        let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
        mse_per_size.push(fsum(&sq) / trials as f64);
        bias_per_size.push(fsum(&errors) / trials as f64);
    }
    Ok(SweepResult {
        estimator_name: estimator.name().to_string(),
        generator: *spec,
        sample_sizes: sizes.to_vec(),
        trials,
        mse_per_size,
        mean_bias_per_size: bias_per_size,
        master_seed,
    })
}

/// One feature's estimated MI against the target.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FeatureScore {
    pub index: usize,
    pub score: f64,
}

/// Score every feature column against the (possibly multi-dimensional)
/// target and order by descending MI, ties broken by ascending index.
/// `features` holds one column per feature; `target` holds n rows.
pub fn rank_features(
    features: &[Vec<f64>],
    target: &[Vec<f64>],
    estimator: &Estimator,
    seed: u64,
) -> Result<Vec<FeatureScore>> {
    if features.is_empty() {
        return Err(Error::invalid_parameter("features", "need at least one"));
    }
    let mut scores: Vec<FeatureScore> = features
        .par_iter()
        .enumerate()
        .map(|(index, column)| -> Result<FeatureScore> {
            let x_rows: Vec<Vec<f64>> = column.iter().map(|&v| vec![v]).collect();
            let ds = validate_dataset(&x_rows, target).map_err(|e| Error::Feature {
                index,
                source: Box::new(e),
            })?;
            let est = estimator
                .estimate(&ds, child_seed(seed, index as u64))
                .map_err(|e| Error::Feature {
                    index,
                    source: Box::new(e),
                })?;
            Ok(FeatureScore {
                index,
                score: est.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    Ok(scores)
}

/// Receiver operating characteristic curve: (false positive rate, true
/// positive rate) points from (0,0) to (1,1), both coordinates
/// nondecreasing.
#[derive(Clone, Debug, Serialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
}

/// Sweep the "select the r highest-scored items" threshold over r = 0..=p.
/// Items with equal scores enter the selection together, so the curve does
/// not depend on any hidden ordering among ties.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::invalid_parameter(
            "labels",
            "must be as many as scores",
        ));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::with_capacity(scores.len() + 1);
    points.push((0.0, 0.0));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        // Take the whole tie group at once.
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        i = j;
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under a ROC curve; lies in [0, 1].
pub fn auroc(curve: &RocCurve) -> f64 {
    let mut area = 0.0;
    for w in curve.points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        area += (x1 - x0) * (y0 + y1) * 0.5;
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::EstimatorConfig;
    use crate::seeds::rng_from;
    use crate::synthgen::GeneratorKind;
    use rand::Rng;

    fn mixed(k: usize) -> Estimator {
        Estimator::Mixed {
            config: EstimatorConfig::with_k(k),
        }
    }

    #[test]
    fn single_trial_mse_is_squared_error() {
        let spec = GeneratorSpec::new(GeneratorKind::Exp2 { m: 5 }, 0);
        let sweep = mse_sweep(&mixed(3), &spec, &[200], 1, 77).unwrap();
        let bias = sweep.mean_bias_per_size[0];
        assert!((sweep.mse_per_size[0] - bias * bias).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = GeneratorSpec::new(GeneratorKind::Exp4 { p: 0.15 }, 0);
        let a = mse_sweep(&mixed(3), &spec, &[100, 200], 4, 5).unwrap();
        let b = mse_sweep(&mixed(3), &spec, &[100, 200], 4, 5).unwrap();
        assert_eq!(a.mse_per_size, b.mse_per_size);
        assert_eq!(a.mean_bias_per_size, b.mean_bias_per_size);
        let c = mse_sweep(&mixed(3), &spec, &[100, 200], 4, 6).unwrap();
        assert_ne!(a.mse_per_size, c.mse_per_size);
    }

    #[test]
    fn sweep_rejects_incompatible_estimator() {
        let spec = GeneratorSpec::new(GeneratorKind::Exp3 { m: 5, dims: 2 }, 0);
        let adaptive = Estimator::AdaptivePartition {
            config: Default::default(),
        };
        assert!(mse_sweep(&adaptive, &spec, &[100], 2, 0).is_err());
    }

    #[test]
    fn copy_feature_outranks_noise_features() {
        let mut rng = rng_from(15);
        let n = 5000;
        let target: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>()]).collect();
        let copy: Vec<f64> = target.iter().map(|r| r[0]).collect();
        let noise: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let ranked = rank_features(&[noise, copy], &target, &mixed(3), 1).unwrap();
        assert_eq!(ranked[0].index, 1);
        assert!(ranked[0].score > ranked[1].score);
        let mut indices: Vec<usize> = ranked.iter().map(|s| s.index).collect();
        indices.sort_unstable();
        assert_eq!(indices, vec![0, 1]);
    }

    #[test]
    fn equal_scores_fall_back_to_index_order() {
        // Constant features yield identical scores; ordering must be by index.
        let target: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let feats: Vec<Vec<f64>> = (0..3).map(|_| vec![1.0; 40]).collect();
        let ranked = rank_features(&feats, &target, &mixed(2), 0).unwrap();
        let indices: Vec<usize> = ranked.iter().map(|s| s.index).collect();
        assert_eq!(indices, vec![0, 1, 2]);
    }

    #[test]
    fn rank_features_attaches_feature_index_to_failures() {
        let target: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let feats: Vec<Vec<f64>> = vec![vec![0.0; 10], vec![0.0; 9]];
        let err = rank_features(&feats, &target, &mixed(2), 0).unwrap_err();
        match err {
            Error::Feature { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn roc_hand_case() {
        let scores = [4.0, 3.0, 2.0, 1.0];
        let labels = [true, false, true, false];
        let curve = roc_curve(&scores, &labels).unwrap();
        assert_eq!(
            curve.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert!((auroc(&curve) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_inverted_rankings() {
        let scores = [5.0, 4.0, 1.0, 0.5];
        let labels = [true, true, false, false];
        let curve = roc_curve(&scores, &labels).unwrap();
        assert!(curve.points.contains(&(0.0, 1.0)));
        assert_eq!(auroc(&curve), 1.0);

        let inverted = [0.5, 1.0, 4.0, 5.0];
        let anti = roc_curve(&inverted, &labels).unwrap();
        assert!(anti.points.contains(&(1.0, 0.0)));
        assert_eq!(auroc(&anti), 0.0);
    }

    #[test]
    fn roc_requires_both_classes() {
        assert!(matches!(
            roc_curve(&[1.0, 2.0], &[true, true]).unwrap_err(),
            Error::DegenerateLabels
        ));
        assert!(matches!(
            roc_curve(&[1.0, 2.0], &[false, false]).unwrap_err(),
            Error::DegenerateLabels
        ));
    }

    #[test]
    fn roc_is_componentwise_monotone_and_bounded() {
        let mut rng = rng_from(3);
        let scores: Vec<f64> = (0..500).map(|_| (rng.random::<u32>() % 16) as f64).collect();
        let labels: Vec<bool> = (0..500).map(|_| rng.random::<f64>() < 0.4).collect();
        let curve = roc_curve(&scores, &labels).unwrap();
        assert_eq!(curve.points[0], (0.0, 0.0));
        assert_eq!(*curve.points.last().unwrap(), (1.0, 1.0));
        for w in curve.points.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
        let a = auroc(&curve);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn negated_scores_flip_auroc() {
        let mut rng = rng_from(4);
        let scores: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        let labels: Vec<bool> = (0..300).map(|_| rng.random::<f64>() < 0.5).collect();
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let a = auroc(&roc_curve(&scores, &labels).unwrap());
        let b = auroc(&roc_curve(&neg, &labels).unwrap());
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}
