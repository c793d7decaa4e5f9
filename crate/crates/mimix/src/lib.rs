//! Mutual information estimation for discrete, continuous, and mixed data.
//!
//! Classical MI estimators assume the joint distribution either has a
//! density everywhere or is purely discrete. Real data is often neither:
//! a zero-inflated read count is discrete at zero and continuous elsewhere,
//! and a pair may mix a categorical coordinate with a measured one. This
//! crate implements a k-nearest-neighbor estimator that handles all of
//! these by detecting atoms through coincident samples and switching to a
//! plug-in style count exactly there, plus four baselines to compare
//! against (KSG, noisy KSG, fixed partition, adaptive partition), seeded
//! generators for benchmark mixtures with known ground truth, and the
//! evaluation protocols (MSE sweeps, feature ranking, ROC/AUROC) used to
//! judge them.
//!
//! ```
//! use mimix::{estimate_mixed, EstimatorConfig};
//! use mimix::synthgen::gen_exp2;
//!
//! // X uniform over {0..4}, Y uniform over [X, X+2]: true MI ~ 1.055 nats.
//! let ds = gen_exp2(4000, 5, 7).unwrap();
//! let est = estimate_mixed(&ds, &EstimatorConfig::with_k(5)).unwrap();
//! assert!((est.value - 1.055).abs() < 0.1);
//! ```
//!
//! The `book/` directory in the repository walks through the concepts; its
//! code listings compile as doc-tests of this crate.

pub mod dataset;
mod error;
pub mod estimators;
pub mod eval;
mod fsum;
pub mod io;
pub mod neighbors;
pub mod seeds;
pub mod specfun;
pub mod synthgen;

pub use dataset::{
    validate_dataset, ConfigEcho, Dataset, EstimatorConfig, MiEstimate, NeighborProfile, Norm,
};
pub use error::{Error, ErrorClass, Result, Side};
pub use estimators::{
    estimate_adaptive_partition, estimate_fixed_partition, estimate_ksg, estimate_mixed,
    estimate_noisy_ksg, k_schedule, Estimator, NoiseConfig, PartitionConfig,
};
pub use eval::{auroc, mse_sweep, rank_features, roc_curve, FeatureScore, RocCurve, SweepResult};
pub use synthgen::{
    apply_dropout, gen_exp1, gen_exp2, gen_exp3, gen_exp4, gen_featsel, ground_truth,
    GeneratorKind, GeneratorSpec, GroundTruth, Provenance, TargetNoise,
};

// The guide chapters double as doc-tests so their listings cannot rot.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(mixtures, "../../../book/src/mixtures.md");
    chapter!(mixed_estimator, "../../../book/src/mixed-estimator.md");
    chapter!(baselines, "../../../book/src/baselines.md");
    chapter!(generators, "../../../book/src/generators.md");
    chapter!(evaluation, "../../../book/src/evaluation.md");
    chapter!(reproducibility, "../../../book/src/reproducibility.md");
}
