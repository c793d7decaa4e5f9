//! Property tests for the structural invariants: value-based counting,
//! permutation and translation exactness, curve monotonicity, and the CSV
//! round trip.

use mimix::neighbors::build_index;
use mimix::*;
use proptest::prelude::*;

/// Lattice-valued rows: coarse enough to produce duplicates, exact under
/// integer translation.
fn lattice_rows(n: usize, dim: usize, levels: u32, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = seeds::rng_from(seed);
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| (rng.random::<u32>() % levels) as f64 / f64::from(1 << 20))
                .collect()
        })
        .collect()
}

fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut rng = seeds::rng_from(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

fn bits(v: f64) -> u64 {
    v.to_bits()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neighbor_counts_satisfy_branch_invariants(
        seed in 0u64..1_000_000,
        n in 8usize..60,
        x_dim in 1usize..3,
        y_dim in 1usize..3,
        k in 1usize..6,
    ) {
        prop_assume!(k < n);
        let x = lattice_rows(n, x_dim, 6, seed);
        let y = lattice_rows(n, y_dim, 6, seed ^ 0xabcdef);
        let ds = validate_dataset(&x, &y).unwrap();
        let cfg = EstimatorConfig { k, ..Default::default() };
        let oracle = build_index(&ds, &cfg).unwrap();
        for i in 0..n {
            let rho = oracle.kth_radius(i, k);
            // Inclusive counting at the radius can exceed k under ties,
            // never fall short.
            prop_assert!(oracle.count_joint_within(i, rho) >= k);
            let p = oracle.profile(i, k);
            prop_assert_eq!(bits(p.rho), bits(rho));
            if rho == 0.0 {
                prop_assert!(p.k_tilde >= k);
                prop_assert!(p.n_x >= p.k_tilde && p.n_y >= p.k_tilde);
            } else {
                prop_assert_eq!(p.k_tilde, k);
            }
            prop_assert!(oracle.count_marginal_within(Side::X, i, rho) >= p.k_tilde);
            prop_assert!(oracle.count_marginal_within(Side::Y, i, rho) >= p.k_tilde);
        }
    }

    #[test]
    fn permuting_rows_permutes_answers(
        seed in 0u64..1_000_000,
        n in 8usize..40,
        k in 1usize..5,
    ) {
        prop_assume!(k < n);
        let x = lattice_rows(n, 2, 5, seed);
        let y = lattice_rows(n, 1, 5, seed ^ 0x5a5a);
        let ds = validate_dataset(&x, &y).unwrap();
        let perm = random_perm(n, seed ^ 0x77);
        let pds = ds.permuted(&perm);
        let cfg = EstimatorConfig { k, ..Default::default() };
        let a = build_index(&ds, &cfg).unwrap();
        let b = build_index(&pds, &cfg).unwrap();
        for i in 0..n {
            let pa = a.profile(perm[i], k);
            let pb = b.profile(i, k);
            prop_assert_eq!(pa, pb);
        }
    }

    #[test]
    fn knn_estimates_are_permutation_exact(
        seed in 0u64..1_000_000,
        n in 10usize..48,
        k in 1usize..5,
    ) {
        prop_assume!(k < n);
        let x = lattice_rows(n, 1, 4, seed);
        let y = lattice_rows(n, 2, 4, seed ^ 0x1234);
        let ds = validate_dataset(&x, &y).unwrap();
        let perm = random_perm(n, seed ^ 0x99);
        let pds = ds.permuted(&perm);
        let cfg = EstimatorConfig { k, ..Default::default() };
        let m0 = estimate_mixed(&ds, &cfg).unwrap();
        let m1 = estimate_mixed(&pds, &cfg).unwrap();
        prop_assert_eq!(bits(m0.value), bits(m1.value));
        let k0 = estimate_ksg(&ds, &cfg).unwrap();
        let k1 = estimate_ksg(&pds, &cfg).unwrap();
        prop_assert_eq!(bits(k0.value), bits(k1.value));
        // Per-sample contributions are carried along by the permutation.
        for i in 0..n {
            prop_assert_eq!(bits(m0.per_sample[perm[i]]), bits(m1.per_sample[i]));
        }
    }

    #[test]
    fn translation_is_exact_on_lattice_data(
        seed in 0u64..1_000_000,
        n in 10usize..40,
        shift_x in -50i32..50,
        shift_y in -50i32..50,
    ) {
        let x = lattice_rows(n, 1, 8, seed);
        let y = lattice_rows(n, 1, 8, seed ^ 0x4242);
        let ds = validate_dataset(&x, &y).unwrap();
        let tds = ds.translated(&[f64::from(shift_x)], &[f64::from(shift_y)]);
        let cfg = EstimatorConfig::with_k(3.min(n - 1));
        let a = estimate_mixed(&ds, &cfg).unwrap();
        let b = estimate_mixed(&tds, &cfg).unwrap();
        prop_assert_eq!(bits(a.value), bits(b.value));
        let pa = estimate_fixed_partition(&ds, &PartitionConfig::default()).unwrap();
        let pb = estimate_fixed_partition(&tds, &PartitionConfig::default()).unwrap();
        prop_assert_eq!(bits(pa.value), bits(pb.value));
    }

    #[test]
    fn partition_estimates_are_nonnegative_and_permutation_exact(
        seed in 0u64..1_000_000,
        n in 8usize..64,
        bins in 2usize..6,
    ) {
        let x = lattice_rows(n, 1, 7, seed);
        let y = lattice_rows(n, 1, 7, seed ^ 0x8888);
        let ds = validate_dataset(&x, &y).unwrap();
        let cfg = PartitionConfig { bins_per_dim: bins, ..Default::default() };
        let a = estimate_fixed_partition(&ds, &cfg).unwrap();
        prop_assert!(a.value >= 0.0);
        let pds = ds.permuted(&random_perm(n, seed ^ 0x31));
        let b = estimate_fixed_partition(&pds, &cfg).unwrap();
        prop_assert_eq!(bits(a.value), bits(b.value));
        let aa = estimate_adaptive_partition(&ds, &PartitionConfig::default()).unwrap();
        let ab = estimate_adaptive_partition(&pds, &PartitionConfig::default()).unwrap();
        prop_assert_eq!(bits(aa.value), bits(ab.value));
    }

    #[test]
    fn csv_round_trip_is_lossless(
        rows in proptest::collection::vec(
            (any::<f64>(), any::<f64>(), -1_000_000i64..1_000_000),
            1..60,
        )
    ) {
        let x: Vec<Vec<f64>> = rows
            .iter()
            .map(|(a, b, _)| vec![finite(*a), finite(*b)])
            .collect();
        let y: Vec<Vec<f64>> = rows.iter().map(|(_, _, c)| vec![*c as f64]).collect();
        let ds = validate_dataset(&x, &y).unwrap();
        let mut buf = Vec::new();
        io::write_dataset(&ds, &mut buf).unwrap();
        let back = io::read_dataset(buf.as_slice(), &[0, 1], &[2]).unwrap();
        prop_assert_eq!(ds, back);
    }

    #[test]
    fn roc_curves_are_monotone_and_auroc_flips(
        scored in proptest::collection::vec((0u8..40, any::<bool>()), 4..120),
    ) {
        let scores: Vec<f64> = scored.iter().map(|(s, _)| f64::from(*s)).collect();
        let labels: Vec<bool> = scored.iter().map(|(_, l)| *l).collect();
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let curve = roc_curve(&scores, &labels).unwrap();
        prop_assert_eq!(curve.points[0], (0.0, 0.0));
        prop_assert_eq!(*curve.points.last().unwrap(), (1.0, 1.0));
        for w in curve.points.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
        let a = auroc(&curve);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        // Negation identity (ties group symmetrically).
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = auroc(&roc_curve(&neg, &labels).unwrap());
        prop_assert!((a + b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn validate_dataset_names_injected_nan(
        n in 2usize..30,
        row in 0usize..30,
        col in 0usize..2,
        on_x in any::<bool>(),
    ) {
        prop_assume!(row < n);
        let mut x = lattice_rows(n, 2, 9, 7);
        let mut y = lattice_rows(n, 2, 9, 8);
        if on_x { x[row][col] = f64::INFINITY; } else { y[row][col] = f64::NAN; }
        match validate_dataset(&x, &y).unwrap_err() {
            Error::NonFinite { side, row: r, col: c } => {
                prop_assert_eq!(r, row);
                prop_assert_eq!(c, col);
                prop_assert_eq!(side == Side::X, on_x);
            }
            other => prop_assert!(false, "unexpected error {other:?}"),
        }
    }
}

/// Clamp arbitrary floats into finite territory without losing variety.
fn finite(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.25
    }
}

/// A sweep gives the same answer regardless of how many threads execute it.
#[test]
fn sweep_is_thread_count_invariant() {
    let spec = GeneratorSpec::new(GeneratorKind::Exp2 { m: 4 }, 0);
    let est = Estimator::Mixed {
        config: EstimatorConfig::with_k(3),
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| mse_sweep(&est, &spec, &[64, 128], 6, 42).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.mse_per_size, b.mse_per_size);
    assert_eq!(a.mean_bias_per_size, b.mean_bias_per_size);
}

/// Noise is assigned by sample identity, so jitter-then-permute equals the
/// noisy estimator bit for bit.
#[test]
fn noisy_ksg_permutation_identity() {
    let x = lattice_rows(60, 1, 4, 3);
    let y = lattice_rows(60, 2, 4, 4);
    let ds = validate_dataset(&x, &y).unwrap();
    let cfg = EstimatorConfig::with_k(4);
    let noise = NoiseConfig {
        sigma: 0.25,
        seed: 11,
    };
    let direct = estimate_noisy_ksg(&ds, &cfg, &noise).unwrap();
    let jittered = estimators::add_gaussian_noise(&ds, &noise).unwrap();
    let perm = random_perm(60, 5);
    let permuted = estimate_ksg(&jittered.permuted(&perm), &cfg).unwrap();
    assert_eq!(direct.value.to_bits(), permuted.value.to_bits());
}
