use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use mimix::{
    apply_dropout, auroc, gen_featsel, ground_truth, io as mio, mse_sweep, rank_features,
    roc_curve, seeds, validate_dataset, Dataset, Estimator, EstimatorConfig, GeneratorKind,
    GeneratorSpec, MiEstimate, Norm, PartitionConfig, TargetNoise,
};

use crate::manifest::{atomic_write, suffixed, RunManifest};
use crate::CliError;

// ---------------------------------------------------------------------------
// shared option blocks

#[derive(Clone, Copy, Debug, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstChoice {
    Mixed,
    Ksg,
    #[value(name = "noisy-ksg", alias = "noisy")]
    NoisyKsg,
    #[value(name = "fixed-partition", alias = "partition")]
    FixedPartition,
    #[value(name = "adaptive-partition", alias = "adaptive")]
    AdaptivePartition,
}

#[derive(Clone, Copy, Debug, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormOpt {
    /// max-coordinate (l-infinity)
    #[default]
    Max,
    Euclidean,
}

impl From<NormOpt> for Norm {
    fn from(n: NormOpt) -> Norm {
        match n {
            NormOpt::Max => Norm::MaxCoord,
            NormOpt::Euclidean => Norm::Euclidean,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetNoiseOpt {
    #[default]
    Exponential,
    Poisson,
}

impl From<TargetNoiseOpt> for TargetNoise {
    fn from(t: TargetNoiseOpt) -> TargetNoise {
        match t {
            TargetNoiseOpt::Exponential => TargetNoise::Exponential,
            TargetNoiseOpt::Poisson => TargetNoise::Poisson,
        }
    }
}

/// Estimator selection shared by `estimate`, `select`, and `netinfer`.
#[derive(clap::Args, Serialize)]
pub struct EstimatorOpts {
    /// Which estimator to run
    #[arg(long = "est", value_enum, default_value = "mixed")]
    pub est: EstChoice,
    /// Neighbor order for the k-NN estimators
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Norm inside each of the X and Y spaces
    #[arg(long, value_enum, default_value_t)]
    pub norm: NormOpt,
    /// Distance below which points count as coincident
    #[arg(long = "atom-tol", default_value_t = 0.0)]
    pub atom_tol: f64,
    /// Noise standard deviation (required for noisy-ksg)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Bins per dimension for fixed-partition
    #[arg(long, default_value_t = 8)]
    pub bins: usize,
    /// Split-test significance for adaptive-partition
    #[arg(long, default_value_t = 0.05)]
    pub significance: f64,
    /// Adaptive recursion floor
    #[arg(long = "min-cell", default_value_t = 4)]
    pub min_cell: usize,
}

impl EstimatorOpts {
    fn knn_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            k: self.k,
            within_norm: self.norm.into(),
            atom_tolerance: self.atom_tol,
        }
    }

    fn partition_config(&self) -> PartitionConfig {
        PartitionConfig {
            bins_per_dim: self.bins,
            significance: self.significance,
            min_cell: self.min_cell,
        }
    }

    pub fn build(&self) -> Result<Estimator, CliError> {
        Ok(match self.est {
            EstChoice::Mixed => Estimator::Mixed {
                config: self.knn_config(),
            },
            EstChoice::Ksg => Estimator::Ksg {
                config: self.knn_config(),
            },
            EstChoice::NoisyKsg => Estimator::NoisyKsg {
                config: self.knn_config(),
                sigma: self.sigma.ok_or_else(|| {
                    CliError::Parameter("--sigma is required for --est noisy-ksg".into())
                })?,
            },
            EstChoice::FixedPartition => Estimator::FixedPartition {
                config: self.partition_config(),
            },
            EstChoice::AdaptivePartition => Estimator::AdaptivePartition {
                config: self.partition_config(),
            },
        })
    }

    fn needs_seed(&self) -> bool {
        matches!(self.est, EstChoice::NoisyKsg)
    }
}

/// Parse a column list like `0-4,7,9`.
pub fn parse_cols(spec: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let bad = || CliError::Parameter(format!("bad column spec `{part}`"));
        if let Some((a, b)) = part.split_once('-') {
            let lo: usize = a.trim().parse().map_err(|_| bad())?;
            let hi: usize = b.trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Parameter("empty column spec".into()));
    }
    Ok(out)
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))
}

// ---------------------------------------------------------------------------
// estimate

#[derive(clap::Args, Serialize)]
pub struct EstimateArgs {
    /// Input CSV with a header row
    pub input: PathBuf,
    /// Columns forming the X side, e.g. `0-4,7`
    #[arg(long = "x-cols")]
    pub x_cols: String,
    /// Columns forming the Y side
    #[arg(long = "y-cols")]
    pub y_cols: String,
    #[command(flatten)]
    pub est: EstimatorOpts,
    /// Seed for stochastic estimators
    #[arg(long)]
    pub seed: Option<u64>,
    /// Present negative estimates as zero
    #[arg(long = "clip-zero")]
    pub clip_zero: bool,
    /// Also write the result (and a manifest) to this path
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    value: f64,
    estimator: &'a str,
    config: &'a mimix::ConfigEcho,
    n: usize,
}

pub fn run_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let x_cols = parse_cols(&args.x_cols)?;
    let y_cols = parse_cols(&args.y_cols)?;
    let table = mio::read_table_path(&args.input).map_err(CliError::from)?;
    if table.rows.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    let (x, y) = mio::split_columns(&table.rows, &x_cols, &y_cols).map_err(CliError::from)?;
    let dataset = validate_dataset(&x, &y).map_err(CliError::from)?;

    let estimator = args.est.build()?;
    if args.est.needs_seed() && args.seed.is_none() {
        return Err(CliError::Parameter(
            "--seed is required for stochastic estimators".into(),
        ));
    }
    let est = estimator
        .estimate(&dataset, args.seed.unwrap_or_default())
        .map_err(CliError::from)?;
    let value = if args.clip_zero {
        est.value.max(0.0)
    } else {
        est.value
    };
    let report = EstimateReport {
        value,
        estimator: &est.estimator_name,
        config: &est.config_echo,
        n: dataset.n(),
    };
    let line = to_json_line(&report)?;
    println!("{line}");

    if let Some(out) = &args.output {
        atomic_write(out, format!("{line}\n").as_bytes())?;
        let mut manifest = RunManifest::new("estimate", args, args.seed);
        manifest.digest_input(&args.input)?;
        manifest.write(out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen

#[derive(clap::Args, Serialize)]
pub struct GenCommon {
    /// Number of samples to draw
    #[arg(long)]
    pub n: usize,
    /// Master seed
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path
    pub output: PathBuf,
}

#[derive(clap::Subcommand, Serialize)]
pub enum GenArgs {
    /// Equal mixture of a correlated Gaussian and four atoms
    Exp1 {
        #[command(flatten)]
        common: GenCommon,
    },
    /// Discrete X uniform on 0..m, Y uniform on [X, X+2]
    Exp2 {
        #[arg(long, default_value_t = 5)]
        m: u64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Stacked independent exp2 pairs
    Exp3 {
        #[arg(long, default_value_t = 5)]
        m: u64,
        /// Number of stacked pairs (2 or 3)
        #[arg(long, default_value_t = 2)]
        dims: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Exponential X, zero-inflated Poisson Y
    Exp4 {
        #[arg(long, default_value_t = 0.15)]
        p: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Feature-selection benchmark: observed features x0.. and target y0..
    Featsel {
        #[arg(long = "p-total", default_value_t = 20)]
        p_total: usize,
        #[arg(long = "q-relevant", default_value_t = 5)]
        q_relevant: usize,
        #[arg(long, default_value_t = 0.15)]
        dropout: f64,
        #[arg(long = "target-noise", value_enum, default_value_t)]
        target_noise: TargetNoiseOpt,
        #[command(flatten)]
        common: GenCommon,
    },
}

impl GenArgs {
    fn common(&self) -> &GenCommon {
        match self {
            GenArgs::Exp1 { common }
            | GenArgs::Exp2 { common, .. }
            | GenArgs::Exp3 { common, .. }
            | GenArgs::Exp4 { common, .. }
            | GenArgs::Featsel { common, .. } => common,
        }
    }

    fn spec(&self) -> GeneratorSpec {
        let seed = self.common().seed;
        let kind = match *self {
            GenArgs::Exp1 { .. } => GeneratorKind::Exp1,
            GenArgs::Exp2 { m, .. } => GeneratorKind::Exp2 { m },
            GenArgs::Exp3 { m, dims, .. } => GeneratorKind::Exp3 { m, dims },
            GenArgs::Exp4 { p, .. } => GeneratorKind::Exp4 { p },
            GenArgs::Featsel {
                p_total,
                q_relevant,
                dropout,
                target_noise,
                ..
            } => GeneratorKind::FeatSel {
                p_total,
                q_relevant,
                dropout,
                target_noise: target_noise.into(),
            },
        };
        GeneratorSpec::new(kind, seed)
    }
}

fn featsel_dataset(data: &mimix::synthgen::FeatSelData) -> Result<Dataset, CliError> {
    let n = data.target.len();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| data.features.iter().map(|col| col[i]).collect())
        .collect();
    validate_dataset(&x, &data.target).map_err(CliError::from)
}

pub fn run_gen(args: &GenArgs) -> Result<(), CliError> {
    let common = args.common();
    let spec = args.spec();
    let dataset = match spec.kind {
        GeneratorKind::FeatSel {
            p_total,
            q_relevant,
            dropout,
            target_noise,
        } => {
            let data = gen_featsel(
                common.n,
                p_total,
                q_relevant,
                dropout,
                target_noise,
                common.seed,
            )
            .map_err(CliError::from)?;
            featsel_dataset(&data)?
        }
        _ => spec.generate(common.n).map_err(CliError::from)?,
    };

    let mut bytes = Vec::new();
    mio::write_dataset(&dataset, &mut bytes).map_err(CliError::from)?;
    atomic_write(&common.output, &bytes)?;

    if let Ok(truth) = ground_truth(&spec) {
        println!("{}", to_json_line(&truth)?);
    }
    RunManifest::new("gen", args, Some(common.seed)).write(&common.output)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark

#[derive(Clone, Copy, Debug, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecName {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
}

#[derive(clap::Args, Serialize)]
pub struct BenchmarkArgs {
    /// Generator family
    #[arg(long, value_enum)]
    pub spec: SpecName,
    /// m for exp2/exp3
    #[arg(long, default_value_t = 5)]
    pub m: u64,
    /// dims for exp3
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// zero-inflation for exp4
    #[arg(long, default_value_t = 0.15)]
    pub p: f64,
    /// Comma-separated estimators: mixed, ksg, noisy-ksg:SIGMA,
    /// fixed-partition[:BINS], adaptive-partition[:SIGNIFICANCE]
    #[arg(long)]
    pub estimators: String,
    /// Comma-separated sample sizes
    #[arg(long)]
    pub sizes: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Neighbor order for k-NN estimators
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t)]
    pub norm: NormOpt,
    #[arg(long = "atom-tol", default_value_t = 0.0)]
    pub atom_tol: f64,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix: writes PREFIX.csv, PREFIX.json, PREFIX.manifest.json
    #[arg(long, short)]
    pub output: PathBuf,
}

impl BenchmarkArgs {
    fn generator(&self) -> GeneratorSpec {
        let kind = match self.spec {
            SpecName::Exp1 => GeneratorKind::Exp1,
            SpecName::Exp2 => GeneratorKind::Exp2 { m: self.m },
            SpecName::Exp3 => GeneratorKind::Exp3 {
                m: self.m,
                dims: self.dims,
            },
            SpecName::Exp4 => GeneratorKind::Exp4 { p: self.p },
        };
        GeneratorSpec::new(kind, self.seed)
    }

    fn parse_estimators(&self) -> Result<Vec<Estimator>, CliError> {
        let base = EstimatorConfig {
            k: self.k,
            within_norm: self.norm.into(),
            atom_tolerance: self.atom_tol,
        };
        let mut out = Vec::new();
        for token in self.sizes_like(&self.estimators) {
            let (name, param) = match token.split_once(':') {
                Some((n, p)) => (n.trim(), Some(p.trim())),
                None => (token.trim(), None),
            };
            let parse_f64 = |p: &str| -> Result<f64, CliError> {
                p.parse()
                    .map_err(|_| CliError::Parameter(format!("bad estimator parameter `{p}`")))
            };
            let est = match (name, param) {
                ("mixed", None) => Estimator::Mixed { config: base },
                ("ksg", None) => Estimator::Ksg { config: base },
                ("noisy-ksg", Some(p)) => Estimator::NoisyKsg {
                    config: base,
                    sigma: parse_f64(p)?,
                },
                ("noisy-ksg", None) => {
                    return Err(CliError::Parameter(
                        "noisy-ksg needs a noise level, e.g. noisy-ksg:0.1".into(),
                    ))
                }
                ("fixed-partition", p) => Estimator::FixedPartition {
                    config: PartitionConfig {
                        bins_per_dim: match p {
                            Some(b) => b.parse().map_err(|_| {
                                CliError::Parameter(format!("bad bin count `{}`", b))
                            })?,
                            None => 8,
                        },
                        ..Default::default()
                    },
                },
                ("adaptive-partition", p) => Estimator::AdaptivePartition {
                    config: PartitionConfig {
                        significance: match p {
                            Some(s) => parse_f64(s)?,
                            None => 0.05,
                        },
                        ..Default::default()
                    },
                },
                _ => {
                    return Err(CliError::Parameter(format!(
                        "unknown estimator `{token}`"
                    )))
                }
            };
            out.push(est);
        }
        if out.is_empty() {
            return Err(CliError::Parameter("no estimators given".into()));
        }
        Ok(out)
    }

    fn sizes_like<'a>(&self, s: &'a str) -> impl Iterator<Item = &'a str> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty())
    }

    fn parse_sizes(&self) -> Result<Vec<usize>, CliError> {
        let sizes: Result<Vec<usize>, _> = self
            .sizes_like(&self.sizes)
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| CliError::Parameter(format!("bad sample size `{t}`")))
            })
            .collect();
        let sizes = sizes?;
        if sizes.is_empty() {
            return Err(CliError::Parameter("no sample sizes given".into()));
        }
        Ok(sizes)
    }
}

pub fn run_benchmark(args: &BenchmarkArgs) -> Result<(), CliError> {
    let spec = args.generator();
    let estimators = args.parse_estimators()?;
    let sizes = args.parse_sizes()?;

    let mut sweeps = Vec::new();
    for (ei, est) in estimators.iter().enumerate() {
        let sweep = mse_sweep(
            est,
            &spec,
            &sizes,
            args.trials,
            seeds::child_seed(args.seed, ei as u64),
        )
        .map_err(CliError::from)?;
        sweeps.push(sweep);
    }

    let mut csv = String::from("estimator,size,trials,mse,bias\n");
    for sweep in &sweeps {
        for (i, &size) in sweep.sample_sizes.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                sweep.estimator_name,
                size,
                sweep.trials,
                mio::format_value(sweep.mse_per_size[i]),
                mio::format_value(sweep.mean_bias_per_size[i]),
            ));
        }
    }
    atomic_write(&suffixed(&args.output, "csv"), csv.as_bytes())?;
    let json = serde_json::to_vec_pretty(&sweeps).map_err(|e| CliError::Internal(e.to_string()))?;
    atomic_write(&suffixed(&args.output, "json"), &json)?;
    RunManifest::new("benchmark", args, Some(args.seed)).write(&args.output)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// select

#[derive(clap::Args, Serialize)]
pub struct SelectArgs {
    /// Feature table CSV (ingestion mode); mutually exclusive with --featsel
    #[arg(long, conflicts_with = "featsel")]
    pub input: Option<PathBuf>,
    /// Target columns of the input table; remaining columns are features
    #[arg(long = "target-cols")]
    pub target_cols: Option<String>,
    /// Generate the zero-inflated feature-selection benchmark instead
    #[arg(long)]
    pub featsel: bool,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long = "p-total", default_value_t = 20)]
    pub p_total: usize,
    #[arg(long = "q-relevant", default_value_t = 5)]
    pub q_relevant: usize,
    #[arg(long, default_value_t = 0.15)]
    pub dropout: f64,
    #[arg(long = "target-noise", value_enum, default_value_t)]
    pub target_noise: TargetNoiseOpt,
    #[command(flatten)]
    pub est: EstimatorOpts,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Serialize)]
struct SelectSummary<'a> {
    auroc: Option<f64>,
    estimator: &'a str,
    n: usize,
    features: usize,
    target_dims: usize,
}

pub fn run_select(args: &SelectArgs) -> Result<(), CliError> {
    let estimator = args.est.build()?;

    // (feature columns, target rows, optional relevance labels, source col ids)
    let (features, target, labels, feature_ids) = if let Some(input) = &args.input {
        let target_cols = parse_cols(args.target_cols.as_deref().ok_or_else(|| {
            CliError::Parameter("--target-cols is required with --input".into())
        })?)?;
        let table = mio::read_table_path(input).map_err(CliError::from)?;
        if table.rows.is_empty() {
            return Err(CliError::Input("no data rows".into()));
        }
        let ncols = table.rows[0].len();
        for &c in &target_cols {
            if c >= ncols {
                return Err(CliError::Input(format!(
                    "target column {c} out of range ({ncols} columns)"
                )));
            }
        }
        let feature_ids: Vec<usize> =
            (0..ncols).filter(|c| !target_cols.contains(c)).collect();
        if feature_ids.is_empty() {
            return Err(CliError::Parameter("no feature columns left".into()));
        }
        let features: Vec<Vec<f64>> = feature_ids
            .iter()
            .map(|&c| table.rows.iter().map(|r| r[c]).collect())
            .collect();
        let target: Vec<Vec<f64>> = table
            .rows
            .iter()
            .map(|r| target_cols.iter().map(|&c| r[c]).collect())
            .collect();
        (features, target, None, feature_ids)
    } else if args.featsel {
        let data = gen_featsel(
            args.n,
            args.p_total,
            args.q_relevant,
            args.dropout,
            args.target_noise.into(),
            args.seed,
        )
        .map_err(CliError::from)?;
        let ids = (0..data.features.len()).collect();
        (data.features, data.target, Some(data.relevant), ids)
    } else {
        return Err(CliError::Parameter(
            "pass either --input <csv> with --target-cols, or --featsel".into(),
        ));
    };

    let ranked = rank_features(&features, &target, &estimator, args.seed)
        .map_err(CliError::from)?;

    let mut ranking = String::from(match &labels {
        Some(_) => "rank,feature,score,relevant\n",
        None => "rank,feature,score\n",
    });
    for (rank, fs) in ranked.iter().enumerate() {
        match &labels {
            Some(mask) => ranking.push_str(&format!(
                "{},{},{},{}\n",
                rank,
                feature_ids[fs.index],
                mio::format_value(fs.score),
                u8::from(mask[fs.index]),
            )),
            None => ranking.push_str(&format!(
                "{},{},{}\n",
                rank,
                feature_ids[fs.index],
                mio::format_value(fs.score),
            )),
        }
    }
    atomic_write(&suffixed(&args.output, "ranking.csv"), ranking.as_bytes())?;

    let auroc_value = if let Some(mask) = &labels {
        let mut scores = vec![0.0; features.len()];
        for fs in &ranked {
            scores[fs.index] = fs.score;
        }
        let curve = roc_curve(&scores, mask).map_err(CliError::from)?;
        let mut roc = String::from("fpr,tpr\n");
        for (fpr, tpr) in &curve.points {
            roc.push_str(&format!(
                "{},{}\n",
                mio::format_value(*fpr),
                mio::format_value(*tpr)
            ));
        }
        atomic_write(&suffixed(&args.output, "roc.csv"), roc.as_bytes())?;
        Some(auroc(&curve))
    } else {
        None
    };

    let summary = SelectSummary {
        auroc: auroc_value,
        estimator: estimator.name(),
        n: target.len(),
        features: features.len(),
        target_dims: target.first().map(|r| r.len()).unwrap_or(0),
    };
    let line = to_json_line(&summary)?;
    println!("{line}");
    atomic_write(
        &suffixed(&args.output, "summary.json"),
        format!("{line}\n").as_bytes(),
    )?;

    let mut manifest = RunManifest::new("select", args, Some(args.seed));
    if let Some(input) = &args.input {
        manifest.digest_input(input)?;
    }
    manifest.write(&args.output)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// netinfer

#[derive(clap::Args, Serialize)]
pub struct NetinferArgs {
    /// Expression matrix CSV: rows are samples, columns are genes
    #[arg(long)]
    pub expression: PathBuf,
    /// Gold-standard edge list CSV with columns gene_a,gene_b,label;
    /// unlisted pairs count as label 0
    #[arg(long)]
    pub gold: PathBuf,
    /// Dropout level applied to the expression matrix before scoring
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    #[command(flatten)]
    pub est: EstimatorOpts,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Serialize)]
struct NetinferSummary<'a> {
    auroc: f64,
    estimator: &'a str,
    genes: usize,
    pairs: usize,
    dropout: f64,
    samples: usize,
}

fn read_gold(path: &Path, genes: usize) -> Result<BTreeMap<(usize, usize), bool>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut gold = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize| -> Result<usize, CliError> {
            record
                .get(idx)
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| {
                    CliError::Input(format!("gold standard line {line}: bad field {idx}"))
                })
        };
        let a = field(0)?;
        let b = field(1)?;
        let label = field(2)?;
        for g in [a, b] {
            if g >= genes {
                return Err(CliError::Input(format!(
                    "gold standard line {line}: gene index {g} out of range ({genes} genes)"
                )));
            }
        }
        if a == b {
            return Err(CliError::Input(format!(
                "gold standard line {line}: self-edge {a},{b}"
            )));
        }
        if label > 1 {
            return Err(CliError::Input(format!(
                "gold standard line {line}: label must be 0 or 1"
            )));
        }
        gold.insert((a.min(b), a.max(b)), label == 1);
    }
    Ok(gold)
}

pub fn run_netinfer(args: &NetinferArgs) -> Result<(), CliError> {
    let estimator = args.est.build()?;
    let table = mio::read_table_path(&args.expression).map_err(CliError::from)?;
    let samples = table.rows.len();
    let genes = table.rows.first().map(|r| r.len()).unwrap_or(0);
    if genes < 3 {
        return Err(CliError::Input(format!(
            "need at least 3 genes, got {genes}"
        )));
    }
    let gold = read_gold(&args.gold, genes)?;

    let observed = apply_dropout(&table.rows, args.dropout, seeds::child_seed(args.seed, 0))
        .map_err(CliError::from)?;
    let columns: Vec<Vec<f64>> = (0..genes)
        .map(|g| observed.iter().map(|r| r[g]).collect())
        .collect();

    let pairs: Vec<(usize, usize)> = (0..genes)
        .flat_map(|a| ((a + 1)..genes).map(move |b| (a, b)))
        .collect();
    let scored: Vec<f64> = pairs
        .par_iter()
        .enumerate()
        .map(|(idx, &(a, b))| -> Result<f64, CliError> {
            let x: Vec<Vec<f64>> = columns[a].iter().map(|&v| vec![v]).collect();
            let y: Vec<Vec<f64>> = columns[b].iter().map(|&v| vec![v]).collect();
            let ds = validate_dataset(&x, &y).map_err(CliError::from)?;
            let est: MiEstimate = estimator
                .estimate(&ds, seeds::child_seed(args.seed, 1 + idx as u64))
                .map_err(CliError::from)?;
            Ok(est.value)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;

    let labels: Vec<bool> = pairs
        .iter()
        .map(|key| gold.get(key).copied().unwrap_or(false))
        .collect();
    let curve = roc_curve(&scored, &labels).map_err(CliError::from)?;
    let auroc_value = auroc(&curve);

    let mut csv = String::from("gene_a,gene_b,score,label\n");
    for ((a, b), (score, label)) in pairs.iter().zip(scored.iter().zip(&labels)) {
        csv.push_str(&format!(
            "{a},{b},{},{}\n",
            mio::format_value(*score),
            u8::from(*label)
        ));
    }
    atomic_write(&suffixed(&args.output, "pairs.csv"), csv.as_bytes())?;

    let summary = NetinferSummary {
        auroc: auroc_value,
        estimator: estimator.name(),
        genes,
        pairs: pairs.len(),
        dropout: args.dropout,
        samples,
    };
    let line = to_json_line(&summary)?;
    println!("{line}");
    atomic_write(
        &suffixed(&args.output, "summary.json"),
        format!("{line}\n").as_bytes(),
    )?;

    let mut manifest = RunManifest::new("netinfer", args, Some(args.seed));
    manifest.digest_input(&args.expression)?;
    manifest.digest_input(&args.gold)?;
    manifest.write(&args.output)?;
    Ok(())
}
