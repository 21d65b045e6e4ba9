//! Synthetic benchmark harness: generates sparse vector pairs with
//! controlled support overlap and outliers, sketches them at matched
//! storage budgets, and reports per-trial scaled errors as CSV.

use std::io::Write;

use anyhow::{bail, Context, Result};
use ipsketch_core::hashing::derive_seeds;
use ipsketch_core::tables::{sketch_vector, AnySketch, SketchSpec};
use ipsketch_core::{Method, SparseVector};
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Base distribution of non-outlier values. Recorded in the config echo
/// so alternative generators can be compared later.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseDistribution {
    /// Standard normal, redrawn until the value lands in `[-1, 1]`.
    TruncatedNormal,
}

impl BaseDistribution {
    pub fn tag(&self) -> &'static str {
        match self {
            BaseDistribution::TruncatedNormal => "truncated-normal",
        }
    }
}

/// Parameters of the synthetic vector-pair generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub dimension: u64,
    /// Nonzero entries per vector.
    pub nnz: usize,
    /// Fraction of each support shared with the other vector.
    pub overlap: f64,
    /// Probability that an entry is promoted to an outlier.
    pub outlier_fraction: f64,
    /// Outlier values are uniform in this range.
    pub outlier_range: (f64, f64),
    pub base_distribution: BaseDistribution,
    pub seed: u64,
    pub trials: usize,
}

impl SyntheticConfig {
    /// Defaults matching the benchmark setup: 10000-dimensional vectors
    /// with 2000 nonzeros, 10% outliers in [20, 30], 10 trials.
    pub fn new(overlap: f64, seed: u64) -> Self {
        SyntheticConfig {
            dimension: 10_000,
            nnz: 2_000,
            overlap,
            outlier_fraction: 0.10,
            outlier_range: (20.0, 30.0),
            base_distribution: BaseDistribution::TruncatedNormal,
            seed,
            trials: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.nnz == 0 {
            bail!("dimension and nnz must be positive");
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            bail!("overlap fraction must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            bail!("outlier fraction must lie in [0, 1]");
        }
        if self.outlier_range.0 > self.outlier_range.1 {
            bail!("outlier range is inverted");
        }
        let shared = self.shared_count();
        if 2 * self.nnz - shared > self.dimension as usize {
            bail!(
                "supports need {} distinct indices but the dimension is {}",
                2 * self.nnz - shared,
                self.dimension
            );
        }
        Ok(())
    }

    pub fn shared_count(&self) -> usize {
        (self.overlap * self.nnz as f64).floor() as usize
    }
}

/// Generates one vector pair: supports share exactly
/// `floor(overlap * nnz)` indices, non-outlier values are standard normal
/// rejected outside `[-1, 1]`, and each entry is independently promoted
/// to a uniform outlier. Deterministic in the config seed.
pub fn gen_synthetic(config: &SyntheticConfig) -> Result<(SparseVector, SparseVector)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shared = config.shared_count();
    let total = 2 * config.nnz - shared;
    let picked = rand::seq::index::sample(&mut rng, config.dimension as usize, total);
    let mut indices: Vec<u64> = picked.into_iter().map(|i| i as u64 + 1).collect();
    let shared_idx: Vec<u64> = indices.drain(..shared).collect();
    let a_only: Vec<u64> = indices.drain(..config.nnz - shared).collect();
    let b_only = indices;

    let mut support_a: Vec<u64> = shared_idx.iter().chain(&a_only).copied().collect();
    let mut support_b: Vec<u64> = shared_idx.iter().chain(&b_only).copied().collect();
    support_a.sort_unstable();
    support_b.sort_unstable();

    let mut draw = |indices: &[u64]| -> Vec<(u64, f64)> {
        indices
            .iter()
            .map(|&i| (i, synthetic_value(&mut rng, config)))
            .collect()
    };
    let entries_a = draw(&support_a);
    let entries_b = draw(&support_b);
    Ok((
        SparseVector::new(config.dimension, entries_a)?,
        SparseVector::new(config.dimension, entries_b)?,
    ))
}

fn synthetic_value(rng: &mut ChaCha8Rng, config: &SyntheticConfig) -> f64 {
    let base = match config.base_distribution {
        BaseDistribution::TruncatedNormal => loop {
            let x: f64 = StandardNormal.sample(rng);
            if (-1.0..=1.0).contains(&x) {
                break x;
            }
        },
    };
    if rng.gen_bool(config.outlier_fraction) {
        rng.gen_range(config.outlier_range.0..=config.outlier_range.1)
    } else {
        base
    }
}

/// Storage size of a sketch in 64-bit-word equivalents: sampling sketches
/// cost 1.5 words per sample (64-bit value plus 32-bit hash), linear
/// sketches one word per coordinate; the weighted sketch stores one extra
/// word for the norm.
pub fn storage_size(sketch: &AnySketch) -> f64 {
    match sketch {
        AnySketch::Empty { .. } => 0.0,
        AnySketch::MinHash(s) => 1.5 * s.samples() as f64,
        AnySketch::WeightedMinHash(s) => 1.5 * s.samples() as f64 + 1.0,
        AnySketch::Kmv(s) => 1.5 * s.budget() as f64,
        AnySketch::Jl(s) => s.rows() as f64,
        AnySketch::CountSketch(s) => (s.reps() * s.buckets()) as f64,
    }
}

/// Largest sample count whose storage fits the budget; `None` when no
/// valid sketch fits.
pub fn samples_for_budget(method: Method, budget: f64, cs_reps: usize) -> Option<usize> {
    let samples = match method {
        Method::Empty => return None,
        Method::MinHash => (budget / 1.5).floor() as usize,
        Method::WeightedMinHash => ((budget - 1.0) / 1.5).floor() as usize,
        Method::Kmv => (budget / 1.5).floor() as usize,
        Method::Jl => budget.floor() as usize,
        Method::CountSketch => (budget / cs_reps as f64).floor() as usize,
    };
    match method {
        Method::Kmv if samples < 2 => None,
        _ if samples < 1 => None,
        _ => Some(samples),
    }
}

/// One benchmark measurement: a single (method, budget, trial) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub method: Method,
    pub budget: f64,
    pub samples: usize,
    pub trial: usize,
    pub truth: f64,
    pub estimate: f64,
    pub scaled_error: f64,
    pub overlap: f64,
    pub seed: u64,
}

/// Runs the benchmark grid. Each trial draws a fresh vector pair; every
/// method and budget sketches that same pair at matched storage. Cells
/// run in parallel (capped by the IPSKETCH_THREADS environment variable)
/// and reports come back sorted by (method, budget, trial) so output is
/// deterministic regardless of scheduling.
pub fn run_experiment(
    config: &SyntheticConfig,
    methods: &[Method],
    budgets: &[f64],
) -> Result<Vec<EstimateReport>> {
    config.validate()?;
    if config.trials == 0 {
        bail!("trial count must be positive");
    }
    let trial_seeds = derive_seeds(config.seed, config.trials);
    let pairs: Vec<(SparseVector, SparseVector, f64, f64)> = trial_seeds
        .iter()
        .map(|&trial_seed| {
            let mut cfg = *config;
            cfg.seed = trial_seed;
            let (a, b) = gen_synthetic(&cfg)?;
            let truth = a.inner(&b)?;
            let scale = a.norm() * b.norm();
            Ok((a, b, truth, scale))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (trial, &trial_seed) in trial_seeds.iter().enumerate() {
        let sketch_seeds = derive_seeds(trial_seed ^ 0x5ce7c4, methods.len() * budgets.len());
        for (mi, &method) in methods.iter().enumerate() {
            for (bi, &budget) in budgets.iter().enumerate() {
                match samples_for_budget(method, budget, ipsketch_core::baselines::DEFAULT_CS_REPS)
                {
                    Some(samples) => {
                        cells.push((method, budget, trial, samples, sketch_seeds[mi * budgets.len() + bi]));
                    }
                    None => log::warn!(
                        "skipping {method} at budget {budget}: no sketch fits"
                    ),
                }
            }
        }
    }

    let pool = thread_pool()?;
    let reports: Result<Vec<EstimateReport>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(method, budget, trial, samples, sketch_seed)| {
                let (a, b, truth, scale) = &pairs[trial];
                let spec = SketchSpec::new(method, samples, sketch_seed);
                let sa = sketch_vector(a, &spec)?;
                let sb = sketch_vector(b, &spec)?;
                let estimate = sa.estimate(&sb)?;
                Ok(EstimateReport {
                    method,
                    budget,
                    samples,
                    trial,
                    truth: *truth,
                    estimate,
                    scaled_error: (estimate - truth).abs() / scale,
                    overlap: config.overlap,
                    seed: config.seed,
                })
            })
            .collect()
    });
    let mut reports = reports?;
    reports.sort_by(|x, y| {
        (x.method.tag(), x.trial)
            .cmp(&(y.method.tag(), y.trial))
            .then(x.budget.total_cmp(&y.budget))
    });
    Ok(reports)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(threads) = std::env::var("IPSKETCH_THREADS") {
        let threads: usize = threads
            .parse()
            .context("IPSKETCH_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("IPSKETCH_THREADS must be a positive integer");
        }
        builder = builder.num_threads(threads);
    }
    Ok(builder.build()?)
}

/// Serializes reports as CSV, one row per estimate.
pub fn write_csv(writer: &mut impl Write, reports: &[EstimateReport]) -> Result<()> {
    writeln!(writer, "method,budget,m,trial,truth,estimate,scaled_error,gamma,seed")?;
    for r in reports {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{}",
            r.method.tag(),
            r.budget,
            r.samples,
            r.trial,
            r.truth,
            r.estimate,
            r.scaled_error,
            r.overlap,
            r.seed
        )?;
    }
    Ok(())
}

pub fn csv_string(reports: &[EstimateReport]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, reports).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Mean scaled error of the reports for one method.
pub fn mean_scaled_error(reports: &[EstimateReport], method: Method) -> f64 {
    let errors: Vec<f64> = reports
        .iter()
        .filter(|r| r.method == method)
        .map(|r| r.scaled_error)
        .collect();
    errors.iter().sum::<f64>() / errors.len() as f64
}
