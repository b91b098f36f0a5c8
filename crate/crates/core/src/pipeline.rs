//! Randomized RLT experiments over landmark draws, and dataset comparison.
//!
//! Every experiment draws from its own ChaCha stream keyed on
//! `(seed, experiment index)`, so a run is a pure function of the cloud and
//! the configuration no matter how experiments are scheduled across threads.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{max_pairwise_distance, pairwise_distances, sample_landmarks, PointCloud};
use crate::persistence::compute_persistence;
use crate::rlt::{mean_rlt, rlt_from_barcode, MrltDistribution, RltVector};
use crate::witness::build_witness_filtration;

pub const DEFAULT_LANDMARKS: usize = 64;
pub const DEFAULT_I_MAX: usize = 100;
pub const DEFAULT_EXPERIMENTS: usize = 10_000;

/// Coefficient turning the largest landmark distance into `α_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `(1/128) · (5000 / N)` for a dataset of `N` samples.
    Auto,
    Fixed(f64),
}

impl Gamma {
    pub fn resolve(self, n_samples: usize) -> f64 {
        match self {
            Gamma::Auto => (1.0 / 128.0) * (5000.0 / n_samples as f64),
            Gamma::Fixed(g) => g,
        }
    }
}

impl std::str::FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Gamma::Auto);
        }
        let g: f64 = s
            .parse()
            .map_err(|_| Error::param(format!("gamma must be 'auto' or a number, got {s:?}")))?;
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::param(format!("gamma must be positive, got {g}")));
        }
        Ok(Gamma::Fixed(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Landmarks per experiment.
    pub l0: usize,
    pub gamma: Gamma,
    /// Number of Betti levels kept in each RLT vector.
    pub i_max: usize,
    /// Number of experiments.
    pub n: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            l0: DEFAULT_LANDMARKS,
            gamma: Gamma::Auto,
            i_max: DEFAULT_I_MAX,
            n: DEFAULT_EXPERIMENTS,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l0 < 3 {
            return Err(Error::param(format!(
                "at least 3 landmarks are required, got {}",
                self.l0
            )));
        }
        if self.n == 0 {
            return Err(Error::param("number of experiments must be at least 1"));
        }
        if self.i_max == 0 {
            return Err(Error::param("i_max must be at least 1"));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::param(format!("gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// Validates against a dataset and fixes `gamma` to a number.
    pub fn resolve(&self, cloud: &PointCloud) -> Result<ResolvedConfig> {
        self.validate()?;
        if cloud.n_samples() < self.l0 {
            return Err(Error::param(format!(
                "dataset has {} samples, too few for {} landmarks",
                cloud.n_samples(),
                self.l0
            )));
        }
        Ok(ResolvedConfig {
            l0: self.l0,
            gamma: self.gamma.resolve(cloud.n_samples()),
            i_max: self.i_max,
            n: self.n,
            seed: self.seed,
        })
    }
}

/// An [`ExperimentConfig`] with `gamma` fixed for a particular dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedConfig {
    pub l0: usize,
    pub gamma: f64,
    pub i_max: usize,
    pub n: usize,
    pub seed: u64,
}

/// Result of a single landmark draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub rlt: RltVector,
    pub alpha_max: f64,
    /// All landmarks coincided, so `α_max = 0` and the RLT is trivial.
    pub degenerate: bool,
}

/// Per-experiment RLT rows, in experiment order.
#[derive(Debug, Clone, PartialEq)]
pub struct RltMatrix {
    pub rows: Vec<RltVector>,
    pub config: ResolvedConfig,
    pub dataset_fingerprint: String,
    pub degenerate_experiments: usize,
    /// Mean wall time per experiment, milliseconds. Not part of the result
    /// proper; varies between runs.
    pub mean_experiment_ms: f64,
}

impl RltMatrix {
    pub fn mean(&self) -> MrltDistribution {
        mean_rlt(&self.rows).expect("matrix has at least one row of uniform length")
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn max_overflow(&self) -> f64 {
        self.rows.iter().map(|r| r.overflow).fold(0.0, f64::max)
    }
}

/// Execution knobs that do not affect the result.
#[derive(Default)]
pub struct RunOptions<'a> {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Called with `(completed, total)` after each experiment.
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
    /// Checked before each experiment starts.
    pub cancel: Option<&'a AtomicBool>,
}

/// The random stream for experiment `index` of a run seeded with `seed`.
pub fn experiment_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One iteration: draw landmarks, measure distances, build the witness
/// filtration up to `γ · max landmark distance`, reduce, and summarize.
pub fn run_experiment(
    cloud: &PointCloud,
    config: &ResolvedConfig,
    index: u64,
) -> Result<ExperimentOutcome> {
    let mut rng = experiment_rng(config.seed, index);
    let landmarks = sample_landmarks(cloud, config.l0, &mut rng)?;
    let alpha_max = config.gamma * max_pairwise_distance(&landmarks, cloud);
    if alpha_max <= 0.0 {
        return Ok(ExperimentOutcome {
            rlt: RltVector::trivial(config.i_max),
            alpha_max,
            degenerate: true,
        });
    }
    let d = pairwise_distances(&landmarks, cloud)?;
    let filtration = build_witness_filtration(&d, alpha_max, 2)?;
    let barcode = compute_persistence(&filtration, 1)?;
    Ok(ExperimentOutcome {
        rlt: rlt_from_barcode(&barcode, config.i_max)?,
        alpha_max,
        degenerate: false,
    })
}

pub fn run_rlt_experiments(cloud: &PointCloud, config: &ExperimentConfig) -> Result<RltMatrix> {
    run_rlt_experiments_with(cloud, config, &RunOptions::default())
}

/// Runs `config.n` experiments, in parallel when threads are available.
/// Output is bit-identical for any thread count.
pub fn run_rlt_experiments_with(
    cloud: &PointCloud,
    config: &ExperimentConfig,
    options: &RunOptions<'_>,
) -> Result<RltMatrix> {
    let resolved = config.resolve(cloud)?;
    match options.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("could not start thread pool: {e}")))?;
            pool.install(|| run_resolved(cloud, &resolved, options))
        }
        None => run_resolved(cloud, &resolved, options),
    }
}

fn run_resolved(
    cloud: &PointCloud,
    config: &ResolvedConfig,
    options: &RunOptions<'_>,
) -> Result<RltMatrix> {
    let done = AtomicUsize::new(0);
    let cancelled = || {
        options
            .cancel
            .map(|c| c.load(Ordering::Relaxed))
            .unwrap_or(false)
    };
    let start = Instant::now();
    let outcomes: Vec<Result<ExperimentOutcome>> = (0..config.n)
        .into_par_iter()
        .map(|i| {
            if cancelled() {
                return Err(Error::Cancelled {
                    completed: done.load(Ordering::Relaxed),
                });
            }
            let out = run_experiment(cloud, config, i as u64);
            let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(progress) = options.progress {
                progress(finished, config.n);
            }
            out
        })
        .collect();
    let elapsed = start.elapsed();

    let mut rows = Vec::with_capacity(config.n);
    let mut degenerate = 0;
    for outcome in outcomes {
        let outcome = outcome?;
        degenerate += outcome.degenerate as usize;
        rows.push(outcome.rlt);
    }
    if degenerate > 0 {
        log::warn!("{degenerate} of {} experiments drew coincident landmarks", config.n);
    }
    Ok(RltMatrix {
        rows,
        config: *config,
        dataset_fingerprint: cloud.fingerprint(),
        degenerate_experiments: degenerate,
        mean_experiment_ms: elapsed.as_secs_f64() * 1e3 / config.n as f64,
    })
}

/// Geometry score between two datasets run under the same configuration.
///
/// Each dataset resolves `Gamma::Auto` against its own size; a warning is
/// logged when the sizes differ.
pub fn compare_datasets(a: &PointCloud, b: &PointCloud, config: &ExperimentConfig) -> Result<f64> {
    compare_datasets_with(a, b, config, &RunOptions::default()).map(|(s, _, _)| s)
}

/// As [`compare_datasets`], also returning both MRLT distributions.
pub fn compare_datasets_with(
    a: &PointCloud,
    b: &PointCloud,
    config: &ExperimentConfig,
    options: &RunOptions<'_>,
) -> Result<(f64, MrltDistribution, MrltDistribution)> {
    if a.n_samples() != b.n_samples() {
        log::warn!(
            "comparing datasets of different sizes ({} vs {}); scores are most reliable for equal sizes",
            a.n_samples(),
            b.n_samples()
        );
    }
    let ma = run_rlt_experiments_with(a, config, options)?.mean();
    let mb = run_rlt_experiments_with(b, config, options)?.mean();
    let score = crate::rlt::geometry_score(&ma, &mb)?;
    Ok((score, ma, mb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(n: usize) -> ExperimentConfig {
        ExperimentConfig {
            l0: 8,
            gamma: Gamma::Fixed(0.125),
            i_max: 4,
            n,
            seed: 42,
        }
    }

    fn ring(n: usize) -> PointCloud {
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn gamma_resolution() {
        assert_eq!(Gamma::Auto.resolve(5000), 1.0 / 128.0);
        assert_eq!(Gamma::Auto.resolve(10000), 1.0 / 256.0);
        assert_eq!(Gamma::Fixed(0.5).resolve(3), 0.5);
        assert_eq!("auto".parse::<Gamma>().unwrap(), Gamma::Auto);
        assert_eq!("0.125".parse::<Gamma>().unwrap(), Gamma::Fixed(0.125));
        assert!("-1".parse::<Gamma>().is_err());
        assert!("x".parse::<Gamma>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = small_config(1);
        c.l0 = 2;
        assert!(c.validate().is_err());
        let mut c = small_config(0);
        assert!(c.validate().is_err());
        c.n = 1;
        c.i_max = 0;
        assert!(c.validate().is_err());
        let too_small = ring(5);
        assert!(matches!(
            run_rlt_experiments(&too_small, &small_config(1)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn repeated_point_is_degenerate() {
        let cloud = PointCloud::new([1.5, -2.0].repeat(40), 40, 2).unwrap();
        let m = run_rlt_experiments(&cloud, &small_config(5)).unwrap();
        assert_eq!(m.degenerate_experiments, 5);
        for r in &m.rows {
            assert_eq!(r, &RltVector::trivial(4));
        }
    }

    #[test]
    fn deterministic_across_threads_and_substreams() {
        let cloud = ring(200);
        let cfg = small_config(12);
        let one = run_rlt_experiments_with(
            &cloud,
            &cfg,
            &RunOptions {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let three = run_rlt_experiments_with(
            &cloud,
            &cfg,
            &RunOptions {
                threads: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one.rows, three.rows);

        let resolved = cfg.resolve(&cloud).unwrap();
        let alone = run_experiment(&cloud, &resolved, 7).unwrap();
        assert_eq!(alone.rlt, one.rows[7]);
    }

    #[test]
    fn progress_and_cancel() {
        let cloud = ring(100);
        let seen = AtomicUsize::new(0);
        let progress = |done: usize, total: usize| {
            assert!(done <= total);
            seen.fetch_max(done, Ordering::Relaxed);
        };
        run_rlt_experiments_with(
            &cloud,
            &small_config(6),
            &RunOptions {
                progress: Some(&progress),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seen.load(Ordering::Relaxed), 6);

        let cancel = AtomicBool::new(true);
        let r = run_rlt_experiments_with(
            &cloud,
            &small_config(6),
            &RunOptions {
                cancel: Some(&cancel),
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::Cancelled { .. })));
    }

    #[test]
    fn identical_inputs_score_zero() {
        let cloud = ring(150);
        assert_eq!(compare_datasets(&cloud, &cloud, &small_config(6)).unwrap(), 0.0);
    }
}
