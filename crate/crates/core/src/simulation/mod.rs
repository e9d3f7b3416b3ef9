//! Seeded Monte Carlo estimates of the detection error probability.
//!
//! Trials are split into `(M, chunk)` work units. Each trial draws from
//! its own counter-based stream (see [`rng_stream_for`]), so tallies do
//! not depend on how units are scheduled or how many workers run them.

mod fit;
mod stream;

pub use fit::{fit_empirical_diversity, fit_slope, wilson_interval, DiversityFit, SlopeFit, MIN_ERRORS};
pub use stream::{philox4x32_10, rng_stream_for, TrialStream};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detectors::{
    first_arrival, fa_index, linear_index, mean, ml_index, Constellation, DetectorError,
    DetectorKind, DetectorSpec, LinearFallback,
};
use crate::distributions::NoiseModel;

/// Trials per work unit.
const CHUNK: u64 = 1 << 15;

pub const MIN_TRIALS: u64 = 1_000;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("threshold precomputation failed for the {kind} detector: {source}")]
    Thresholds {
        kind: DetectorKind,
        #[source]
        source: DetectorError,
    },
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub noise: NoiseModel,
    pub constellation: Constellation,
    pub detectors: Vec<DetectorKind>,
    pub m_grid: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    #[serde(default)]
    pub linear_fallback: LinearFallback,
}

impl SimConfig {
    /// Binary `{0, Δ}` config with a single worker and the default
    /// linear fallback.
    pub fn binary(
        noise: NoiseModel,
        delta: f64,
        detectors: &[DetectorKind],
        m_grid: Vec<usize>,
        trials: u64,
        seed: u64,
    ) -> Result<Self, SimulationError> {
        let constellation = Constellation::binary(delta)
            .map_err(|e| SimulationError::InvalidConfig(e.to_string()))?;
        let config = Self {
            noise,
            constellation,
            detectors: detectors.to_vec(),
            m_grid,
            trials,
            seed,
            workers: 1,
            linear_fallback: LinearFallback::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let invalid = |msg: String| Err(SimulationError::InvalidConfig(msg));
        if self.trials < MIN_TRIALS {
            return invalid(format!("trials must be at least {MIN_TRIALS}, got {}", self.trials));
        }
        if self.m_grid.is_empty() || self.m_grid[0] == 0 {
            return invalid("M grid must be non-empty with M >= 1".into());
        }
        if !self.m_grid.windows(2).all(|w| w[0] < w[1]) {
            return invalid(format!("M grid must be strictly increasing: {:?}", self.m_grid));
        }
        if self.m_grid.iter().any(|&m| m > u32::MAX as usize) {
            return invalid("M must fit in 32 bits".into());
        }
        if self.detectors.is_empty() {
            return invalid("at least one detector is required".into());
        }
        let mut sorted = self.detectors.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.detectors.len() {
            return invalid(format!("duplicate detectors: {:?}", self.detectors));
        }
        if self.workers == 0 {
            return invalid("workers must be at least 1".into());
        }
        Ok(())
    }
}

/// Error-rate estimate for one `(detector, M)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub detector: DetectorKind,
    pub m: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_errors: u64,
    pub n_trials: u64,
}

/// Per-trial decision disagreements between two detectors at one `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub first: DetectorKind,
    pub second: DetectorKind,
    pub m: usize,
    pub disagreements: u64,
    pub n_trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub config: SimConfig,
    /// Detector-major, then increasing `M`.
    pub cells: Vec<CellEstimate>,
    pub agreement: Vec<Agreement>,
    pub fits: Vec<DiversityFit>,
}

impl SimulationResult {
    pub fn cell(&self, detector: DetectorKind, m: usize) -> Option<&CellEstimate> {
        self.cells.iter().find(|c| c.detector == detector && c.m == m)
    }

    pub fn fit(&self, detector: DetectorKind) -> Option<&DiversityFit> {
        self.fits.iter().find(|f| f.detector == detector)
    }
}

/// A detector reduced to what one trial needs.
enum Rule {
    Ml,
    Linear(Vec<f64>),
    Fa(Vec<Vec<f64>>),
}

struct Plan<'a> {
    config: &'a SimConfig,
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    errors: Vec<u64>,
    disagreements: Vec<u64>,
}

impl Plan<'_> {
    fn new(config: &SimConfig) -> Result<Plan<'_>, SimulationError> {
        config.validate()?;
        let noise = &config.noise;
        let points = &config.constellation;
        let rules = config
            .detectors
            .iter()
            .map(|&kind| {
                let wrap = |source| SimulationError::Thresholds { kind, source };
                Ok(match kind {
                    DetectorKind::Ml => Rule::Ml,
                    DetectorKind::Linear => {
                        let spec = DetectorSpec::linear(*noise, points.clone(), &config.linear_fallback)
                            .map_err(wrap)?;
                        Rule::Linear(spec.linear_thresholds().expect("linear spec").0.to_vec())
                    }
                    DetectorKind::Fa => {
                        let spec = DetectorSpec::first_arrival(*noise, points.clone(), &config.m_grid)
                            .map_err(wrap)?;
                        Rule::Fa(
                            config
                                .m_grid
                                .iter()
                                .map(|&m| spec.fa_thresholds(m).expect("prepared M").to_vec())
                                .collect(),
                        )
                    }
                })
            })
            .collect::<Result<Vec<_>, SimulationError>>()?;
        Ok(Plan { config, rules })
    }

    fn units(&self) -> Vec<(usize, u64)> {
        let chunks = self.config.trials.div_ceil(CHUNK);
        (0..self.config.m_grid.len())
            .flat_map(|mi| (0..chunks).map(move |c| (mi, c)))
            .collect()
    }

    fn run_unit(&self, (mi, chunk): (usize, u64)) -> Tally {
        let config = self.config;
        let m = config.m_grid[mi];
        let points = config.constellation.points();
        let k = self.rules.len();
        let mut tally = Tally {
            errors: vec![0; k],
            disagreements: vec![0; k * (k - 1) / 2],
        };
        let mut arrivals = vec![0.0; m];
        let mut decisions = vec![0usize; k];
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(config.trials);
        for trial in start..end {
            let mut rng = rng_stream_for(config.seed, m, trial);
            let x = rng.random_range(0..points.len());
            config.noise.fill(&mut arrivals, &mut rng);
            let shift = points[x];
            arrivals.iter_mut().for_each(|y| *y += shift);
            for (d, rule) in decisions.iter_mut().zip(&self.rules) {
                *d = match rule {
                    Rule::Ml => ml_index(&config.noise, points, &arrivals),
                    Rule::Linear(cuts) => linear_index(cuts, mean(&arrivals)),
                    Rule::Fa(by_m) => fa_index(&by_m[mi], first_arrival(&arrivals)),
                };
            }
            let mut pair = 0;
            for i in 0..k {
                tally.errors[i] += u64::from(decisions[i] != x);
                for j in i + 1..k {
                    tally.disagreements[pair] += u64::from(decisions[i] != decisions[j]);
                    pair += 1;
                }
            }
        }
        tally
    }

    fn assemble(&self, units: &[(usize, u64)], tallies: Vec<Tally>) -> SimulationResult {
        let config = self.config;
        let k = self.rules.len();
        let grid = config.m_grid.len();
        let mut errors = vec![vec![0u64; grid]; k];
        let mut disagreements = vec![vec![0u64; grid]; k * (k - 1) / 2];
        for (&(mi, _), tally) in units.iter().zip(tallies) {
            for (row, e) in errors.iter_mut().zip(&tally.errors) {
                row[mi] += e;
            }
            for (row, d) in disagreements.iter_mut().zip(&tally.disagreements) {
                row[mi] += d;
            }
        }
        let n = config.trials;
        let mut cells = Vec::with_capacity(k * grid);
        for (i, &detector) in config.detectors.iter().enumerate() {
            for (mi, &m) in config.m_grid.iter().enumerate() {
                let e = errors[i][mi];
                let (ci_lo, ci_hi) = wilson_interval(e, n);
                cells.push(CellEstimate {
                    detector,
                    m,
                    p_hat: e as f64 / n as f64,
                    ci_lo,
                    ci_hi,
                    n_errors: e,
                    n_trials: n,
                });
            }
        }
        let mut agreement = Vec::new();
        let mut pair = 0;
        for i in 0..k {
            for j in i + 1..k {
                for (mi, &m) in config.m_grid.iter().enumerate() {
                    agreement.push(Agreement {
                        first: config.detectors[i],
                        second: config.detectors[j],
                        m,
                        disagreements: disagreements[pair][mi],
                        n_trials: n,
                    });
                }
                pair += 1;
            }
        }
        let mut result = SimulationResult {
            config: config.clone(),
            cells,
            agreement,
            fits: Vec::new(),
        };
        result.fits = fit_empirical_diversity(&result);
        result
    }
}

/// Runs every trial on the calling thread.
pub fn run_trials_sequential(config: &SimConfig) -> Result<SimulationResult, SimulationError> {
    let plan = Plan::new(config)?;
    let units = plan.units();
    let tallies = units.iter().map(|&u| plan.run_unit(u)).collect();
    Ok(plan.assemble(&units, tallies))
}

/// Runs the trials on `config.workers` threads. The result is identical
/// to [`run_trials_sequential`] for any worker count.
#[cfg(feature = "parallel")]
pub fn run_trials(config: &SimConfig) -> Result<SimulationResult, SimulationError> {
    use rayon::prelude::*;

    let plan = Plan::new(config)?;
    let units = plan.units();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SimulationError::WorkerPool(e.to_string()))?;
    let tallies = pool.install(|| units.par_iter().map(|&u| plan.run_unit(u)).collect());
    Ok(plan.assemble(&units, tallies))
}

/// Without the `parallel` feature the worker count is ignored.
#[cfg(not(feature = "parallel"))]
pub fn run_trials(config: &SimConfig) -> Result<SimulationResult, SimulationError> {
    run_trials_sequential(config)
}
