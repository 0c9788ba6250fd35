//! Continuous test functions and repeated-trial statistics.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::colony::{self, Bounds, ColonyConfig, Objective, RunResult, Strategy};
use crate::error::{Error, Result};

fn require_dims(x: &[f64], min: usize, name: &str) -> Result<()> {
    if x.len() < min {
        return Err(Error::Domain(format!(
            "{name} needs at least {min} dimension(s), got {}",
            x.len()
        )));
    }
    Ok(())
}

/// `x₁² + 10⁶·Σ_{i≥2} xᵢ²`
pub fn bent_cigar(x: &[f64]) -> Result<f64> {
    require_dims(x, 1, "bent_cigar")?;
    Ok(bent_cigar_unchecked(x))
}

/// `Σ |xᵢ|^(i+1)` with 1-based `i`. Large inputs overflow to +inf.
pub fn sum_diff_power(x: &[f64]) -> Result<f64> {
    require_dims(x, 1, "sum_diff_power")?;
    Ok(sum_diff_power_unchecked(x))
}

/// `Σ_{i<D} 100(xᵢ² − xᵢ₊₁)² + (xᵢ − 1)²`
pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    require_dims(x, 2, "rosenbrock")?;
    Ok(rosenbrock_unchecked(x))
}

/// `Σ xᵢ² − 10cos(2πxᵢ) + 10`
pub fn rastrigin(x: &[f64]) -> Result<f64> {
    require_dims(x, 1, "rastrigin")?;
    Ok(rastrigin_unchecked(x))
}

/// `Σ (xᵢ + 0.5)²`, a shifted sphere.
pub fn step(x: &[f64]) -> Result<f64> {
    require_dims(x, 1, "step")?;
    Ok(step_unchecked(x))
}

fn bent_cigar_unchecked(x: &[f64]) -> f64 {
    let tail: f64 = x[1..].iter().map(|v| v * v).sum();
    x[0] * x[0] + 1e6 * tail
}

fn sum_diff_power_unchecked(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powi(i as i32 + 2))
        .sum()
}

fn rosenbrock_unchecked(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[0] * w[0] - w[1];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

fn rastrigin_unchecked(x: &[f64]) -> f64 {
    use std::f64::consts::TAU;
    x.iter()
        .map(|v| v * v - 10.0 * (TAU * v).cos() + 10.0)
        .sum()
}

fn step_unchecked(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5) * (v + 0.5)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    BentCigar,
    SumDiffPower,
    Rosenbrock,
    Rastrigin,
    Step,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::BentCigar,
        Benchmark::SumDiffPower,
        Benchmark::Rosenbrock,
        Benchmark::Rastrigin,
        Benchmark::Step,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::BentCigar => "bent_cigar",
            Benchmark::SumDiffPower => "sum_diff_power",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Step => "step",
        }
    }

    pub fn min_dims(&self) -> usize {
        match self {
            Benchmark::Rosenbrock => 2,
            _ => 1,
        }
    }

    pub fn known_optimum(&self) -> f64 {
        0.0
    }

    /// Search box for `dims` dimensions.
    pub fn search_range(&self, dims: usize) -> Result<Bounds> {
        let half = match self {
            Benchmark::Rastrigin => 500.0,
            _ => 100.0,
        };
        Bounds::uniform(dims, -half, half)
    }

    /// A point at which the function attains its optimum.
    pub fn optimum_point(&self, dims: usize) -> Vec<f64> {
        match self {
            Benchmark::Rosenbrock => vec![1.0; dims],
            Benchmark::Step => vec![-0.5; dims],
            _ => vec![0.0; dims],
        }
    }

    pub fn evaluate_checked(&self, x: &[f64]) -> Result<f64> {
        match self {
            Benchmark::BentCigar => bent_cigar(x),
            Benchmark::SumDiffPower => sum_diff_power(x),
            Benchmark::Rosenbrock => rosenbrock(x),
            Benchmark::Rastrigin => rastrigin(x),
            Benchmark::Step => step(x),
        }
    }

    fn check_dims(&self, dims: usize) -> Result<()> {
        if dims < self.min_dims() {
            return Err(Error::param(
                "dims",
                format!("{} needs at least {} dimension(s)", self.name(), self.min_dims()),
            ));
        }
        Ok(())
    }
}

impl Objective for Benchmark {
    /// Panics on vectors shorter than [`Benchmark::min_dims`].
    fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Benchmark::BentCigar => bent_cigar_unchecked(x),
            Benchmark::SumDiffPower => sum_diff_power_unchecked(x),
            Benchmark::Rosenbrock => rosenbrock_unchecked(x),
            Benchmark::Rastrigin => rastrigin_unchecked(x),
            Benchmark::Step => step_unchecked(x),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let valid: Vec<_> = Benchmark::ALL.iter().map(|b| b.name()).collect();
                Error::Usage(format!(
                    "unknown function `{s}` (valid: {})",
                    valid.join(", ")
                ))
            })
    }
}

/// Aggregate over the trials of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub average_runtime: f64,
    pub shortest_runtime: f64,
    pub average_best: f64,
    pub best_best: f64,
    /// Population variance (divides by the trial count).
    pub variance_best: f64,
    pub trials: usize,
}

impl TrialStats {
    /// Statistics over `(best value, runtime in seconds)` pairs.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("trials", "must be at least 1"));
        }
        let n = samples.len() as f64;
        let average_best = samples.iter().map(|s| s.0).sum::<f64>() / n;
        let variance_best = if samples.iter().all(|s| s.0 == samples[0].0) {
            0.0
        } else {
            samples
                .iter()
                .map(|s| (s.0 - average_best).powi(2))
                .sum::<f64>()
                / n
        };
        Ok(TrialStats {
            average_runtime: samples.iter().map(|s| s.1).sum::<f64>() / n,
            shortest_runtime: samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
            average_best,
            best_best: samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
            variance_best,
            trials: samples.len(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub result: RunResult,
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub function: Benchmark,
    pub strategy: Strategy,
    pub dims: usize,
    pub stats: TrialStats,
    pub trials: Vec<TrialRecord>,
}

impl Campaign {
    fn from_records(function: Benchmark, config: &ColonyConfig, trials: Vec<TrialRecord>) -> Result<Self> {
        let samples: Vec<(f64, f64)> = trials
            .iter()
            .map(|t| (t.result.best_value, t.result.wall_time.as_secs_f64()))
            .collect();
        Ok(Campaign {
            function,
            strategy: config.strategy,
            dims: config.dims,
            stats: TrialStats::from_samples(&samples)?,
            trials,
        })
    }
}

/// Trial `t` runs with seed `seed + t`; the config's own seed is ignored.
fn run_trial(function: Benchmark, config: &ColonyConfig, seed: u64, t: usize) -> Result<TrialRecord> {
    let bounds = function.search_range(config.dims)?;
    let trial_seed = seed.wrapping_add(t as u64);
    let cfg = ColonyConfig {
        seed: trial_seed,
        ..config.clone()
    };
    let result = colony::run(&function, &bounds, &cfg).map_err(|e| Error::AtTrial {
        trial: t,
        inner: Box::new(e),
    })?;
    Ok(TrialRecord {
        trial: t,
        seed: trial_seed,
        result,
    })
}

fn campaign_config(function: Benchmark, dims: usize, config: &ColonyConfig, trials: usize) -> Result<ColonyConfig> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    function.check_dims(dims)?;
    let cfg = ColonyConfig {
        dims,
        ..config.clone()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Runs `trials` independent seeded runs one after another.
pub fn run_campaign(
    function: Benchmark,
    dims: usize,
    config: &ColonyConfig,
    trials: usize,
    seed: u64,
) -> Result<Campaign> {
    let cfg = campaign_config(function, dims, config, trials)?;
    let records = (0..trials)
        .map(|t| run_trial(function, &cfg, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Campaign::from_records(function, &cfg, records)
}

/// Like [`run_campaign`] but runs trials concurrently. Objective values are
/// identical to the sequential campaign; wall times are not comparable.
pub fn run_campaign_concurrent(
    function: Benchmark,
    dims: usize,
    config: &ColonyConfig,
    trials: usize,
    seed: u64,
) -> Result<Campaign> {
    let cfg = campaign_config(function, dims, config, trials)?;
    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(function, &cfg, seed, t))
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records = (0..trials)
        .map(|t| run_trial(function, &cfg, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Campaign::from_records(function, &cfg, records)
}

pub const CAMPAIGN_CSV_HEADER: [&str; 8] = [
    "function",
    "strategy",
    "dims",
    "average_runtime_s",
    "average_best",
    "best_best",
    "shortest_runtime_s",
    "variance_best",
];

/// One row per campaign. Runtimes use 6 decimals, objective statistics
/// 12-digit scientific notation; `variance_best` is the population variance.
pub fn write_campaign_csv<W: Write>(campaigns: &[Campaign], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CAMPAIGN_CSV_HEADER)?;
    for c in campaigns {
        let s = &c.stats;
        w.write_record([
            c.function.name().to_string(),
            c.strategy.label().to_string(),
            c.dims.to_string(),
            format!("{:.6}", s.average_runtime),
            format!("{:.12e}", s.average_best),
            format!("{:.12e}", s.best_best),
            format!("{:.6}", s.shortest_runtime),
            format!("{:.12e}", s.variance_best),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<campaign csv>", e))?;
    Ok(())
}
