//! Artificial bee colony engine.
//!
//! One [`Colony`] owns the food sources, one random stream per source and a
//! master stream for roulette selection. The four search strategies differ
//! only in how many coordinates a bee perturbs per visit and how onlookers
//! pick sources:
//!
//! | strategy          | employed move           | onlooker                       |
//! |-------------------|-------------------------|--------------------------------|
//! | `SingleDim`       | one random coordinate   | threshold test, one coordinate |
//! | `FullDim`         | greedy chain over all   | roulette, greedy chain over all|
//! | `ParallelFullDim` | as `FullDim`, sharded   | threshold test, one coordinate |
//! | `RandomMultiDim`  | chain over random subset| threshold test, one coordinate |
//!
//! During the employed phase every bee reads its partners from a snapshot of
//! the population taken when the phase starts, and draws only from its own
//! stream. The phase result is therefore independent of how sources are
//! split across workers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Random stream type used by every bee.
pub type BeeRng = ChaCha8Rng;

const MASTER_STREAM: u64 = u64::MAX;

/// Stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> BeeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A minimization objective. Must be callable from several threads at once.
pub trait Objective: Sync {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    /// Zero-width intervals are accepted; they pin the coordinate.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::param(
                "bounds",
                format!("{} lower vs {} upper", lower.len(), upper.len()),
            ));
        }
        if lower.is_empty() {
            return Err(Error::param("bounds", "no dimensions"));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param("bounds", format!("dimension {d}: [{lo}, {hi}]")));
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(dims: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dims], vec![upper; dims])
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn clamp(&self, k: usize, value: f64) -> f64 {
        value.max(self.lower[k]).min(self.upper[k])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Uniform point inside the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| (lo + rng.gen::<f64>() * (hi - lo)).min(hi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Classic ABC.
    SingleDim,
    /// fdABC.
    FullDim,
    /// PfdABC.
    ParallelFullDim,
    /// RmdABC.
    RandomMultiDim,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::SingleDim,
        Strategy::FullDim,
        Strategy::RandomMultiDim,
        Strategy::ParallelFullDim,
    ];

    /// Conventional algorithm name.
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::SingleDim => "ABC",
            Strategy::FullDim => "fdABC",
            Strategy::ParallelFullDim => "PfdABC",
            Strategy::RandomMultiDim => "RmdABC",
        }
    }

    /// Command-line spelling.
    pub fn key(&self) -> &'static str {
        match self {
            Strategy::SingleDim => "abc",
            Strategy::FullDim => "fdabc",
            Strategy::ParallelFullDim => "pfdabc",
            Strategy::RandomMultiDim => "rmdabc",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.key().eq_ignore_ascii_case(s) || st.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown strategy `{s}` (expected one of abc, fdabc, pfdabc, rmdabc)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColonyConfig {
    /// Number of food sources (and of employed bees).
    pub swarm_size: usize,
    pub dims: usize,
    /// A source whose trial counter exceeds this is abandoned.
    pub limit: usize,
    pub max_iters: usize,
    pub strategy: Strategy,
    pub workers: usize,
    pub seed: u64,
}

impl ColonyConfig {
    pub fn new(dims: usize, strategy: Strategy) -> Self {
        ColonyConfig {
            swarm_size: 200,
            dims,
            limit: 100,
            max_iters: 1000,
            strategy,
            workers: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::param("swarm_size", "at least two sources are required"));
        }
        if self.dims == 0 {
            return Err(Error::param("dims", "must be at least 1"));
        }
        if self.limit == 0 {
            return Err(Error::param("limit", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// A candidate solution with its cached objective value and fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct FoodSource {
    pub position: Vec<f64>,
    pub objective_value: f64,
    pub fitness: f64,
    /// Consecutive visits without an accepted improvement.
    pub trial: usize,
}

impl FoodSource {
    pub fn new(position: Vec<f64>, objective_value: f64) -> Result<Self> {
        let fitness = fitness_transform(objective_value)?;
        Ok(FoodSource {
            position,
            objective_value,
            fitness,
            trial: 0,
        })
    }

    fn set_value(&mut self, value: f64) {
        self.objective_value = value;
        self.fitness = fitness_of(value);
    }
}

#[inline]
fn fitness_of(f: f64) -> f64 {
    if f >= 0.0 {
        1.0 / (1.0 + f)
    } else {
        1.0 + f.abs()
    }
}

/// Maps a minimization value to a positive nectar amount:
/// `1/(1+f)` for `f ≥ 0`, `1+|f|` otherwise.
pub fn fitness_transform(objective_value: f64) -> Result<f64> {
    if objective_value.is_nan() {
        return Err(Error::Domain("objective value is NaN".into()));
    }
    Ok(fitness_of(objective_value))
}

/// Fitness-proportional selection probabilities.
pub fn selection_probabilities(sources: &[FoodSource]) -> Result<Vec<f64>> {
    if sources.is_empty() {
        return Err(Error::Domain("empty population".into()));
    }
    let total: f64 = sources.iter().map(|s| s.fitness).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegeneratePopulation);
    }
    Ok(sources.iter().map(|s| s.fitness / total).collect())
}

/// Index picked by roulette for a draw `r ∈ [0, 1)`.
pub fn roulette_select(probabilities: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

/// Uniform draw on the open interval (-1, 1).
pub fn draw_phi<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let phi: f64 = rng.gen_range(-1.0..1.0);
        if phi != -1.0 {
            return phi;
        }
    }
}

/// `x_i` with coordinate `k` moved to `x_ik + phi·(x_ik − x_jk)`, clamped.
pub fn neighbor_move(x_i: &[f64], x_j: &[f64], k: usize, bounds: &Bounds, phi: f64) -> Result<Vec<f64>> {
    let dims = x_i.len();
    if k >= dims || k >= x_j.len() || k >= bounds.dims() {
        return Err(Error::Index { index: k, dims });
    }
    let mut out = x_i.to_vec();
    out[k] = propose(x_i[k], x_j[k], phi, bounds, k);
    Ok(out)
}

#[inline]
fn propose(x_ik: f64, x_jk: f64, phi: f64, bounds: &Bounds, k: usize) -> f64 {
    bounds.clamp(k, x_ik + phi * (x_ik - x_jk))
}

/// Uniform partner index in `0..n` other than `i`.
#[inline]
fn draw_partner<R: Rng + ?Sized>(rng: &mut R, i: usize, n: usize) -> usize {
    let j = rng.gen_range(0..n - 1);
    if j >= i {
        j + 1
    } else {
        j
    }
}

fn evaluate<O: Objective + ?Sized>(objective: &O, x: &[f64], source_index: usize) -> Result<f64> {
    let v = objective.evaluate(x);
    if v.is_nan() {
        Err(Error::Evaluation { source_index })
    } else {
        Ok(v)
    }
}

/// Read-only state shared by the bees of one phase.
struct Forage<'a, O: ?Sized> {
    objective: &'a O,
    bounds: &'a Bounds,
    swarm: usize,
}

impl<O: Objective + ?Sized> Forage<'_, O> {
    /// Greedy chain over `dims` for source `i`: each coordinate move is kept
    /// only if it strictly lowers the objective, and later moves start from
    /// the kept point. Returns (improved, evaluations).
    fn greedy_chain<R, P>(
        &self,
        i: usize,
        source: &mut FoodSource,
        dims: impl IntoIterator<Item = usize>,
        rng: &mut R,
        partner: P,
    ) -> Result<(bool, u64)>
    where
        R: Rng + ?Sized,
        P: Fn(usize, usize) -> f64,
    {
        let mut improved = false;
        let mut evals = 0;
        let mut value = source.objective_value;
        for k in dims {
            let j = draw_partner(rng, i, self.swarm);
            let phi = draw_phi(rng);
            let old = source.position[k];
            let candidate = propose(old, partner(j, k), phi, self.bounds, k);
            source.position[k] = candidate;
            let v = evaluate(self.objective, &source.position, i)?;
            evals += 1;
            if v < value {
                value = v;
                improved = true;
            } else {
                source.position[k] = old;
            }
        }
        if improved {
            source.set_value(value);
            source.trial = 0;
        } else {
            source.trial += 1;
        }
        Ok((improved, evals))
    }
}

/// Runs per-source work either inline or sharded over a worker pool.
enum Executor {
    Sequential,
    #[cfg(feature = "parallel")]
    Pool { pool: rayon::ThreadPool, workers: usize },
}

impl Executor {
    fn for_strategy(config: &ColonyConfig) -> Result<Self> {
        #[cfg(feature = "parallel")]
        if config.strategy == Strategy::ParallelFullDim && config.workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            return Ok(Executor::Pool {
                pool,
                workers: config.workers,
            });
        }
        let _ = config;
        Ok(Executor::Sequential)
    }

    fn run<F>(&self, sources: &mut [FoodSource], rngs: &mut [BeeRng], work: F) -> Result<u64>
    where
        F: Fn(usize, &mut FoodSource, &mut BeeRng) -> Result<u64> + Sync,
    {
        match self {
            Executor::Sequential => run_chunk(0, sources, rngs, &work),
            #[cfg(feature = "parallel")]
            Executor::Pool { pool, workers } => {
                use rayon::prelude::*;
                let chunk = sources.len().div_ceil(*workers).max(1);
                let partials: Vec<Result<u64>> = pool.install(|| {
                    sources
                        .par_chunks_mut(chunk)
                        .zip(rngs.par_chunks_mut(chunk))
                        .enumerate()
                        .map(|(c, (s, r))| run_chunk(c * chunk, s, r, &work))
                        .collect()
                });
                partials.into_iter().sum()
            }
        }
    }
}

fn run_chunk<F>(base: usize, sources: &mut [FoodSource], rngs: &mut [BeeRng], work: &F) -> Result<u64>
where
    F: Fn(usize, &mut FoodSource, &mut BeeRng) -> Result<u64>,
{
    let mut evals = 0;
    for (offset, (src, rng)) in sources.iter_mut().zip(rngs.iter_mut()).enumerate() {
        evals += work(base + offset, src, rng)?;
    }
    Ok(evals)
}

/// Creates `swarm_size` uniformly placed, evaluated sources, drawing source
/// `i`'s position from `rngs[i]`.
pub fn init_population<O: Objective + ?Sized>(
    config: &ColonyConfig,
    bounds: &Bounds,
    objective: &O,
    rngs: &mut [BeeRng],
) -> Result<Vec<FoodSource>> {
    config.validate()?;
    let executor = Executor::for_strategy(config)?;
    init_with(&executor, config, bounds, objective, rngs).map(|(s, _)| s)
}

fn init_with<O: Objective + ?Sized>(
    executor: &Executor,
    config: &ColonyConfig,
    bounds: &Bounds,
    objective: &O,
    rngs: &mut [BeeRng],
) -> Result<(Vec<FoodSource>, u64)> {
    if bounds.dims() != config.dims {
        return Err(Error::param(
            "dims",
            format!("config has {} but bounds have {}", config.dims, bounds.dims()),
        ));
    }
    if rngs.len() != config.swarm_size {
        return Err(Error::param("rngs", "one stream per source is required"));
    }
    let placeholder = FoodSource {
        position: Vec::new(),
        objective_value: f64::INFINITY,
        fitness: 0.0,
        trial: 0,
    };
    let mut sources = vec![placeholder; config.swarm_size];
    let evals = executor.run(&mut sources, rngs, |i, src, rng| {
        let position = bounds.sample(rng);
        let value = evaluate(objective, &position, i)?;
        *src = FoodSource::new(position, value)?;
        Ok(1)
    })?;
    Ok((sources, evals))
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// `(iteration, best so far)`; iteration 0 is the initial population.
    pub history: Vec<(usize, f64)>,
    pub evaluations: u64,
    pub wall_time: Duration,
}

/// A live population. [`run`] drives it; tests can step phases one by one.
pub struct Colony<'a, O: Objective + ?Sized> {
    objective: &'a O,
    bounds: Bounds,
    config: ColonyConfig,
    sources: Vec<FoodSource>,
    rngs: Vec<BeeRng>,
    master: BeeRng,
    executor: Executor,
    best_position: Vec<f64>,
    best_value: f64,
    history: Vec<(usize, f64)>,
    iteration: usize,
    evaluations: u64,
}

impl<'a, O: Objective + ?Sized> Colony<'a, O> {
    pub fn new(objective: &'a O, bounds: Bounds, config: ColonyConfig) -> Result<Self> {
        config.validate()?;
        let executor = Executor::for_strategy(&config)?;
        let mut rngs: Vec<BeeRng> = (0..config.swarm_size as u64)
            .map(|i| stream_rng(config.seed, i))
            .collect();
        let (sources, evaluations) = init_with(&executor, &config, &bounds, objective, &mut rngs)?;
        let master = stream_rng(config.seed, MASTER_STREAM);
        let mut colony = Colony {
            objective,
            bounds,
            config,
            sources,
            rngs,
            master,
            executor,
            best_position: Vec::new(),
            best_value: f64::INFINITY,
            history: Vec::new(),
            iteration: 0,
            evaluations,
        };
        colony.record_best();
        Ok(colony)
    }

    pub fn sources(&self) -> &[FoodSource] {
        &self.sources
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn config(&self) -> &ColonyConfig {
        &self.config
    }

    pub fn best(&self) -> (&[f64], f64) {
        (&self.best_position, self.best_value)
    }

    pub fn history(&self) -> &[(usize, f64)] {
        &self.history
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn employed_phase(&mut self) -> Result<()> {
        let snapshot: Vec<Vec<f64>> = self.sources.iter().map(|s| s.position.clone()).collect();
        let forage = Forage {
            objective: self.objective,
            bounds: &self.bounds,
            swarm: self.config.swarm_size,
        };
        let strategy = self.config.strategy;
        let dims = self.config.dims;
        let partner = |j: usize, k: usize| snapshot[j][k];
        let evals = self.executor.run(&mut self.sources, &mut self.rngs, |i, src, rng| {
            let (_, n) = match strategy {
                Strategy::SingleDim => {
                    let k = rng.gen_range(0..dims);
                    forage.greedy_chain(i, src, [k], rng, partner)?
                }
                Strategy::FullDim | Strategy::ParallelFullDim => {
                    forage.greedy_chain(i, src, 0..dims, rng, partner)?
                }
                Strategy::RandomMultiDim => {
                    let count = rng.gen_range(1..=dims);
                    let picked = index::sample(rng, dims, count);
                    forage.greedy_chain(i, src, picked, rng, partner)?
                }
            };
            Ok(n)
        })?;
        self.evaluations += evals;
        Ok(())
    }

    pub fn onlooker_phase(&mut self) -> Result<()> {
        let probs = selection_probabilities(&self.sources)?;
        match self.config.strategy {
            Strategy::FullDim => self.onlooker_roulette(&probs),
            _ => self.onlooker_threshold(&probs),
        }
    }

    /// One onlooker per source; each spins the roulette on the master stream
    /// and runs a full-dimensional chain on the chosen source.
    fn onlooker_roulette(&mut self, probs: &[f64]) -> Result<()> {
        let dims = self.config.dims;
        for _ in 0..self.config.swarm_size {
            let s = roulette_select(probs, self.master.gen::<f64>());
            let mut src = self.sources[s].clone();
            let sources = &self.sources;
            let forage = Forage {
                objective: self.objective,
                bounds: &self.bounds,
                swarm: self.config.swarm_size,
            };
            let (_, n) =
                forage.greedy_chain(s, &mut src, 0..dims, &mut self.master, |j, k| sources[j].position[k])?;
            self.sources[s] = src;
            self.evaluations += n;
        }
        Ok(())
    }

    /// Source `i` is exploited with one single-coordinate move when its own
    /// stream draws below `probs[i]`.
    pub(crate) fn onlooker_threshold(&mut self, probs: &[f64]) -> Result<()> {
        let dims = self.config.dims;
        for (i, &p) in probs.iter().enumerate() {
            let rng = &mut self.rngs[i];
            if rng.gen::<f64>() >= p {
                continue;
            }
            let k = rng.gen_range(0..dims);
            let mut src = self.sources[i].clone();
            let sources = &self.sources;
            let forage = Forage {
                objective: self.objective,
                bounds: &self.bounds,
                swarm: self.config.swarm_size,
            };
            let (_, n) = forage.greedy_chain(i, &mut src, [k], rng, |j, k| sources[j].position[k])?;
            self.sources[i] = src;
            self.evaluations += n;
        }
        Ok(())
    }

    /// Replaces every source whose trial counter exceeds the limit.
    pub fn scout_phase(&mut self) -> Result<()> {
        for i in 0..self.config.swarm_size {
            if self.sources[i].trial <= self.config.limit {
                continue;
            }
            let position = self.bounds.sample(&mut self.rngs[i]);
            let value = evaluate(self.objective, &position, i)?;
            self.sources[i] = FoodSource::new(position, value)?;
            self.evaluations += 1;
        }
        Ok(())
    }

    /// Folds the current population into the global best and appends a
    /// history entry for the current iteration.
    pub fn record_best(&mut self) {
        if let Some(src) = self
            .sources
            .iter()
            .filter(|s| s.objective_value < self.best_value)
            .min_by(|a, b| a.objective_value.total_cmp(&b.objective_value))
        {
            self.best_value = src.objective_value;
            self.best_position = src.position.clone();
        }
        if self.best_position.is_empty() {
            // every source evaluated to +inf
            self.best_position = self.sources[0].position.clone();
        }
        self.history.push((self.iteration, self.best_value));
    }

    /// One full employed → onlooker → scout → record cycle.
    pub fn step(&mut self) -> Result<()> {
        self.iteration += 1;
        let iteration = self.iteration;
        let wrap = |e: Error| Error::AtIteration {
            iteration,
            inner: Box::new(e),
        };
        self.employed_phase().map_err(wrap)?;
        self.onlooker_phase().map_err(wrap)?;
        self.scout_phase().map_err(wrap)?;
        self.record_best();
        Ok(())
    }

    pub fn into_result(self, wall_time: Duration) -> RunResult {
        RunResult {
            best_position: self.best_position,
            best_value: self.best_value,
            history: self.history,
            evaluations: self.evaluations,
            wall_time,
        }
    }
}

/// Minimizes `objective` over `bounds`.
pub fn run<O: Objective + ?Sized>(objective: &O, bounds: &Bounds, config: &ColonyConfig) -> Result<RunResult> {
    let started = Instant::now();
    let mut colony = Colony::new(objective, bounds.clone(), config.clone())?;
    for _ in 0..config.max_iters {
        colony.step()?;
    }
    Ok(colony.into_result(started.elapsed()))
}

/// Writes `iteration,best_value` rows.
pub fn write_history_csv<W: std::io::Write>(history: &[(usize, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "best_value"])?;
    for (it, v) in history {
        w.write_record([it.to_string(), format!("{v:.12e}")])?;
    }
    w.flush().map_err(|e| Error::io("<history csv>", e))?;
    Ok(())
}
