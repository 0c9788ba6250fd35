//! `beesched` command-line front end.
//!
//! Settings resolve as command-line flag, then `--config` file
//! (`key = value`), then built-in default.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::benchmarks::{self, Benchmark, Campaign};
use crate::colony::{self, ColonyConfig, Strategy};
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::kinematics::{KinematicParams, Position, TimeMatrix};
use crate::scheduling::{
    self, GateRule, ScheduleModel, ScheduleObjective, ScheduleReport, WarehouseLayout, DEFAULT_KEY_RANGE,
    RECONSTRUCTED_TASKS,
};

#[derive(Debug, Parser)]
#[command(name = "beesched", version, about = "Artificial bee colony optimizers and ETV schedule search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run benchmark-function campaigns.
    Bench(RunArgs),
    /// Optimize the freight-station task sequence.
    Schedule(RunArgs),
    /// Dump the ETV time-cost matrix as CSV.
    Matrix(MatrixArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// abc, fdabc, pfdabc, rmdabc or all
    #[arg(long)]
    pub strategy: Option<String>,
    /// Benchmark function (bench only)
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub swarm: Option<usize>,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    pub kinematics: Option<PathBuf>,
    /// min-total or nearest-cell (schedule only)
    #[arg(long)]
    pub gate_rule: Option<String>,
    /// Initial ETV position as row-layer-column (schedule only)
    #[arg(long)]
    pub start: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub kinematics: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Bench,
    Schedule,
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Bench => "bench",
            Mode::Schedule => "schedule",
        }
    }
}

/// Fully resolved settings for one `bench` or `schedule` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub strategies: Vec<Strategy>,
    pub dims: usize,
    pub swarm_size: usize,
    pub limit: usize,
    pub max_iters: usize,
    pub trials: usize,
    pub workers: usize,
    pub seed: u64,
    pub function: Option<Benchmark>,
    pub tasks: Option<PathBuf>,
    pub layout: Option<PathBuf>,
    pub kinematics: Option<PathBuf>,
    pub gate_rule: GateRule,
    pub start: Position,
    pub out: PathBuf,
}

const CONFIG_KEYS: [&str; 16] = [
    "mode",
    "strategy",
    "function",
    "dims",
    "swarm_size",
    "limit",
    "max_iters",
    "trials",
    "workers",
    "seed",
    "tasks",
    "layout",
    "kinematics",
    "gate_rule",
    "start",
    "out",
];

fn parse_strategies(s: &str) -> Result<Vec<Strategy>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(Strategy::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

fn parse_position(s: &str) -> Result<Position> {
    let parts: Vec<&str> = s.split('-').collect();
    let bad = || Error::Usage(format!("position must look like row-layer-column, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0u32; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| bad())?;
    }
    Position::new(v[0], v[1], v[2]).map_err(|e| Error::Usage(e.to_string()))
}

fn positive(name: &'static str, value: usize) -> Result<usize> {
    if value == 0 {
        Err(Error::Usage(format!("--{name} must be positive")))
    } else {
        Ok(value)
    }
}

impl ExperimentConfig {
    pub fn resolve(mode: Mode, args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let kv = KeyValues::load(path)?;
                kv.reject_unknown(&CONFIG_KEYS)?;
                kv
            }
            None => KeyValues::default(),
        };
        if let Some((m, _)) = file.get("mode") {
            if m != mode.name() {
                return Err(Error::Usage(format!(
                    "config file is for mode `{m}` but `{}` was requested",
                    mode.name()
                )));
            }
        }
        let text = |flag: &Option<String>, key: &str| -> Option<String> {
            flag.clone().or_else(|| file.get(key).map(|(v, _)| v.to_string()))
        };
        let path = |flag: &Option<PathBuf>, key: &str| -> Option<PathBuf> {
            flag.clone().or_else(|| file.get(key).map(|(v, _)| PathBuf::from(v)))
        };
        let num = |flag: Option<usize>, key: &str| -> Result<Option<usize>> {
            Ok(match flag {
                Some(v) => Some(v),
                None => file.get_parsed(key)?,
            })
        };

        let (default_iters, default_trials, default_out) = match mode {
            Mode::Bench => (1000, 10, "bench_out"),
            Mode::Schedule => (1500, 1, "schedule_out"),
        };
        let strategies = parse_strategies(&text(&args.strategy, "strategy").unwrap_or_else(|| "all".into()))?;
        let function = text(&args.function, "function").map(|f| f.parse()).transpose()?;
        if mode == Mode::Bench && function.is_none() {
            let valid: Vec<_> = Benchmark::ALL.iter().map(|b| b.name()).collect();
            return Err(Error::Usage(format!(
                "bench needs --function (one of {})",
                valid.join(", ")
            )));
        }
        let seed = match args.seed {
            Some(s) => s,
            None => file.get_parsed("seed")?.unwrap_or(0),
        };
        let gate_rule = text(&args.gate_rule, "gate_rule")
            .map(|r| r.parse())
            .transpose()?
            .unwrap_or_default();
        let start = text(&args.start, "start")
            .map(|s| parse_position(&s))
            .transpose()?
            .unwrap_or(Position { row: 1, layer: 1, column: 1 });

        Ok(ExperimentConfig {
            mode,
            strategies,
            dims: positive("dims", num(args.dims, "dims")?.unwrap_or(60))?,
            swarm_size: positive("swarm", num(args.swarm, "swarm_size")?.unwrap_or(200))?,
            limit: positive("limit", num(args.limit, "limit")?.unwrap_or(100))?,
            max_iters: positive("iters", num(args.iters, "max_iters")?.unwrap_or(default_iters))?,
            trials: positive("trials", num(args.trials, "trials")?.unwrap_or(default_trials))?,
            workers: positive("workers", num(args.workers, "workers")?.unwrap_or(1))?,
            seed,
            function,
            tasks: path(&args.tasks, "tasks"),
            layout: path(&args.layout, "layout"),
            kinematics: path(&args.kinematics, "kinematics"),
            gate_rule,
            start,
            out: path(&args.out, "out").unwrap_or_else(|| PathBuf::from(default_out)),
        })
    }

    fn colony_config(&self, strategy: Strategy, dims: usize) -> ColonyConfig {
        ColonyConfig {
            swarm_size: self.swarm_size,
            dims,
            limit: self.limit,
            max_iters: self.max_iters,
            strategy,
            workers: self.workers,
            seed: self.seed,
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create_file(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn load_params(path: Option<&Path>) -> Result<KinematicParams> {
    match path {
        Some(p) => KinematicParams::load(p),
        None => Ok(KinematicParams::default()),
    }
}

/// Runs the campaigns and writes `stats.csv` plus one convergence CSV per
/// trial into the output directory.
pub fn cmd_bench(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<Vec<Campaign>> {
    let function = config
        .function
        .ok_or_else(|| Error::Usage("bench needs --function".into()))?;
    create_dir(&config.out)?;
    let mut campaigns = Vec::new();
    for &strategy in &config.strategies {
        let cfg = config.colony_config(strategy, config.dims);
        let campaign = benchmarks::run_campaign(function, config.dims, &cfg, config.trials, config.seed)?;
        for t in &campaign.trials {
            let name = format!(
                "convergence_{}_{}_trial{}.csv",
                function.name(),
                strategy.key(),
                t.trial
            );
            let path = config.out.join(name);
            colony::write_history_csv(&t.result.history, create_file(&path)?)?;
        }
        let s = &campaign.stats;
        let _ = writeln!(
            stdout,
            "{:<7} {} D={} trials={}: avg best {:.6e}, best {:.6e}, var {:.6e}, avg runtime {:.3}s, shortest {:.3}s",
            strategy.label(),
            function.name(),
            config.dims,
            s.trials,
            s.average_best,
            s.best_best,
            s.variance_best,
            s.average_runtime,
            s.shortest_runtime
        );
        campaigns.push(campaign);
    }
    let path = config.out.join("stats.csv");
    benchmarks::write_campaign_csv(&campaigns, create_file(&path)?)?;
    Ok(campaigns)
}

/// Per-strategy outcome of a scheduling run.
#[derive(Debug, Clone)]
pub struct ScheduleOutcome {
    pub strategy: Strategy,
    /// `(seed, best total, runtime seconds)` per trial.
    pub trials: Vec<(u64, f64, f64)>,
    pub best: ScheduleReport,
}

/// Optimizes the schedule with each selected strategy. Writes, per
/// strategy, `schedule_<key>.txt`, `schedule_<key>.csv` and
/// `trials_<key>.csv`, plus `summary.csv` with Min/Max/Avg/CPU columns.
pub fn cmd_schedule(
    config: &ExperimentConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Vec<ScheduleOutcome>> {
    let params = load_params(config.kinematics.as_deref())?;
    let layout = match &config.layout {
        Some(p) => WarehouseLayout::load(p)?,
        None => WarehouseLayout::default(),
    };
    let tasks = match &config.tasks {
        Some(p) => scheduling::load_tasks(p)?,
        None => {
            let _ = writeln!(
                stderr,
                "warning: built-in task set; cells of tasks {:?} are reconstructed placeholders",
                RECONSTRUCTED_TASKS
            );
            scheduling::default_tasks()
        }
    };
    let model = ScheduleModel::new(layout, tasks, params)?
        .with_start(config.start)?
        .with_gate_rule(config.gate_rule);
    let objective = ScheduleObjective::from(model);
    let bounds = objective.model().key_bounds(DEFAULT_KEY_RANGE)?;
    let dims = objective.model().dims();
    create_dir(&config.out)?;

    let mut outcomes = Vec::new();
    for &strategy in &config.strategies {
        let mut trials = Vec::new();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for t in 0..config.trials {
            let seed = config.seed.wrapping_add(t as u64);
            let cfg = ColonyConfig {
                seed,
                ..config.colony_config(strategy, dims)
            };
            let started = Instant::now();
            let result = colony::run(&objective, &bounds, &cfg).map_err(|e| Error::AtTrial {
                trial: t,
                inner: Box::new(e),
            })?;
            let runtime = started.elapsed().as_secs_f64();
            trials.push((seed, result.best_value, runtime));
            if best.as_ref().is_none_or(|(v, _)| result.best_value < *v) {
                best = Some((result.best_value, result.best_position));
            }
        }
        let (_, keys) = best.expect("at least one trial");
        let report = objective.model().evaluate(&keys)?;

        let key = strategy.key();
        let text = scheduling::format_report(&report, &objective.model().layout);
        let txt_path = config.out.join(format!("schedule_{key}.txt"));
        create_file(&txt_path)?
            .write_all(text.as_bytes())
            .map_err(|e| Error::io(&txt_path, e))?;
        scheduling::write_report_csv(&report, create_file(&config.out.join(format!("schedule_{key}.csv")))?)?;
        write_trials_csv(&trials, create_file(&config.out.join(format!("trials_{key}.csv")))?)?;

        let totals: Vec<f64> = trials.iter().map(|t| t.1).collect();
        let cpu = trials.iter().map(|t| t.2).sum::<f64>() / trials.len() as f64;
        let _ = writeln!(
            stdout,
            "{:<7} best total {:.6}s (min {:.6}, max {:.6}, avg {:.6}) avg runtime {:.3}s",
            strategy.label(),
            report.total_time,
            totals.iter().cloned().fold(f64::INFINITY, f64::min),
            totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            totals.iter().sum::<f64>() / totals.len() as f64,
            cpu
        );
        outcomes.push(ScheduleOutcome {
            strategy,
            trials,
            best: report,
        });
    }
    write_summary_csv(&outcomes, create_file(&config.out.join("summary.csv"))?)?;
    Ok(outcomes)
}

fn write_trials_csv<W: Write>(trials: &[(u64, f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "seed", "total_time_s", "runtime_s"])?;
    for (t, (seed, total, runtime)) in trials.iter().enumerate() {
        w.write_record([
            t.to_string(),
            seed.to_string(),
            format!("{total:.6}"),
            format!("{runtime:.6}"),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<trials csv>", e))?;
    Ok(())
}

/// `algorithm,min_s,max_s,avg_s,cpu_s`; CPU is the mean optimizer runtime.
pub fn write_summary_csv<W: Write>(outcomes: &[ScheduleOutcome], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "min_s", "max_s", "avg_s", "cpu_s"])?;
    for o in outcomes {
        let n = o.trials.len() as f64;
        let min = o.trials.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        let max = o.trials.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        let avg = o.trials.iter().map(|t| t.1).sum::<f64>() / n;
        let cpu = o.trials.iter().map(|t| t.2).sum::<f64>() / n;
        w.write_record([
            o.strategy.label().to_string(),
            format!("{min:.6}"),
            format!("{max:.6}"),
            format!("{avg:.6}"),
            format!("{cpu:.6}"),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<summary csv>", e))?;
    Ok(())
}

pub fn cmd_matrix(args: &MatrixArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = load_params(args.kinematics.as_deref())?;
    let matrix = TimeMatrix::build(&params)?;
    match &args.out {
        Some(path) => matrix.write_csv(create_file(path)?),
        None => matrix.write_csv(stdout),
    }
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => ExperimentConfig::resolve(Mode::Bench, a).and_then(|c| cmd_bench(&c, stdout).map(drop)),
        Command::Schedule(a) => {
            ExperimentConfig::resolve(Mode::Schedule, a).and_then(|c| cmd_schedule(&c, stdout, stderr).map(drop))
        }
        Command::Matrix(a) => cmd_matrix(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
