//! Acceptance suite. Runs every criterion in sequence (timing checks must
//! not share the CPU with other tests), prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::process::Command;
use std::time::{Duration, Instant};

use proptest::collection;
use proptest::strategy::{Just, Strategy as Gen};
use proptest::{prop_assert, prop_assert_eq};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beesched::benchmarks::Benchmark;
use beesched::colony::{neighbor_move, run, Bounds, Colony, ColonyConfig, Strategy};
use beesched::kinematics::{travel_time, Position};
use beesched::scheduling::{smc_decode, Direction, ScheduleModel};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

const REFERENCE: [[f64; 6]; 5] = [
    [0.0, 5.47, 7.74, 9.62, 11.50, 13.37],
    [11.62, 11.62, 11.62, 11.62, 11.62, 13.37],
    [22.87, 22.87, 22.87, 22.87, 22.87, 22.87],
    [34.12, 34.12, 34.12, 34.12, 34.12, 34.12],
    [45.37, 45.37, 45.37, 45.37, 45.37, 45.37],
];

fn time_matrix_table() -> Check {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_beesched"))
        .arg("matrix")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    ensure(rows.len() == 8 && rows.iter().all(|r| r.len() == 60), || "matrix is not 8x60".into())?;
    let mut worst: f64 = 0.0;
    for (l, want_row) in REFERENCE.iter().enumerate() {
        for (c, want) in want_row.iter().enumerate() {
            let err = (rows[l][c] - want).abs();
            worst = worst.max(err);
            ensure(err <= 0.01, || format!("entry ({l},{c}) = {} vs {want}", rows[l][c]))?;
        }
    }
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("30 entries, worst error {worst:.4} s, {elapsed:.0?}"))
}

fn benchmark_optima() -> Check {
    let started = Instant::now();
    let mut checked = 0;
    for f in Benchmark::ALL {
        for dims in [1, 10, 100] {
            let x = f.optimum_point(dims);
            if dims < f.min_dims() {
                ensure(f.evaluate_checked(&x).is_err(), || format!("{} accepted D={dims}", f.name()))?;
                continue;
            }
            let v = f.evaluate_checked(&x).map_err(|e| e.to_string())?;
            ensure(v.abs() <= 1e-12, || format!("{} D={dims}: {v}", f.name()))?;
            checked += 1;
        }
    }
    within(started.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checked} function/dimension pairs at 0"))
}

fn small_config(strategy: Strategy, seed: u64) -> ColonyConfig {
    ColonyConfig {
        swarm_size: 50,
        dims: 10,
        limit: 50,
        max_iters: 200,
        strategy,
        workers: 1,
        seed,
    }
}

fn values<O: beesched::Objective>(c: &Colony<'_, O>) -> Vec<f64> {
    c.sources().iter().map(|s| s.objective_value).collect()
}

fn all_in_bounds<O: beesched::Objective>(c: &Colony<'_, O>) -> bool {
    c.sources().iter().all(|s| c.bounds().contains(&s.position))
}

fn optimizer_invariants() -> Check {
    let started = Instant::now();
    let f = Benchmark::Step;
    let bounds = f.search_range(10).map_err(|e| e.to_string())?;
    let mut phases = 0usize;
    for strategy in Strategy::ALL {
        for seed in 0..20 {
            let cfg = small_config(strategy, seed);
            let mut colony = Colony::new(&f, bounds.clone(), cfg.clone()).map_err(|e| e.to_string())?;
            let tag = |it: usize, what: &str| format!("{} seed {seed} iter {it}: {what}", strategy.label());
            let mut last_best = colony.best().1;
            for it in 1..=cfg.max_iters {
                for phase in ["employed", "onlooker"] {
                    let before = values(&colony);
                    match phase {
                        "employed" => colony.employed_phase(),
                        _ => colony.onlooker_phase(),
                    }
                    .map_err(|e| e.to_string())?;
                    let after = values(&colony);
                    ensure(before.iter().zip(&after).all(|(b, a)| a <= b), || {
                        tag(it, &format!("{phase} phase worsened a source"))
                    })?;
                    ensure(all_in_bounds(&colony), || tag(it, &format!("{phase} left bounds")))?;
                    phases += 1;
                }
                let before = values(&colony);
                let exhausted: Vec<bool> = colony.sources().iter().map(|s| s.trial > cfg.limit).collect();
                colony.scout_phase().map_err(|e| e.to_string())?;
                let after = values(&colony);
                for i in 0..before.len() {
                    ensure(exhausted[i] || after[i] == before[i], || tag(it, "scout touched a live source"))?;
                }
                ensure(all_in_bounds(&colony), || tag(it, "scout left bounds"))?;
                colony.record_best();
                let best = colony.best().1;
                ensure(best <= last_best, || tag(it, "global best increased"))?;
                ensure(after.iter().all(|v| best <= *v), || tag(it, "best above a source"))?;
                last_best = best;
            }
            let result = run(&f, &bounds, &cfg).map_err(|e| e.to_string())?;
            ensure(result.history.windows(2).all(|w| w[1].1 <= w[0].1), || {
                format!("{} seed {seed}: run history not monotone", strategy.label())
            })?;
            ensure(result.best_value == last_best, || {
                format!("{} seed {seed}: phase-driven and run() disagree", strategy.label())
            })?;
        }
    }
    within(started.elapsed(), Duration::from_secs(120))?;
    Ok(format!("80 runs, {phases} phases checked, {:.1?}", started.elapsed()))
}

fn variant_dominance() -> Check {
    let mut detail = Vec::new();
    for f in [Benchmark::Step, Benchmark::Rastrigin] {
        let bounds = f.search_range(10).map_err(|e| e.to_string())?;
        let bests = |strategy| -> Result<Vec<f64>, String> {
            (0..10)
                .map(|seed| {
                    run(&f, &bounds, &small_config(strategy, seed))
                        .map(|r| r.best_value)
                        .map_err(|e| e.to_string())
                })
                .collect()
        };
        let abc = bests(Strategy::SingleDim)?;
        for strategy in [Strategy::FullDim, Strategy::RandomMultiDim] {
            let v = bests(strategy)?;
            let losses = v.iter().zip(&abc).filter(|(a, b)| a > b).count();
            let (mv, ma) = (median(&v), median(&abc));
            ensure(mv <= ma, || {
                format!("{} on {}: median {mv:e} > ABC {ma:e}", strategy.label(), f.name())
            })?;
            ensure(losses <= 1, || {
                format!("{} on {}: worse than ABC on {losses}/10 seeds", strategy.label(), f.name())
            })?;
            if strategy == Strategy::FullDim && f == Benchmark::Step {
                ensure(mv <= 1e-6, || format!("fdABC Step median {mv:e} > 1e-6"))?;
            }
            detail.push(format!("{} {} {mv:.1e}", f.name(), strategy.label()));
        }
        detail.push(format!("{} ABC {:.1e}", f.name(), median(&abc)));
    }
    Ok(format!("medians: {}", detail.join(", ")))
}

fn parallel_determinism() -> Check {
    let started = Instant::now();
    let f = Benchmark::Rastrigin;
    let bounds = f.search_range(20).map_err(|e| e.to_string())?;
    let mut reference = None;
    for workers in [1, 2, 4] {
        let cfg = ColonyConfig {
            swarm_size: 50,
            dims: 20,
            limit: 50,
            max_iters: 200,
            strategy: Strategy::ParallelFullDim,
            workers,
            seed: 2024,
        };
        let r = run(&f, &bounds, &cfg).map_err(|e| e.to_string())?;
        let bits: (u64, Vec<u64>) = (r.best_value.to_bits(), r.best_position.iter().map(|x| x.to_bits()).collect());
        match &reference {
            None => reference = Some(bits),
            Some(want) => ensure(*want == bits, || format!("workers={workers} differs from workers=1"))?,
        }
    }
    within(started.elapsed(), Duration::from_secs(60))?;
    Ok(format!("workers 1/2/4 bit-identical, {:.1?}", started.elapsed()))
}

fn rmd_cost_advantage() -> Check {
    let f = Benchmark::Rastrigin;
    let bounds = f.search_range(30).map_err(|e| e.to_string())?;
    let mean_secs = |strategy| -> Result<f64, String> {
        let mut secs = Vec::new();
        for seed in 0..5 {
            let cfg = ColonyConfig {
                swarm_size: 100,
                dims: 30,
                limit: 100,
                max_iters: 300,
                strategy,
                workers: 1,
                seed,
            };
            secs.push(run(&f, &bounds, &cfg).map_err(|e| e.to_string())?.wall_time.as_secs_f64());
        }
        Ok(mean(&secs))
    };
    let fd = mean_secs(Strategy::FullDim)?;
    let rmd = mean_secs(Strategy::RandomMultiDim)?;
    ensure(rmd < fd, || format!("RmdABC {rmd:.3}s >= fdABC {fd:.3}s"))?;
    Ok(format!("RmdABC {rmd:.3}s vs fdABC {fd:.3}s mean wall time"))
}

/// Straight replay with direct travel times, no precomputed matrix.
fn replay_oracle(model: &ScheduleModel, keys: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap().then(a.cmp(&b)));
    let p = &model.params;
    let t = |a: &Position, b: &Position| travel_time(a, b, p).unwrap();
    let mut at = model.start;
    let mut total = 0.0;
    for idx in order {
        let task = &model.tasks[idx];
        let mut best: Option<(f64, f64, Position)> = None;
        let gates = match task.direction {
            Direction::Inbound => &model.layout.entrances,
            Direction::Outbound => &model.layout.exits,
        };
        for g in gates {
            let (l0, l1, end) = match task.direction {
                Direction::Inbound => (t(&at, &g.position), t(&g.position, &task.cell), task.cell),
                Direction::Outbound => (t(&at, &task.cell), t(&task.cell, &g.position), g.position),
            };
            if best.is_none_or(|(b0, b1, _)| l0 + l1 < b0 + b1) {
                best = Some((l0, l1, end));
            }
        }
        let (l0, l1, end) = best.unwrap();
        total += l0 + l1 + 2.0 * p.handling_time;
        at = end;
    }
    total
}

fn scheduling_feasibility() -> Check {
    let model = ScheduleModel::default_instance();
    let n = model.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let vectors: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .collect();
    for (v, keys) in vectors.iter().enumerate() {
        let mut order = smc_decode(keys).map_err(|e| e.to_string())?;
        order.sort_unstable();
        ensure(order == (0..n).collect::<Vec<_>>(), || format!("vector {v}: not a permutation"))?;
        let total = model.total_time(keys).map_err(|e| e.to_string())?;
        let oracle = replay_oracle(&model, keys);
        ensure(total == oracle, || format!("vector {v}: {total} vs oracle {oracle}"))?;
    }
    for m in 0..10 {
        let a = rng.gen_range(0.1..5.0);
        let b = rng.gen_range(-50.0..50.0);
        let c = rng.gen_range(0.01..0.3);
        let map = |x: f64| -> f64 {
            match m % 4 {
                0 => a * x + b,
                1 => (c * x).exp() + b,
                2 => a * x * x * x + x + b,
                _ => (x + 11.0).ln() * a,
            }
        };
        for (v, keys) in vectors.iter().enumerate() {
            let mapped: Vec<f64> = keys.iter().map(|&x| map(x)).collect();
            let (t0, t1) = (model.total_time(keys).unwrap(), model.total_time(&mapped).unwrap());
            ensure(t0 == t1, || format!("map {m}, vector {v}: {t0} vs {t1}"))?;
        }
    }
    Ok("100 vectors decode and match the oracle; 10 monotone maps preserve totals".into())
}

fn scheduling_ordering() -> Check {
    let started = Instant::now();
    let objective = beesched::scheduling::ScheduleObjective::from(ScheduleModel::default_instance());
    let bounds = objective.bounds();
    let totals = |strategy| -> Result<Vec<f64>, String> {
        (0..10)
            .map(|seed| {
                let cfg = ColonyConfig {
                    swarm_size: 60,
                    max_iters: 300,
                    seed,
                    ..ColonyConfig::new(bounds.dims(), strategy)
                };
                run(&objective, &bounds, &cfg)
                    .map(|r| r.best_value)
                    .map_err(|e| e.to_string())
            })
            .collect()
    };
    let abc = totals(Strategy::SingleDim)?;
    let mut detail = vec![format!("ABC {:.1}", mean(&abc))];
    for strategy in [Strategy::FullDim, Strategy::ParallelFullDim, Strategy::RandomMultiDim] {
        let v = totals(strategy)?;
        let inversions = v.iter().zip(&abc).filter(|(a, b)| a > b).count();
        ensure(mean(&v) <= mean(&abc), || {
            format!("{} mean {:.1} > ABC {:.1}", strategy.label(), mean(&v), mean(&abc))
        })?;
        ensure(inversions <= 1, || format!("{}: {inversions} inversions", strategy.label()))?;
        detail.push(format!("{} {:.1}", strategy.label(), mean(&v)));
    }
    within(started.elapsed(), Duration::from_secs(900))?;
    Ok(format!("mean totals {}, {:.0?}", detail.join(", "), started.elapsed()))
}

type MoveCase = (Vec<(f64, f64)>, Vec<f64>, Vec<f64>, usize, f64);

fn move_case() -> impl Gen<Value = MoveCase> {
    (1usize..16)
        .prop_flat_map(|dims| {
            collection::vec((-1e3f64..1e3, 0.0f64..500.0), dims).prop_flat_map(move |raw| {
                let boxes: Vec<(f64, f64)> = raw.iter().map(|&(lo, w)| (lo, lo + w)).collect();
                let point = |b: &[(f64, f64)]| {
                    b.iter()
                        .map(|&(lo, hi)| if hi > lo { (lo..=hi).boxed() } else { Just(lo).boxed() })
                        .collect::<Vec<_>>()
                };
                (
                    Just(boxes.clone()),
                    point(&boxes),
                    point(&boxes),
                    0..dims,
                    (-1.0f64..1.0).prop_filter("open interval", |p| *p > -1.0),
                )
            })
        })
}

fn neighbour_move_properties() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&move_case(), |(boxes, xi, mut xj, k, phi)| {
            let bounds = Bounds::new(boxes.iter().map(|b| b.0).collect(), boxes.iter().map(|b| b.1).collect())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let moved = neighbor_move(&xi, &xj, k, &bounds, phi).unwrap();
            prop_assert!(bounds.contains(&moved));
            for d in 0..xi.len() {
                if d != k {
                    prop_assert_eq!(moved[d].to_bits(), xi[d].to_bits());
                }
            }
            xj[k] = xi[k];
            let still = neighbor_move(&xi, &xj, k, &bounds, phi).unwrap();
            prop_assert_eq!(still, xi);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("10000 cases: in bounds, only k moves, equal partner coordinate is a no-op".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("time-cost matrix matches reference table", time_matrix_table),
        ("benchmark functions vanish at their optima", benchmark_optima),
        ("optimizer invariants (monotone best, greedy phases, bounds)", optimizer_invariants),
        ("variant dominance over ABC on Step and Rastrigin", variant_dominance),
        ("PfdABC bitwise determinism across worker counts", parallel_determinism),
        ("RmdABC cheaper than fdABC", rmd_cost_advantage),
        ("schedule decoding, oracle equivalence, key monotone invariance", scheduling_feasibility),
        ("schedule improvement ordering over ABC", scheduling_ordering),
        ("neighbour move properties", neighbour_move_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.1}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
