//! `bench`: the built-in synthetic experiments with MaxUCB, classical UCB
//! and uniform random selection under shared seeds.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{sha256_hex, ExperimentConfig, DEFAULT_SHAPE_SAMPLES};
use super::fsutil::{create_dir, write_if_changed};
use super::results::load_results;
use super::run::{run_experiment, RunOptions};
use crate::distribution::Distribution;
use crate::environment::TaskSpec;
use crate::error::{Error, Result};
use crate::experiment::{horizon_report, HorizonRow, BENCH_HORIZONS};
use crate::policy::PolicyConfig;

pub const BENCH_FILE: &str = "bench.csv";
pub const BENCH_HEADER: &str = "task,policy,horizon,best_arm,proxy_regret,optimal_pulls";

/// Arm definitions of synthetic experiments 1 to 4.
pub fn experiment_arms(id: u8) -> Result<Vec<Distribution>> {
    Ok(match id {
        1 => [2.1, 2.3, 1.3, 1.1, 1.9]
            .into_iter()
            .map(|tail| Distribution::Pareto { tail })
            .collect(),
        2 => [2.1, 2.4, 1.9, 1.3, 1.1, 2.9, 1.5, 2.2, 2.6, 1.4]
            .into_iter()
            .map(|rate| Distribution::Exponential { rate })
            .collect(),
        3 => [
            1.64, 2.29, 1.79, 2.67, 1.70, 1.36, 1.90, 2.19, 0.80, 0.12, 1.65, 1.19, 1.88, 0.89, 3.35, 1.5, 2.22, 3.03,
            1.08, 0.48,
        ]
        .into_iter()
        .map(|std| Distribution::Gaussian { mean: 1.0, std })
        .collect(),
        4 => [(3.0, 1.01), (4.0, 1.01), (5.0, 1.01), (5.0, 1.1), (4.0, 1.0)]
            .into_iter()
            .map(|(scale, shape)| Distribution::Power { shape, scale })
            .collect(),
        other => return Err(Error::Config(format!("unknown experiment {other}; expected 1, 2, 3 or 4"))),
    })
}

pub fn bench_policies() -> Vec<PolicyConfig> {
    vec![PolicyConfig::maxucb(0.5), PolicyConfig::ucb(0.5), PolicyConfig::random()]
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub experiment: u8,
    pub horizon: u64,
    pub repetitions: u32,
    pub seed: u64,
    pub parallelism: usize,
    pub resume: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            experiment: 1,
            horizon: 2000,
            repetitions: 1000,
            seed: 0,
            parallelism: 0,
            resume: false,
        }
    }
}

pub fn bench_config(opts: &BenchOptions) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        horizon: opts.horizon,
        repetitions: opts.repetitions,
        seed: opts.seed,
        shape_samples: DEFAULT_SHAPE_SAMPLES,
        tasks: vec![TaskSpec::synthetic(
            &format!("experiment{}", opts.experiment),
            experiment_arms(opts.experiment)?,
        )],
        policies: bench_policies(),
    })
}

/// Writes `config.toml`, the run files and `bench.csv` into `out`.
pub fn cmd_bench(out: &Path, opts: &BenchOptions) -> Result<Vec<HorizonRow>> {
    let config = bench_config(opts)?;
    config.validate()?;
    let text = config.to_toml();
    create_dir(out)?;
    write_if_changed(&out.join("config.toml"), text.as_bytes())?;
    let tasks = config.resolve_tasks(out)?;
    let run = RunOptions {
        seed: None,
        parallelism: opts.parallelism,
        resume: opts.resume,
    };
    run_experiment(&config, &tasks, &sha256_hex(text.as_bytes()), out, &run)?.into_result()?;

    let results = load_results(out, false)?;
    let horizons: Vec<usize> = BENCH_HORIZONS.into_iter().filter(|&h| h as u64 <= opts.horizon).collect();
    let horizons = if horizons.is_empty() { vec![opts.horizon as usize] } else { horizons };
    let rows = horizon_report(&results.tasks[0], &results.manifest.policies, &horizons)?;
    write_if_changed(&out.join(BENCH_FILE), bench_csv(&results.tasks[0].id, &rows).as_bytes())?;
    Ok(rows)
}

pub fn bench_csv(task: &str, rows: &[HorizonRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n");
    for r in rows {
        writeln!(out, "{task},{},{},{},{},{}", r.policy, r.horizon, r.best_arm, r.proxy_regret, r.optimal_pulls)
            .expect("string write");
    }
    out
}
