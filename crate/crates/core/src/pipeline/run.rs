//! `run`: every (task, policy, repetition) cell plus the single-arm oracle
//! episodes, staged per cell and merged per task in canonical order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{load_config, ExperimentConfig};
use super::fsutil::{create_dir, write_atomic, write_if_changed};
use super::manifest::{Cell, CellStatus, RunManifest, TaskEntry, MANIFEST_FILE, ORACLE_ID};
use crate::environment::Task;
use crate::episode::{run_episode, single_arm_rewards};
use crate::error::{Error, Result};
use crate::policy::PolicyConfig;
use crate::seed::episode_seed;

pub const RESULTS_HEADER: &str = "policy,repetition,t,arm,reward";
pub const ORACLE_HEADER: &str = "arm,repetition,t,reward";
const STAGING_DIR: &str = "cells";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Worker threads; 0 picks the number of CPUs.
    pub parallelism: usize,
    pub resume: bool,
}

#[derive(Debug)]
pub struct RunSummary {
    pub manifest: RunManifest,
    /// Cells executed by this invocation.
    pub executed: usize,
    pub failures: Vec<(Cell, Error)>,
}

impl RunSummary {
    /// Ok when every cell is complete. If nothing succeeded the first cell
    /// error is returned as is; otherwise a partial-failure summary.
    pub fn into_result(self) -> Result<RunManifest> {
        let Some((first_cell, _)) = self.failures.first() else {
            return Ok(self.manifest);
        };
        let completed = self.manifest.cells.len() - self.manifest.incomplete();
        if completed == 0 {
            return Err(self.failures.into_iter().next().expect("non-empty").1);
        }
        let (_, first) = &self.failures[0];
        Err(Error::Results(format!(
            "{} of {} cells failed; first: task `{}` policy `{}` repetition {}: {first}",
            self.failures.len(),
            self.manifest.cells.len(),
            first_cell.task,
            first_cell.policy,
            first_cell.repetition
        )))
    }
}

pub fn results_path(out: &Path, task: &str) -> PathBuf {
    out.join(format!("{task}.results.csv"))
}

pub fn oracle_path(out: &Path, task: &str) -> PathBuf {
    out.join(format!("{task}.oracle.csv"))
}

fn staged_path(out: &Path, cell: &Cell) -> PathBuf {
    out.join(STAGING_DIR)
        .join(&cell.task)
        .join(&cell.policy)
        .join(format!("{}.csv", cell.repetition))
}

/// Runs the config file at `config_path` into `out`.
pub fn cmd_run(config_path: &Path, out: &Path, opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config(config_path)?;
    let tasks = loaded.config.resolve_tasks(&loaded.base_dir)?;
    run_experiment(&loaded.config, &tasks, &loaded.digest, out, opts)
}

/// Runs already-resolved tasks. `digest` identifies the configuration for
/// resume checks.
pub fn run_experiment(
    config: &ExperimentConfig,
    tasks: &[Task],
    digest: &str,
    out: &Path,
    opts: &RunOptions,
) -> Result<RunSummary> {
    if config.policies.is_empty() {
        return Err(Error::Config("no policies configured".into()));
    }
    let base_seed = opts.seed.unwrap_or(config.seed);
    let fresh = RunManifest::new(
        digest.to_owned(),
        base_seed,
        config.horizon,
        config.repetitions,
        tasks
            .iter()
            .map(|t| TaskEntry {
                id: t.id.clone(),
                arms: t.num_arms(),
            })
            .collect(),
        config.policies.iter().map(|p| p.id().to_owned()).collect(),
    );
    let mut manifest = fresh.clone();
    if opts.resume {
        if let Ok(previous) = RunManifest::load(out) {
            if !previous.same_experiment(&fresh) {
                return Err(Error::Config(format!(
                    "{} belongs to a different experiment (config, seed or version changed); \
                     use a new output directory or run without --resume",
                    out.join(MANIFEST_FILE).display()
                )));
            }
            // Staged files are written atomically, so their presence marks
            // completion even if the previous run stopped before updating
            // the manifest.
            for cell in &mut manifest.cells {
                if staged_path(out, cell).is_file() {
                    cell.status = CellStatus::Complete;
                }
            }
        }
    }
    create_dir(out)?;
    write_if_changed(&out.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;

    let pending: Vec<usize> = (0..manifest.cells.len())
        .filter(|&i| manifest.cells[i].status != CellStatus::Complete)
        .collect();
    let work = |&i: &usize| {
        let cell = &manifest.cells[i];
        let task = tasks.iter().find(|t| t.id == cell.task).expect("task of cell");
        let result = cell_rows(task, config, cell, base_seed)
            .and_then(|rows| write_atomic(&staged_path(out, cell), rows.as_bytes()));
        (i, result)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<(usize, Result<()>)> = pool.install(|| pending.par_iter().map(work).collect());

    let mut failures = Vec::new();
    for (i, result) in outcomes {
        let cell = &mut manifest.cells[i];
        match result {
            Ok(()) => {
                cell.status = CellStatus::Complete;
                cell.error = None;
            }
            Err(e) => {
                cell.status = CellStatus::Failed;
                cell.error = Some(e.to_string());
                failures.push((cell.clone(), e));
            }
        }
    }
    merge(out, &manifest)?;
    write_if_changed(&out.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
    Ok(RunSummary {
        manifest,
        executed: pending.len(),
        failures,
    })
}

/// CSV rows (no header) of one cell.
fn cell_rows(task: &Task, config: &ExperimentConfig, cell: &Cell, base_seed: u64) -> Result<String> {
    let seed = episode_seed(base_seed, &task.id, cell.repetition);
    let rep = cell.repetition;
    let mut out = String::new();
    if cell.policy == ORACLE_ID {
        for arm in 0..task.num_arms() {
            let rewards = single_arm_rewards(task, arm, config.horizon, rep, seed)?;
            for (t, r) in rewards.iter().enumerate() {
                writeln!(out, "{arm},{rep},{},{r}", t + 1).expect("string write");
            }
        }
    } else {
        let policy: &PolicyConfig = config
            .policies
            .iter()
            .find(|p| p.id() == cell.policy)
            .expect("policy of cell");
        let trace = run_episode(task, policy, config.horizon, rep, seed)?;
        for rec in &trace.records {
            writeln!(out, "{},{rep},{},{},{}", cell.policy, rec.round, rec.arm, rec.reward).expect("string write");
        }
    }
    Ok(out)
}

/// Concatenates the staged files of complete cells, task by task.
fn merge(out: &Path, manifest: &RunManifest) -> Result<()> {
    for task in &manifest.tasks {
        let mut results = format!("{RESULTS_HEADER}\n").into_bytes();
        let mut oracle = format!("{ORACLE_HEADER}\n").into_bytes();
        for cell in manifest.cells.iter().filter(|c| c.task == task.id && c.status == CellStatus::Complete) {
            let path = staged_path(out, cell);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(path, e))?;
            if cell.policy == ORACLE_ID {
                oracle.extend(bytes);
            } else {
                results.extend(bytes);
            }
        }
        write_if_changed(&results_path(out, &task.id), &results)?;
        write_if_changed(&oracle_path(out, &task.id), &oracle)?;
    }
    Ok(())
}
