//! `shape`: per-arm tail-shape constants, gaps and the balanced exploration
//! parameter for a trace file or the tasks of a config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::config::load_config;
use super::fsutil::write_atomic;
use crate::analysis::{balanced_alpha, estimate_gaps, estimate_shape_constants, ShapeConstants, DEFAULT_GRID_SIZE};
use crate::environment::{ArmSource, RewardTransform, Task};
use crate::episode::single_arm_rewards;
use crate::error::{Error, Result};
use crate::seed::{combine, episode_seed, stable_hash};
use crate::trace::load_trace_table;

pub const SHAPE_HEADER: &str = "task,arm,n_samples,b_hat,L,U,delta_i,alpha_corollary";
/// Marker written in the L and U columns of arms excluded from estimation.
pub const SKIPPED: &str = "skipped";

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeRow {
    pub task: String,
    pub arm: usize,
    pub n_samples: usize,
    pub b_hat: f64,
    /// None when the arm was skipped (too few samples or degenerate).
    pub constants: Option<(f64, f64)>,
    pub delta: f64,
    /// Same for every arm of a task; None when any input is unavailable.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ShapeOptions {
    /// Samples per synthetic arm; overrides the config value.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Shape rows of one task from per-arm samples and per-arm repetitions of
/// length at least `horizon` for the gap estimate.
pub fn shape_rows(task_id: &str, samples: &[Vec<f64>], gap_reps: &[Vec<Vec<f64>>], horizon: usize) -> Result<Vec<ShapeRow>> {
    let gaps = estimate_gaps(gap_reps, horizon)?;
    let constants: Vec<Option<ShapeConstants>> = samples
        .iter()
        .map(|s| match estimate_shape_constants(s, DEFAULT_GRID_SIZE) {
            Ok(c) => Ok(Some(c)),
            Err(Error::InsufficientData { .. } | Error::DegenerateSupport(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let alpha = match (&constants[gaps.best_arm], gaps.min_positive_gap()) {
        (Some(best), Some(dmin)) => balanced_alpha(best.l, dmin, horizon as u64).ok(),
        _ => None,
    };
    Ok(samples
        .iter()
        .enumerate()
        .map(|(arm, s)| ShapeRow {
            task: task_id.to_owned(),
            arm,
            n_samples: s.len(),
            b_hat: s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            constants: constants[arm].as_ref().map(|c| (c.l, c.u)),
            delta: gaps.gaps[arm],
            alpha,
        })
        .collect())
}

pub fn shape_csv(rows: &[ShapeRow]) -> String {
    let mut out = format!("{SHAPE_HEADER}\n");
    for r in rows {
        let (l, u) = match r.constants {
            Some((l, u)) => (l.to_string(), u.to_string()),
            None => (SKIPPED.to_owned(), SKIPPED.to_owned()),
        };
        let alpha = r.alpha.map(|a| a.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{l},{u},{},{alpha}", r.task, r.arm, r.n_samples, r.b_hat, r.delta).expect("string write");
    }
    out
}

/// A `.csv` input is a trace file; anything else is an experiment config.
/// `out` ending in `.csv` is the report path, otherwise a directory that
/// receives `shape.csv`.
pub fn cmd_shape(input: &Path, out: &Path, opts: &ShapeOptions) -> Result<Vec<ShapeRow>> {
    let rows = if input.extension().is_some_and(|e| e == "csv") {
        let table = Arc::new(load_trace_table(input)?);
        let task = Task::from_trace(Arc::clone(&table), RewardTransform::default())?;
        let horizon = table.min_len();
        task_rows(&task, None, horizon, 0, 0)?
    } else {
        let loaded = load_config(input)?;
        let c = &loaded.config;
        let tasks = c.resolve_tasks(&loaded.base_dir)?;
        let seed = opts.seed.unwrap_or(c.seed);
        let budget = opts.samples.unwrap_or(c.shape_samples);
        let mut rows = Vec::new();
        for task in &tasks {
            rows.extend(task_rows(task, Some(budget), c.horizon as usize, c.repetitions, seed)?);
        }
        rows
    };
    let path = report_path(out);
    write_atomic(&path, shape_csv(&rows).as_bytes())?;
    Ok(rows)
}

pub fn report_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "csv") {
        out.to_path_buf()
    } else {
        out.join("shape.csv")
    }
}

/// Trace arms contribute every stored reward; synthetic arms draw `budget`
/// samples. Gap repetitions replay the trace, or run `reps` single-arm
/// episodes with the seeds of `run`.
fn task_rows(task: &Task, budget: Option<usize>, horizon: usize, reps: u32, seed: u64) -> Result<Vec<ShapeRow>> {
    let mut samples = Vec::new();
    let mut gap_reps = Vec::new();
    for (arm, src) in task.arms.iter().enumerate() {
        match src {
            ArmSource::Replay { table, arm: col, transform } => {
                let seqs: Vec<Vec<f64>> = table
                    .repetitions(*col)
                    .filter_map(|r| table.sequence(*col, r))
                    .map(|s| s.iter().map(|&l| transform.apply(l)).collect())
                    .collect();
                samples.push(seqs.concat());
                gap_reps.push(seqs);
            }
            ArmSource::Sampler(_) => {
                let n = budget.ok_or_else(|| Error::Config("sample budget required".into()))?;
                let s = combine(seed, stable_hash("shape"));
                samples.push(single_arm_rewards(task, arm, n as u64, 0, combine(s, stable_hash(&task.id)))?);
                gap_reps.push(
                    (0..reps)
                        .map(|r| single_arm_rewards(task, arm, horizon as u64, r, episode_seed(seed, &task.id, r)))
                        .collect::<Result<_>>()?,
                );
            }
        }
    }
    shape_rows(&task.id, &samples, &gap_reps, horizon)
}
