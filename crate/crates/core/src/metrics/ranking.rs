//! Average ranks across tasks with bootstrap confidence intervals.
//!
//! For every bootstrap iteration, each (task, algorithm) resamples its
//! repetitions with replacement and averages them per round; algorithms are
//! ranked per task and round (1 = best, ties share the averaged rank) and the
//! ranks are averaged over tasks. The summary reports the mean over
//! iterations and the 2.5 / 97.5 percentiles.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{combine, rng_from_seed};

pub const BOOTSTRAP_ITERATIONS: usize = 1000;
const CI_LOW: f64 = 0.025;
const CI_HIGH: f64 = 0.975;

/// Fractional ranking: 1 for the largest value, ties get the mean of the
/// positions they span.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Linear-interpolation percentile of unsorted data, `p` in [0, 1].
pub fn percentile(data: &mut [f64], p: f64) -> f64 {
    data.sort_by(f64::total_cmp);
    let pos = p * (data.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    data[lo] + (data[hi] - data[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    /// `[algorithm][round]`
    pub mean_rank: Vec<Vec<f64>>,
    pub ci_low: Vec<Vec<f64>>,
    pub ci_high: Vec<Vec<f64>>,
}

/// `tasks[task][algorithm][repetition][round]` holds performance (higher is
/// better). All tasks must list the same algorithms, and all curves share one
/// length.
pub fn bootstrap_average_rank(tasks: &[Vec<Vec<Vec<f64>>>], iterations: usize, seed: u64) -> Result<RankSummary> {
    let (algs, rounds) = validate(tasks)?;
    if iterations == 0 {
        return Err(Error::Domain("bootstrap needs at least one iteration".into()));
    }

    let run = |it: usize| iteration_ranks(tasks, algs, rounds, combine(seed, it as u64));
    #[cfg(feature = "parallel")]
    let samples: Vec<Vec<f64>> = (0..iterations).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<Vec<f64>> = (0..iterations).map(run).collect();

    let mut mean_rank = vec![vec![0.0; rounds]; algs];
    let mut ci_low = vec![vec![0.0; rounds]; algs];
    let mut ci_high = vec![vec![0.0; rounds]; algs];
    let mut column = vec![0.0; iterations];
    for a in 0..algs {
        for t in 0..rounds {
            for (c, s) in column.iter_mut().zip(&samples) {
                *c = s[a * rounds + t];
            }
            mean_rank[a][t] = column.iter().sum::<f64>() / iterations as f64;
            ci_low[a][t] = percentile(&mut column, CI_LOW);
            ci_high[a][t] = percentile(&mut column, CI_HIGH);
        }
    }
    Ok(RankSummary {
        mean_rank,
        ci_low,
        ci_high,
    })
}

fn validate(tasks: &[Vec<Vec<Vec<f64>>>]) -> Result<(usize, usize)> {
    let first = tasks.first().ok_or_else(|| Error::Ragged("no tasks".into()))?;
    let algs = first.len();
    if algs == 0 {
        return Err(Error::Ragged("no algorithms".into()));
    }
    let rounds = first
        .first()
        .and_then(|reps| reps.first())
        .map(Vec::len)
        .ok_or_else(|| Error::Ragged("algorithm without repetitions".into()))?;
    for (ti, task) in tasks.iter().enumerate() {
        if task.len() != algs {
            return Err(Error::Ragged(format!("task {ti} has {} algorithms, expected {algs}", task.len())));
        }
        for (ai, reps) in task.iter().enumerate() {
            if reps.is_empty() {
                return Err(Error::Ragged(format!("task {ti} algorithm {ai} has no repetitions")));
            }
            if reps.iter().any(|c| c.len() != rounds) {
                return Err(Error::Ragged(format!("task {ti} algorithm {ai} has curves not of length {rounds}")));
            }
        }
    }
    Ok((algs, rounds))
}

/// Task-averaged ranks of one bootstrap iteration, flattened `[alg * rounds + t]`.
fn iteration_ranks(tasks: &[Vec<Vec<Vec<f64>>>], algs: usize, rounds: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut acc = vec![0.0; algs * rounds];
    let mut means = vec![vec![0.0; rounds]; algs];
    let mut column = vec![0.0; algs];
    for task in tasks {
        for (a, reps) in task.iter().enumerate() {
            let m = &mut means[a];
            m.iter_mut().for_each(|v| *v = 0.0);
            for _ in 0..reps.len() {
                let pick = &reps[rng.random_range(0..reps.len())];
                for (v, x) in m.iter_mut().zip(pick) {
                    *v += x;
                }
            }
            let n = reps.len() as f64;
            m.iter_mut().for_each(|v| *v /= n);
        }
        for t in 0..rounds {
            for a in 0..algs {
                column[a] = means[a][t];
            }
            for (a, r) in fractional_ranks(&column).into_iter().enumerate() {
                acc[a * rounds + t] += r;
            }
        }
    }
    let n = tasks.len() as f64;
    acc.iter_mut().for_each(|v| *v /= n);
    acc
}
