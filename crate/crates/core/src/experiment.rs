//! In-memory experiments: many repetitions of several policies on one task,
//! plus the single-arm oracle episodes, and the horizon report built on them.

use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::environment::Task;
use crate::episode::{run_episode, single_arm_rewards};
use crate::error::{Error, Result};
use crate::metrics::max_so_far;
use crate::policy::{argmax_lowest, PolicyConfig};
use crate::seed::episode_seed;

/// One policy episode: arms pulled and rewards, round by round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Episode {
    pub arms: Vec<usize>,
    pub rewards: Vec<f64>,
}

impl Episode {
    pub fn pull_counts(&self, k: usize) -> Vec<u64> {
        let mut c = vec![0; k];
        for &a in &self.arms {
            c[a] += 1;
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct TaskResults {
    pub id: String,
    pub arms: usize,
    pub horizon: usize,
    /// policy id -> repetition -> episode
    pub runs: BTreeMap<String, BTreeMap<u32, Episode>>,
    /// arm -> repetition -> single-arm rewards
    pub oracle: Vec<BTreeMap<u32, Vec<f64>>>,
}

impl TaskResults {
    /// Max-so-far curves of a policy, one per repetition (ascending).
    pub fn policy_curves(&self, policy: &str) -> Vec<Vec<f64>> {
        self.runs
            .get(policy)
            .map(|reps| reps.values().map(|e| max_so_far(e.rewards.iter().copied())).collect())
            .unwrap_or_default()
    }

    /// `[arm][repetition]` max-so-far curves of the oracle episodes.
    pub fn oracle_curves(&self) -> Vec<Vec<Vec<f64>>> {
        self.oracle
            .iter()
            .map(|reps| reps.values().map(|r| max_so_far(r.iter().copied())).collect())
            .collect()
    }

    /// `[arm][repetition]` raw oracle rewards.
    pub fn oracle_rewards(&self) -> Vec<Vec<Vec<f64>>> {
        self.oracle.iter().map(|reps| reps.values().cloned().collect()).collect()
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.iter().all(|reps| !reps.is_empty())
    }
}

/// Runs `repetitions` episodes of every policy and the oracle episodes of
/// every arm with the seeds `run` would use for the same base seed.
pub fn simulate(
    task: &Task,
    policies: &[PolicyConfig],
    horizon: u64,
    repetitions: u32,
    base_seed: u64,
) -> Result<TaskResults> {
    let one = |rep: u32| -> Result<(Vec<Episode>, Vec<Vec<f64>>)> {
        let seed = episode_seed(base_seed, &task.id, rep);
        let episodes = policies
            .iter()
            .map(|p| {
                let tr = run_episode(task, p, horizon, rep, seed)?;
                Ok(Episode {
                    arms: tr.arms_pulled().collect(),
                    rewards: tr.rewards().collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let oracle = (0..task.num_arms())
            .map(|arm| single_arm_rewards(task, arm, horizon, rep, seed))
            .collect::<Result<Vec<_>>>()?;
        Ok((episodes, oracle))
    };
    #[cfg(feature = "parallel")]
    let per_rep: Vec<_> = (0..repetitions).into_par_iter().map(one).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let per_rep: Vec<_> = (0..repetitions).map(one).collect::<Result<_>>()?;

    let mut runs: BTreeMap<String, BTreeMap<u32, Episode>> = BTreeMap::new();
    let mut oracle = vec![BTreeMap::new(); task.num_arms()];
    for (rep, (episodes, arms)) in (0..repetitions).zip(per_rep) {
        for (p, ep) in policies.iter().zip(episodes) {
            runs.entry(p.id().to_owned()).or_default().insert(rep, ep);
        }
        for (arm, rewards) in arms.into_iter().enumerate() {
            oracle[arm].insert(rep, rewards);
        }
    }
    Ok(TaskResults {
        id: task.id.clone(),
        arms: task.num_arms(),
        horizon: horizon as usize,
        runs,
        oracle,
    })
}

/// Horizons reported by the synthetic benchmarks.
pub const BENCH_HORIZONS: [usize; 6] = [50, 100, 200, 500, 1000, 2000];

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonRow {
    pub policy: String,
    pub horizon: usize,
    /// Arm with the largest mean oracle max at this horizon.
    pub best_arm: usize,
    pub proxy_regret: f64,
    /// Mean over repetitions of best-arm pulls in the first `horizon` rounds.
    pub optimal_pulls: f64,
}

/// Proxy regret and optimal-arm pulls at each horizon, read off prefixes of
/// the full-length episodes (every policy here picks arms without knowing T).
pub fn horizon_report(results: &TaskResults, policies: &[String], horizons: &[usize]) -> Result<Vec<HorizonRow>> {
    if !results.has_oracle() {
        return Err(Error::Results(format!("task `{}` has no oracle episodes", results.id)));
    }
    let oracle = results.oracle_curves();
    let mut rows = Vec::new();
    for &h in horizons {
        if h == 0 || h > results.horizon {
            return Err(Error::Domain(format!("horizon {h} outside 1..={}", results.horizon)));
        }
        let means: Vec<f64> = oracle
            .iter()
            .map(|reps| reps.iter().map(|c| c[h - 1]).sum::<f64>() / reps.len() as f64)
            .collect();
        let best_arm = argmax_lowest(means.iter().copied());
        for p in policies {
            let reps = results
                .runs
                .get(p)
                .filter(|r| !r.is_empty())
                .ok_or_else(|| Error::Results(format!("policy `{p}` has no episodes")))?;
            let n = reps.len() as f64;
            let mean_max = reps
                .values()
                .map(|e| e.rewards[..h].iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .sum::<f64>()
                / n;
            let pulls = reps.values().map(|e| e.arms[..h].iter().filter(|&&a| a == best_arm).count()).sum::<usize>() as f64 / n;
            rows.push(HorizonRow {
                policy: p.clone(),
                horizon: h,
                best_arm,
                proxy_regret: means[best_arm] - mean_max,
                optimal_pulls: pulls,
            });
        }
    }
    Ok(rows)
}
