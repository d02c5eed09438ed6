//! The bandit loop: one policy against one environment for T rounds.

use crate::environment::{Environment, Task};
use crate::error::{Error, Result};
use crate::policy::{make_policy, Policy, PolicyConfig};
use crate::seed::{combine, stable_hash};
use crate::types::{PullRecord, RunTrace};

/// Seed of a policy's private stream within an episode.
pub fn policy_stream_seed(episode_seed: u64, policy_id: &str) -> u64 {
    combine(episode_seed, stable_hash(policy_id))
}

/// Runs `policy` for `horizon` rounds. The result is a pure function of the
/// environment state and the policy.
pub fn run_with_policy(env: &mut Environment<'_>, policy: &mut dyn Policy, horizon: u64) -> Result<Vec<PullRecord>> {
    let k = env.num_arms();
    if policy.num_arms() != k {
        return Err(Error::Config(format!(
            "policy built for {} arms, environment has {k}",
            policy.num_arms()
        )));
    }
    if horizon < policy.min_horizon() {
        return Err(Error::Config(format!(
            "horizon {horizon} is shorter than the {} rounds of initialization and burn-in",
            policy.min_horizon()
        )));
    }
    let mut records = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let arm = policy.select(t);
        let reward = env.pull(arm)?;
        policy.update(arm, reward);
        records.push(PullRecord { round: t, arm, reward });
    }
    Ok(records)
}

/// One full episode of `cfg` on `task`. Environment streams come from `seed`
/// alone; the policy's private stream also mixes in the policy id.
pub fn run_episode(task: &Task, cfg: &PolicyConfig, horizon: u64, repetition: u32, seed: u64) -> Result<RunTrace> {
    let k = task.num_arms();
    let mut policy = make_policy(cfg, k, policy_stream_seed(seed, cfg.id()))?;
    let mut env = task.environment(seed, repetition);
    let records = run_with_policy(&mut env, policy.as_mut(), horizon)?;
    Ok(RunTrace {
        task_id: task.id.clone(),
        policy_id: cfg.id().to_owned(),
        repetition,
        arms: k,
        horizon,
        records,
    })
}

/// Rewards of `horizon` consecutive pulls of a single arm: the single-arm
/// oracle episode. With shared seeds this is the exact sequence any policy
/// observes on that arm.
pub fn single_arm_rewards(task: &Task, arm: usize, horizon: u64, repetition: u32, seed: u64) -> Result<Vec<f64>> {
    let mut env = task.environment(seed, repetition);
    (0..horizon).map(|_| env.pull(arm).map(|r| r.value())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;
    use crate::environment::RewardTransform;
    use crate::trace::TraceTable;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn uniform_task() -> Task {
        Task::from_distributions(
            "u",
            [
                Distribution::TruncatedUniform { low: 0.0, high: 1.0 },
                Distribution::TruncatedUniform { low: 0.2, high: 0.9 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn init_only_horizon() {
        for cfg in [PolicyConfig::maxucb(0.5), PolicyConfig::ucb(0.5), PolicyConfig::random()] {
            let tr = run_episode(&uniform_task(), &cfg, 2, 0, 1).unwrap();
            assert_eq!(tr.arms_pulled().collect::<Vec<_>>(), vec![0, 1]);
            tr.validate().unwrap();
        }
    }

    #[test]
    fn episodes_are_deterministic() {
        for cfg in [PolicyConfig::maxucb(0.5), PolicyConfig::ucb(0.5), PolicyConfig::random()] {
            let a = run_episode(&uniform_task(), &cfg, 300, 4, 77).unwrap();
            let b = run_episode(&uniform_task(), &cfg, 300, 4, 77).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.pull_counts().iter().sum::<u64>(), 300);
            assert!(a.pull_counts().iter().all(|&c| c >= 1));
        }
    }

    #[test]
    fn greedy_on_dominant_trace() {
        let losses = vec![
            BTreeMap::from([(0u32, vec![1.0; 10])]),
            BTreeMap::from([(0u32, vec![0.0; 10])]),
        ];
        let table = Arc::new(TraceTable::from_sequences("d", losses).unwrap());
        let task = Task::from_trace(table, RewardTransform::Identity).unwrap();
        let tr = run_episode(&task, &PolicyConfig::maxucb(0.0), 10, 0, 0).unwrap();
        assert_eq!(tr.pull_counts(), vec![9, 1]);
    }

    #[test]
    fn horizon_shorter_than_burn_in_is_rejected() {
        let mut cfg = PolicyConfig::maxucb(0.5);
        cfg.burn_in_c = Some(2);
        assert!(matches!(
            run_episode(&uniform_task(), &cfg, 5, 0, 0),
            Err(Error::Config(_))
        ));
        assert!(run_episode(&uniform_task(), &cfg, 6, 0, 0).is_ok());
    }

    #[test]
    fn single_arm_matches_policy_observations() {
        let task = uniform_task();
        let tr = run_episode(&task, &PolicyConfig::random(), 200, 0, 5).unwrap();
        let arm1: Vec<f64> = tr.records.iter().filter(|r| r.arm == 1).map(|r| r.reward.value()).collect();
        let oracle = single_arm_rewards(&task, 1, arm1.len() as u64, 0, 5).unwrap();
        assert_eq!(arm1, oracle);
    }
}
