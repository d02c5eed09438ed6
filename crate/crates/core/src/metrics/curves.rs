use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::RunTrace;

/// Best reward observed up to each round.
pub type MaxSoFarCurve = Vec<f64>;

pub fn max_so_far(rewards: impl IntoIterator<Item = f64>) -> MaxSoFarCurve {
    let mut best = f64::NEG_INFINITY;
    rewards
        .into_iter()
        .map(|r| {
            best = best.max(r);
            best
        })
        .collect()
}

/// Pointwise mean of equally long curves.
pub fn mean_curve(curves: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = curves.first().ok_or_else(|| Error::Ragged("no curves".into()))?;
    let len = first.len();
    let mut acc = vec![0.0; len];
    for c in curves {
        if c.len() != len {
            return Err(Error::Ragged(format!("curve of length {} among curves of length {len}", c.len())));
        }
        for (a, v) in acc.iter_mut().zip(c) {
            *a += v;
        }
    }
    let n = curves.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Proxy empirical regret at every round up to T: the best arm's mean
/// single-arm max-so-far minus the policy's mean max-so-far.
///
/// `policy` holds one max-so-far curve per repetition; `oracle[i]` holds the
/// max-so-far curves of single-arm episodes of arm i.
pub fn proxy_regret_curve(policy: &[Vec<f64>], oracle: &[Vec<Vec<f64>>], horizon: usize) -> Result<Vec<f64>> {
    let check = |c: &Vec<f64>| {
        if c.len() == horizon {
            Ok(())
        } else {
            Err(Error::Ragged(format!("curve length {} does not match T = {horizon}", c.len())))
        }
    };
    policy.iter().try_for_each(check)?;
    oracle.iter().flatten().try_for_each(check)?;
    if oracle.is_empty() {
        return Err(Error::Ragged("no oracle arms".into()));
    }
    let policy_mean = mean_curve(policy)?;
    let oracle_means = oracle.iter().map(|c| mean_curve(c)).collect::<Result<Vec<_>>>()?;
    Ok((0..horizon)
        .map(|t| {
            let best = oracle_means.iter().map(|m| m[t]).fold(f64::NEG_INFINITY, f64::max);
            best - policy_mean[t]
        })
        .collect())
}

/// Proxy empirical regret at T.
pub fn proxy_regret(policy: &[Vec<f64>], oracle: &[Vec<Vec<f64>>], horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::Ragged("T must be positive".into()));
    }
    Ok(proxy_regret_curve(policy, oracle, horizon)?[horizon - 1])
}

pub fn optimal_pull_count(trace: &RunTrace, best_arm: usize) -> usize {
    trace.arms_pulled().filter(|&a| a == best_arm).count()
}

/// Min-max normalizes every value of one task's best-so-far loss curves,
/// using the extremes over all policies, repetitions and rounds. A constant
/// task maps to zeros.
pub fn normalized_loss<K: Ord + Clone>(curves: &BTreeMap<K, Vec<f64>>) -> BTreeMap<K, Vec<f64>> {
    let (lo, hi) = curves
        .values()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    curves
        .iter()
        .map(|(k, c)| {
            let norm = c
                .iter()
                .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
                .collect();
            (k.clone(), norm)
        })
        .collect()
}
