use crate::error::{Error, Result};
use crate::policy::argmax_lowest;

/// Suboptimality gaps between expected max-of-T rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEstimate {
    pub horizon: usize,
    /// Mean over repetitions of the max of the first T rewards, per arm.
    pub expected_max: Vec<f64>,
    pub best_arm: usize,
    pub gaps: Vec<f64>,
}

impl GapEstimate {
    /// Smallest gap among suboptimal arms, if any is positive.
    pub fn min_positive_gap(&self) -> Option<f64> {
        self.gaps
            .iter()
            .enumerate()
            .filter(|&(i, &g)| i != self.best_arm && g > 0.0)
            .map(|(_, &g)| g)
            .reduce(f64::min)
    }
}

/// `arms[i][r]` holds repetition r of arm i; only the first `horizon`
/// rewards of each repetition are used.
pub fn estimate_gaps(arms: &[Vec<Vec<f64>>], horizon: usize) -> Result<GapEstimate> {
    if arms.is_empty() || horizon == 0 {
        return Err(Error::Ragged("need at least one arm and T >= 1".into()));
    }
    let mut expected_max = Vec::with_capacity(arms.len());
    for (i, reps) in arms.iter().enumerate() {
        if reps.is_empty() {
            return Err(Error::Ragged(format!("arm {i} has no repetitions")));
        }
        let mut total = 0.0;
        for (r, seq) in reps.iter().enumerate() {
            if seq.len() < horizon {
                return Err(Error::Ragged(format!(
                    "arm {i} repetition {r} has {} rewards, need {horizon}",
                    seq.len()
                )));
            }
            total += seq[..horizon].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        expected_max.push(total / reps.len() as f64);
    }
    let best_arm = argmax_lowest(expected_max.iter().copied());
    let top = expected_max[best_arm];
    let gaps = expected_max.iter().map(|v| top - v).collect();
    Ok(GapEstimate {
        horizon,
        expected_max,
        best_arm,
        gaps,
    })
}
