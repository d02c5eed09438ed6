//! Domain types shared by environments, policies and the experiment pipeline.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single observed reward (negative loss). Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Reward(f64);

impl Reward {
    pub fn new(value: f64) -> Option<Self> {
        value.is_finite().then_some(Reward(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Reward {
    type Error = String;

    fn try_from(value: f64) -> std::result::Result<Self, Self::Error> {
        Reward::new(value).ok_or_else(|| format!("non-finite reward {value}"))
    }
}

impl From<Reward> for f64 {
    fn from(r: Reward) -> f64 {
        r.0
    }
}

impl fmt::Display for Reward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// One round of an episode. `round` is 1-based, `arm` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullRecord {
    pub round: u64,
    pub arm: usize,
    pub reward: Reward,
}

/// Ordered pull records of one (task, policy, repetition) episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub task_id: String,
    pub policy_id: String,
    pub repetition: u32,
    pub arms: usize,
    pub horizon: u64,
    pub records: Vec<PullRecord>,
}

impl RunTrace {
    /// Per-arm pull counts N_i(T).
    pub fn pull_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.arms];
        for r in &self.records {
            counts[r.arm] += 1;
        }
        counts
    }

    pub fn rewards(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.reward.value())
    }

    pub fn arms_pulled(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().map(|r| r.arm)
    }

    /// Checks the completed-run invariants: rounds are 1..=T in order and
    /// the record count equals the horizon.
    pub fn validate(&self) -> Result<()> {
        if self.records.len() as u64 != self.horizon {
            return Err(Error::Results(format!(
                "trace has {} records for horizon {}",
                self.records.len(),
                self.horizon
            )));
        }
        for (i, r) in self.records.iter().enumerate() {
            if r.round != i as u64 + 1 {
                return Err(Error::Results(format!(
                    "record {i} has round {} (expected {})",
                    r.round,
                    i + 1
                )));
            }
            if r.arm >= self.arms {
                return Err(Error::ArmOutOfRange {
                    arm: r.arm,
                    arms: self.arms,
                });
            }
        }
        Ok(())
    }
}
