//! Max K-armed bandit toolkit.
//!
//! Policies that maximize the largest reward seen rather than the cumulative
//! reward, stochastic and trace-replay environments, tail-shape analysis and
//! evaluation statistics.

pub mod analysis;
pub mod distribution;
pub mod environment;
pub mod episode;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod policy;
pub mod seed;
pub mod trace;
pub mod types;

pub use distribution::Distribution;
pub use environment::{ArmSpec, Environment, RewardTransform, Task, TaskSpec};
pub use episode::{run_episode, run_with_policy, single_arm_rewards};
pub use error::{Error, Result};
pub use policy::{make_policy, MaxUcb, Policy, PolicyConfig, RandomPolicy, Ucb};
pub use types::{PullRecord, Reward, RunTrace};

#[cfg(feature = "pipeline")]
pub mod pipeline;
