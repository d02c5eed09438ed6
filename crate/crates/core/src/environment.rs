//! Reward environments: parametric samplers and trace replay.
//!
//! Each arm draws from its own random stream, derived from the episode seed
//! and the arm index. The n-th pull of arm i therefore yields the same reward
//! whatever the policy did before, which gives paired (common random number)
//! comparisons between policies and lets single-arm oracle episodes reproduce
//! exactly what a policy would have observed.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::seed::{combine, rng_from_seed, StreamRng};
use crate::trace::{load_trace_table, TraceTable};
use crate::types::Reward;

/// How stored losses become rewards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardTransform {
    /// reward = -loss
    #[default]
    Negate,
    /// reward = 1 - loss, for losses normalized to [0, 1]
    OneMinus,
    Identity,
}

impl RewardTransform {
    #[inline]
    pub fn apply(self, loss: f64) -> f64 {
        match self {
            RewardTransform::Negate => -loss,
            RewardTransform::OneMinus => 1.0 - loss,
            RewardTransform::Identity => loss,
        }
    }
}

/// Configuration-level description of one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Pareto { tail: f64 },
    Exponential { rate: f64 },
    Gaussian { mean: f64, std: f64 },
    TruncatedGaussian { mean: f64, std: f64 },
    TruncatedUniform { low: f64, high: f64 },
    Power { shape: f64, scale: f64 },
    InverseCdfPoly {
        exponent: f64,
        #[serde(default)]
        complement: bool,
    },
    Constant { value: f64 },
    /// One arm of a trace file.
    Trace { file: PathBuf, arm: usize },
}

impl ArmSpec {
    pub fn distribution(&self) -> Option<Distribution> {
        Some(match *self {
            ArmSpec::Pareto { tail } => Distribution::Pareto { tail },
            ArmSpec::Exponential { rate } => Distribution::Exponential { rate },
            ArmSpec::Gaussian { mean, std } => Distribution::Gaussian { mean, std },
            ArmSpec::TruncatedGaussian { mean, std } => Distribution::TruncatedGaussian { mean, std },
            ArmSpec::TruncatedUniform { low, high } => Distribution::TruncatedUniform { low, high },
            ArmSpec::Power { shape, scale } => Distribution::Power { shape, scale },
            ArmSpec::InverseCdfPoly {
                exponent,
                complement,
            } => Distribution::InverseCdfPoly {
                exponent,
                complement,
            },
            ArmSpec::Constant { value } => Distribution::Constant { value },
            ArmSpec::Trace { .. } => return None,
        })
    }
}

impl From<Distribution> for ArmSpec {
    fn from(d: Distribution) -> Self {
        match d {
            Distribution::Pareto { tail } => ArmSpec::Pareto { tail },
            Distribution::Exponential { rate } => ArmSpec::Exponential { rate },
            Distribution::Gaussian { mean, std } => ArmSpec::Gaussian { mean, std },
            Distribution::TruncatedGaussian { mean, std } => ArmSpec::TruncatedGaussian { mean, std },
            Distribution::TruncatedUniform { low, high } => ArmSpec::TruncatedUniform { low, high },
            Distribution::Power { shape, scale } => ArmSpec::Power { shape, scale },
            Distribution::InverseCdfPoly {
                exponent,
                complement,
            } => ArmSpec::InverseCdfPoly {
                exponent,
                complement,
            },
            Distribution::Constant { value } => ArmSpec::Constant { value },
        }
    }
}

/// Configuration-level task: explicit arms, or every arm of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    #[serde(default)]
    pub arms: Vec<ArmSpec>,
    /// Trace file whose arms are appended after `arms`.
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default)]
    pub reward_transform: RewardTransform,
}

impl TaskSpec {
    pub fn synthetic(id: &str, arms: impl IntoIterator<Item = Distribution>) -> Self {
        TaskSpec {
            id: id.to_owned(),
            arms: arms.into_iter().map(ArmSpec::from).collect(),
            trace: None,
            reward_transform: RewardTransform::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ArmSource {
    Sampler(Distribution),
    Replay {
        table: Arc<TraceTable>,
        arm: usize,
        transform: RewardTransform,
    },
}

/// A resolved task: validated arm sources with trace tables loaded.
#[derive(Debug, Clone)]
pub struct Task {
    pub id: String,
    pub arms: Vec<ArmSource>,
}

/// Loads each trace file once and shares it between tasks.
#[derive(Debug, Default)]
pub struct TraceCache {
    tables: HashMap<PathBuf, Arc<TraceTable>>,
}

impl TraceCache {
    pub fn get(&mut self, path: &Path) -> Result<Arc<TraceTable>> {
        if let Some(t) = self.tables.get(path) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(load_trace_table(path)?);
        self.tables.insert(path.to_path_buf(), Arc::clone(&table));
        Ok(table)
    }
}

impl Task {
    pub fn from_distributions(id: &str, arms: impl IntoIterator<Item = Distribution>) -> Result<Self> {
        let arms = arms
            .into_iter()
            .map(|d| d.validate().map(|_| ArmSource::Sampler(d)))
            .collect::<Result<Vec<_>>>()?;
        Task::new(id, arms)
    }

    pub fn from_trace(table: Arc<TraceTable>, transform: RewardTransform) -> Result<Self> {
        let arms = (0..table.arms())
            .map(|arm| ArmSource::Replay {
                table: Arc::clone(&table),
                arm,
                transform,
            })
            .collect();
        Task::new(&table.task_id.clone(), arms)
    }

    fn new(id: &str, arms: Vec<ArmSource>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::Config(format!("task `{id}` needs at least 2 arms, has {}", arms.len())));
        }
        Ok(Task {
            id: id.to_owned(),
            arms,
        })
    }

    /// Resolves a spec; relative trace paths are taken from `base_dir`.
    pub fn resolve(spec: &TaskSpec, base_dir: &Path, cache: &mut TraceCache) -> Result<Self> {
        let mut arms = Vec::new();
        for a in &spec.arms {
            match a {
                ArmSpec::Trace { file, arm } => {
                    let table = cache.get(&base_dir.join(file))?;
                    if *arm >= table.arms() {
                        return Err(Error::Config(format!(
                            "task `{}`: trace {} has {} arms, arm {arm} requested",
                            spec.id,
                            file.display(),
                            table.arms()
                        )));
                    }
                    arms.push(ArmSource::Replay {
                        table,
                        arm: *arm,
                        transform: spec.reward_transform,
                    });
                }
                other => {
                    let d = other.distribution().expect("non-trace arm");
                    d.validate()
                        .map_err(|e| Error::Config(format!("task `{}`: {e}", spec.id)))?;
                    arms.push(ArmSource::Sampler(d));
                }
            }
        }
        if let Some(file) = &spec.trace {
            let table = cache.get(&base_dir.join(file))?;
            arms.extend((0..table.arms()).map(|arm| ArmSource::Replay {
                table: Arc::clone(&table),
                arm,
                transform: spec.reward_transform,
            }));
        }
        Task::new(&spec.id, arms)
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    /// Fresh environment for one episode.
    pub fn environment(&self, seed: u64, repetition: u32) -> Environment<'_> {
        Environment {
            task: self,
            repetition,
            streams: (0..self.arms.len())
                .map(|i| rng_from_seed(arm_stream_seed(seed, i)))
                .collect(),
            cursors: vec![0; self.arms.len()],
        }
    }

    /// Upper end of each arm's support, if known (trace arms use the largest
    /// stored reward over all repetitions).
    pub fn support_upper(&self) -> Vec<f64> {
        self.arms
            .iter()
            .map(|a| match a {
                ArmSource::Sampler(d) => d.support().1,
                ArmSource::Replay { table, arm, transform } => table
                    .repetitions(*arm)
                    .filter_map(|r| table.sequence(*arm, r))
                    .flatten()
                    .map(|&l| transform.apply(l))
                    .fold(f64::NEG_INFINITY, f64::max),
            })
            .collect()
    }
}

fn arm_stream_seed(seed: u64, arm: usize) -> u64 {
    combine(seed, 0xA11C_E5EE_D000_0000 ^ arm as u64)
}

/// Per-episode reward source with its own cursors and streams.
#[derive(Debug)]
pub struct Environment<'a> {
    task: &'a Task,
    repetition: u32,
    streams: Vec<StreamRng>,
    cursors: Vec<usize>,
}

impl Environment<'_> {
    pub fn num_arms(&self) -> usize {
        self.task.arms.len()
    }

    /// Draws (or replays) the next reward of `arm`. Only that arm's cursor or
    /// stream advances.
    pub fn pull(&mut self, arm: usize) -> Result<Reward> {
        let k = self.num_arms();
        let source = self
            .task
            .arms
            .get(arm)
            .ok_or(Error::ArmOutOfRange { arm, arms: k })?;
        let value = match source {
            ArmSource::Sampler(d) => d.sample(&mut self.streams[arm]),
            ArmSource::Replay {
                table,
                arm: trace_arm,
                transform,
            } => {
                let seq = table
                    .sequence(*trace_arm, self.repetition)
                    .ok_or_else(|| Error::MissingRepetition {
                        task: self.task.id.clone(),
                        arm,
                        repetition: self.repetition,
                    })?;
                let pos = self.cursors[arm];
                let loss = *seq.get(pos).ok_or_else(|| Error::TraceExhausted {
                    task: self.task.id.clone(),
                    arm,
                    repetition: self.repetition,
                    position: pos,
                })?;
                transform.apply(loss)
            }
        };
        self.cursors[arm] += 1;
        Reward::new(value).ok_or(Error::NonFiniteReward { arm, value })
    }
}
