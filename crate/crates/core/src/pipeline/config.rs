//! Experiment configuration (TOML). Unknown keys are rejected.
//!
//! ```toml
//! horizon = 100
//! repetitions = 32
//! seed = 7
//!
//! [[tasks]]
//! id = "toy"
//! arms = [
//!   { kind = "truncated_uniform", low = 0.0, high = 1.0 },
//!   { kind = "power", shape = 1.1, scale = 5.0 },
//! ]
//!
//! [[tasks]]
//! id = "openml_31"
//! trace = "traces/openml_31.csv"
//!
//! [[policies]]
//! name = "maxucb"
//! alpha = 0.5
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::environment::{Task, TaskSpec, TraceCache};
use crate::error::{Error, Result};
use crate::policy::{make_policy, PolicyConfig};

/// Default sample budget per arm for shape estimation on synthetic arms.
pub const DEFAULT_SHAPE_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: u64,
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_shape_samples")]
    pub shape_samples: usize,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub policies: Vec<PolicyConfig>,
}

fn default_shape_samples() -> usize {
    DEFAULT_SHAPE_SAMPLES
}

/// A config file as loaded: parsed contents, raw-bytes digest and the
/// directory trace paths are relative to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub digest: String,
    pub base_dir: PathBuf,
}

/// Ids end up in file names, so keep them to a portable alphabet.
pub fn check_identifier(kind: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{kind} id `{id}` must be non-empty ASCII letters, digits, `_`, `-` or `.`, not starting with `.`"
        )))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Structural checks that do not need trace files.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.tasks.is_empty() {
            return Err(Error::Config("no tasks configured".into()));
        }
        let mut seen = BTreeSet::new();
        for t in &self.tasks {
            check_identifier("task", &t.id)?;
            if !seen.insert(t.id.as_str()) {
                return Err(Error::Config(format!("duplicate task id `{}`", t.id)));
            }
        }
        let mut seen = BTreeSet::new();
        for p in &self.policies {
            check_identifier("policy", p.id())?;
            if !seen.insert(p.id()) {
                return Err(Error::Config(format!("duplicate policy id `{}`", p.id())));
            }
        }
        Ok(())
    }

    /// Loads trace files and checks every policy against every task.
    pub fn resolve_tasks(&self, base_dir: &Path) -> Result<Vec<Task>> {
        let mut cache = TraceCache::default();
        let tasks = self
            .tasks
            .iter()
            .map(|spec| Task::resolve(spec, base_dir, &mut cache))
            .collect::<Result<Vec<_>>>()?;
        for task in &tasks {
            if self.horizon < task.num_arms() as u64 {
                return Err(Error::Config(format!(
                    "horizon {} is shorter than the {} arms of task `{}`",
                    self.horizon,
                    task.num_arms(),
                    task.id
                )));
            }
            for p in &self.policies {
                let policy = make_policy(p, task.num_arms(), 0)?;
                if self.horizon < policy.min_horizon() {
                    return Err(Error::Config(format!(
                        "policy `{}` needs a horizon of at least {} on task `{}`",
                        p.id(),
                        policy.min_horizon(),
                        task.id
                    )));
                }
            }
        }
        Ok(tasks)
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Config(format!("{} is not valid UTF-8", path.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    config.validate()?;
    Ok(LoadedConfig {
        config,
        digest: sha256_hex(&bytes),
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    })
}
