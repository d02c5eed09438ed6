//! Run manifest: which (task, policy, repetition) cells exist and which are done.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
/// Pseudo-policy id of the single-arm oracle episodes. Not a valid policy
/// id, so it cannot collide with a configured one.
pub const ORACLE_ID: &str = "@oracle";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pending,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub task: String,
    pub policy: String,
    pub repetition: u32,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEntry {
    pub id: String,
    pub arms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub base_seed: u64,
    pub horizon: u64,
    pub repetitions: u32,
    pub tasks: Vec<TaskEntry>,
    pub policies: Vec<String>,
    pub cells: Vec<Cell>,
}

impl RunManifest {
    /// All cells pending, in canonical order: task, then policies (oracle
    /// last), then repetition.
    pub fn new(
        config_digest: String,
        base_seed: u64,
        horizon: u64,
        repetitions: u32,
        tasks: Vec<TaskEntry>,
        policies: Vec<String>,
    ) -> Self {
        let mut cells = Vec::new();
        for t in &tasks {
            for p in policies.iter().map(String::as_str).chain([ORACLE_ID]) {
                for repetition in 0..repetitions {
                    cells.push(Cell {
                        task: t.id.clone(),
                        policy: p.to_owned(),
                        repetition,
                        status: CellStatus::Pending,
                        error: None,
                    });
                }
            }
        }
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config_digest,
            base_seed,
            horizon,
            repetitions,
            tasks,
            policies,
            cells,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|c| c.status == CellStatus::Complete)
    }

    pub fn incomplete(&self) -> usize {
        self.cells.iter().filter(|c| c.status != CellStatus::Complete).count()
    }

    /// Same experiment: everything but the cell statuses agrees.
    pub fn same_experiment(&self, other: &RunManifest) -> bool {
        self.tool_version == other.tool_version
            && self.config_digest == other.config_digest
            && self.base_seed == other.base_seed
            && self.horizon == other.horizon
            && self.repetitions == other.repetitions
            && self.tasks == other.tasks
            && self.policies == other.policies
            && self.cells.len() == other.cells.len()
            && self
                .cells
                .iter()
                .zip(&other.cells)
                .all(|(a, b)| (&a.task, &a.policy, a.repetition) == (&b.task, &b.policy, b.repetition))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(path.clone(), e))?;
        serde_json::from_str(&text).map_err(|e| Error::Results(format!("{}: {e}", path.display())))
    }
}
