//! Reads a run directory back into memory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::manifest::{CellStatus, RunManifest, ORACLE_ID};
use super::run::{oracle_path, results_path, ORACLE_HEADER, RESULTS_HEADER};
use crate::error::{Error, Result};
use crate::experiment::{Episode, TaskResults};

#[derive(Debug, Clone)]
pub struct RunResults {
    pub manifest: RunManifest,
    pub tasks: Vec<TaskResults>,
}

/// Loads a run directory. Incomplete runs are refused unless `allow_partial`.
pub fn load_results(dir: &Path, allow_partial: bool) -> Result<RunResults> {
    let manifest = RunManifest::load(dir)?;
    if !manifest.is_complete() && !allow_partial {
        return Err(Error::Results(format!(
            "{} of {} cells in {} are not complete; rerun with --resume or pass --allow-partial",
            manifest.incomplete(),
            manifest.cells.len(),
            dir.display()
        )));
    }
    let horizon = manifest.horizon as usize;
    let mut tasks = Vec::new();
    for entry in &manifest.tasks {
        let mut runs: BTreeMap<String, BTreeMap<u32, Episode>> = BTreeMap::new();
        let path = results_path(dir, &entry.id);
        for (line, f) in read_rows(&path, RESULTS_HEADER, 5)? {
            let bad = |what: &str| Error::Results(format!("{}:{line}: bad {what}", path.display()));
            let rep: u32 = f[1].parse().map_err(|_| bad("repetition"))?;
            let t: usize = f[2].parse().map_err(|_| bad("t"))?;
            let arm: usize = f[3].parse().map_err(|_| bad("arm"))?;
            let reward: f64 = f[4].parse().map_err(|_| bad("reward"))?;
            if arm >= entry.arms || !reward.is_finite() {
                return Err(bad("arm or reward"));
            }
            let ep = runs.entry(f[0].to_owned()).or_default().entry(rep).or_default();
            if t != ep.arms.len() + 1 {
                return Err(bad("round order"));
            }
            ep.arms.push(arm);
            ep.rewards.push(reward);
        }
        let mut oracle = vec![BTreeMap::new(); entry.arms];
        let path = oracle_path(dir, &entry.id);
        for (line, f) in read_rows(&path, ORACLE_HEADER, 4)? {
            let bad = |what: &str| Error::Results(format!("{}:{line}: bad {what}", path.display()));
            let arm: usize = f[0].parse().map_err(|_| bad("arm"))?;
            let rep: u32 = f[1].parse().map_err(|_| bad("repetition"))?;
            let t: usize = f[2].parse().map_err(|_| bad("t"))?;
            let reward: f64 = f[3].parse().map_err(|_| bad("reward"))?;
            if arm >= entry.arms {
                return Err(bad("arm"));
            }
            let seq: &mut Vec<f64> = oracle[arm].entry(rep).or_default();
            if t != seq.len() + 1 {
                return Err(bad("round order"));
            }
            seq.push(reward);
        }
        for (policy, reps) in &runs {
            if !manifest.policies.contains(policy) {
                return Err(Error::Results(format!("task `{}`: unknown policy `{policy}`", entry.id)));
            }
            if reps.values().any(|e| e.arms.len() != horizon) {
                return Err(Error::Results(format!(
                    "task `{}` policy `{policy}`: episode shorter than T = {horizon}",
                    entry.id
                )));
            }
        }
        if oracle.iter().flat_map(|r| r.values()).any(|s| s.len() != horizon) {
            return Err(Error::Results(format!("task `{}`: oracle episode not of length {horizon}", entry.id)));
        }
        tasks.push(TaskResults {
            id: entry.id.clone(),
            arms: entry.arms,
            horizon,
            runs,
            oracle,
        });
    }
    // The manifest is authoritative: files must not hold more than it says.
    let complete_cells = manifest
        .cells
        .iter()
        .filter(|c| c.status == CellStatus::Complete && c.policy != ORACLE_ID)
        .count();
    let loaded: usize = tasks.iter().flat_map(|t| t.runs.values()).map(BTreeMap::len).sum();
    if loaded != complete_cells {
        return Err(Error::Results(format!(
            "results files hold {loaded} episodes but the manifest lists {complete_cells} complete cells"
        )));
    }
    Ok(RunResults { manifest, tasks })
}

fn read_rows(path: &PathBuf, header: &str, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => return Err(Error::Results(format!("{}: expected header `{header}`", path.display()))),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let f: Vec<String> = l.split(',').map(str::to_owned).collect();
            if f.len() == width {
                Ok((i + 1, f))
            } else {
                Err(Error::Results(format!("{}:{}: expected {width} fields", path.display(), i + 1)))
            }
        })
        .collect()
}
