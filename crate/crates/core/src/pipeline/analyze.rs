//! `analyze`: metric tables from a run directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::fsutil::{create_dir, write_if_changed};
use super::results::{load_results, RunResults};
use crate::error::{Error, Result};
use crate::metrics::{
    bootstrap_average_rank, mean_curve, normalized_loss, proxy_regret_curve, wins_ties_losses, BOOTSTRAP_ITERATIONS,
};
use crate::seed::{combine, stable_hash};

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Reference policy for win/tie/loss; defaults to the first policy.
    pub reference: Option<String>,
    pub allow_partial: bool,
    pub bootstrap_iterations: usize,
    /// Also write `normalized_loss.csv`.
    pub normalized_loss: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            reference: None,
            allow_partial: false,
            bootstrap_iterations: BOOTSTRAP_ITERATIONS,
            normalized_loss: true,
        }
    }
}

/// File name -> contents of every table written.
pub type Tables = BTreeMap<&'static str, String>;

pub fn cmd_analyze(results_dir: &Path, out: &Path, opts: &AnalyzeOptions) -> Result<Tables> {
    let results = load_results(results_dir, opts.allow_partial)?;
    let tables = analyze(&results, opts)?;
    create_dir(out)?;
    for (name, body) in &tables {
        write_if_changed(&out.join(name), body.as_bytes())?;
    }
    Ok(tables)
}

pub fn analyze(results: &RunResults, opts: &AnalyzeOptions) -> Result<Tables> {
    let policies = &results.manifest.policies;
    let reference = match &opts.reference {
        Some(r) if policies.contains(r) => r.clone(),
        Some(r) => {
            return Err(Error::Config(format!(
                "reference policy `{r}` is not in the run (policies: {})",
                policies.join(", ")
            )))
        }
        None => policies.first().cloned().ok_or_else(|| Error::Results("run has no policies".into()))?,
    };
    if results.tasks.iter().all(|t| t.runs.is_empty()) {
        return Err(Error::Results("no completed episodes to analyze".into()));
    }

    let mut tables = Tables::new();
    tables.insert("ranks.csv", ranks_table(results, opts.bootstrap_iterations)?);
    tables.insert("wtl.csv", wtl_table(results, &reference)?);
    tables.insert("regret.csv", regret_table(results)?);
    tables.insert("pulls.csv", pulls_table(results));
    if opts.normalized_loss {
        tables.insert("normalized_loss.csv", normalized_loss_table(results)?);
    }
    Ok(tables)
}

fn ranks_table(results: &RunResults, iterations: usize) -> Result<String> {
    let policies = &results.manifest.policies;
    // Only tasks where every policy has at least one repetition can be ranked.
    let data: Vec<Vec<Vec<Vec<f64>>>> = results
        .tasks
        .iter()
        .map(|t| policies.iter().map(|p| t.policy_curves(p)).collect::<Vec<_>>())
        .filter(|algs| algs.iter().all(|reps| !reps.is_empty()))
        .collect();
    if data.is_empty() {
        return Err(Error::Results("no task has results for every policy".into()));
    }
    let seed = combine(results.manifest.base_seed, stable_hash("ranks"));
    let summary = bootstrap_average_rank(&data, iterations, seed)?;
    let mut out = String::from("policy,t,mean_rank,ci_lo,ci_hi\n");
    for (a, p) in policies.iter().enumerate() {
        for t in 0..summary.mean_rank[a].len() {
            writeln!(
                out,
                "{p},{},{},{},{}",
                t + 1,
                summary.mean_rank[a][t],
                summary.ci_low[a][t],
                summary.ci_high[a][t]
            )
            .expect("string write");
        }
    }
    Ok(out)
}

/// Mean over repetitions of the final best reward, per task; None when the
/// policy has no repetitions there.
fn final_performance(results: &RunResults, policy: &str) -> Vec<Option<f64>> {
    results
        .tasks
        .iter()
        .map(|t| {
            let curves = t.policy_curves(policy);
            (!curves.is_empty()).then(|| curves.iter().map(|c| c[c.len() - 1]).sum::<f64>() / curves.len() as f64)
        })
        .collect()
}

fn wtl_table(results: &RunResults, reference: &str) -> Result<String> {
    let base = final_performance(results, reference);
    let mut out = String::from("policy,reference,wins,ties,losses,p_value\n");
    for p in &results.manifest.policies {
        let cand = final_performance(results, p);
        let (a, b): (Vec<f64>, Vec<f64>) = cand
            .iter()
            .zip(&base)
            .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
            .unzip();
        let r = wins_ties_losses(&a, &b)?;
        writeln!(out, "{p},{reference},{},{},{},{}", r.wins, r.ties, r.losses, r.p_value()).expect("string write");
    }
    Ok(out)
}

fn regret_table(results: &RunResults) -> Result<String> {
    let mut out = String::from("task,policy,t,proxy_regret\n");
    for task in results.tasks.iter().filter(|t| t.has_oracle()) {
        let oracle = task.oracle_curves();
        for p in &results.manifest.policies {
            let curves = task.policy_curves(p);
            if curves.is_empty() {
                continue;
            }
            let regret = proxy_regret_curve(&curves, &oracle, task.horizon)?;
            for (t, r) in regret.iter().enumerate() {
                writeln!(out, "{},{p},{},{r}", task.id, t + 1).expect("string write");
            }
        }
    }
    Ok(out)
}

fn pulls_table(results: &RunResults) -> String {
    let mut out = String::from("task,policy,arm,mean_pulls\n");
    for task in &results.tasks {
        for p in &results.manifest.policies {
            let Some(reps) = task.runs.get(p) else { continue };
            let mut total = vec![0u64; task.arms];
            for ep in reps.values() {
                for (t, c) in total.iter_mut().zip(ep.pull_counts(task.arms)) {
                    *t += c;
                }
            }
            for (arm, c) in total.iter().enumerate() {
                writeln!(out, "{},{p},{arm},{}", task.id, *c as f64 / reps.len() as f64).expect("string write");
            }
        }
    }
    out
}

/// Mean over repetitions of the min-max normalized best-so-far loss, where
/// loss is the negated reward.
fn normalized_loss_table(results: &RunResults) -> Result<String> {
    let mut out = String::from("task,policy,t,normalized_loss\n");
    for task in &results.tasks {
        let mut curves = BTreeMap::new();
        for (pi, p) in results.manifest.policies.iter().enumerate() {
            for (ri, c) in task.policy_curves(p).into_iter().enumerate() {
                curves.insert((pi, ri), c.into_iter().map(|v| -v).collect::<Vec<f64>>());
            }
        }
        let norm = normalized_loss(&curves);
        for (pi, p) in results.manifest.policies.iter().enumerate() {
            let reps: Vec<Vec<f64>> = norm.range((pi, 0)..(pi + 1, 0)).map(|(_, c)| c.clone()).collect();
            if reps.is_empty() {
                continue;
            }
            for (t, v) in mean_curve(&reps)?.iter().enumerate() {
                writeln!(out, "{},{p},{},{v}", task.id, t + 1).expect("string write");
            }
        }
    }
    Ok(out)
}
