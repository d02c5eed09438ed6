//! Pre-computed loss trajectories and their CSV format.
//!
//! Format (UTF-8, LF): header `arm_id,repetition,iteration,loss`, then one row
//! per evaluated configuration. `arm_id` and `repetition` are 0-based,
//! `iteration` is 1-based and contiguous per (arm_id, repetition). One file per
//! task; the file stem is the task id.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result, TraceFormatError};

pub const TRACE_HEADER: &str = "arm_id,repetition,iteration,loss";

/// Immutable table of loss sequences, indexed by arm then repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub task_id: String,
    losses: Vec<BTreeMap<u32, Vec<f64>>>,
}

impl TraceTable {
    /// Builds a table from in-memory sequences. Every sequence must be
    /// non-empty and finite.
    pub fn from_sequences(task_id: &str, losses: Vec<BTreeMap<u32, Vec<f64>>>) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::Config(format!("trace `{task_id}` declares no arms")));
        }
        for (arm, reps) in losses.iter().enumerate() {
            if reps.is_empty() {
                return Err(Error::Config(format!("trace `{task_id}` arm {arm} has no repetitions")));
            }
            for (rep, seq) in reps {
                if seq.is_empty() || seq.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Config(format!(
                        "trace `{task_id}` arm {arm} repetition {rep} is empty or non-finite"
                    )));
                }
            }
        }
        Ok(TraceTable {
            task_id: task_id.to_owned(),
            losses,
        })
    }

    pub fn arms(&self) -> usize {
        self.losses.len()
    }

    pub fn repetitions(&self, arm: usize) -> impl Iterator<Item = u32> + '_ {
        self.losses[arm].keys().copied()
    }

    pub fn sequence(&self, arm: usize, repetition: u32) -> Option<&[f64]> {
        self.losses.get(arm)?.get(&repetition).map(Vec::as_slice)
    }

    /// Longest sequence length in the table.
    pub fn max_len(&self) -> usize {
        self.losses
            .iter()
            .flat_map(|reps| reps.values().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    /// Shortest sequence length in the table.
    pub fn min_len(&self) -> usize {
        self.losses
            .iter()
            .flat_map(|reps| reps.values().map(Vec::len))
            .min()
            .unwrap_or(0)
    }

    /// Parses the CSV body. `path` is only used in error messages.
    pub fn parse(task_id: &str, text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, kind: TraceFormatError| Error::TraceFormat {
            path: path.to_path_buf(),
            line,
            kind,
        };
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));

        match lines.next() {
            Some((_, h)) if h == TRACE_HEADER => {}
            Some((_, h)) if !h.is_empty() => return Err(err(1, TraceFormatError::BadHeader(h.to_owned()))),
            _ => return Err(err(1, TraceFormatError::Empty)),
        }

        // (arm, rep) -> iteration -> (loss, line)
        let mut cells: BTreeMap<(usize, u32), BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 4 {
                return Err(err(lineno, TraceFormatError::MissingColumns(fields.len())));
            }
            if fields.len() > 4 {
                return Err(err(lineno, TraceFormatError::MalformedRow(format!("{} fields", fields.len()))));
            }
            let malformed = |what: &str, v: &str| err(lineno, TraceFormatError::MalformedRow(format!("bad {what} `{v}`")));
            let arm: usize = fields[0].trim().parse().map_err(|_| malformed("arm_id", fields[0]))?;
            let rep: u32 = fields[1].trim().parse().map_err(|_| malformed("repetition", fields[1]))?;
            let iter: usize = fields[2].trim().parse().map_err(|_| malformed("iteration", fields[2]))?;
            if iter == 0 {
                return Err(malformed("iteration", fields[2]));
            }
            let raw = fields[3].trim();
            let loss: f64 = raw.parse().map_err(|_| malformed("loss", raw))?;
            if !loss.is_finite() {
                return Err(err(lineno, TraceFormatError::NonFiniteLoss(raw.to_owned())));
            }
            match cells.entry((arm, rep)).or_default().entry(iter) {
                Entry::Occupied(_) => {
                    return Err(err(
                        lineno,
                        TraceFormatError::DuplicateKey {
                            arm,
                            repetition: rep,
                            iteration: iter,
                        },
                    ))
                }
                Entry::Vacant(v) => {
                    v.insert((loss, lineno));
                }
            }
        }
        if cells.is_empty() {
            return Err(err(1, TraceFormatError::Empty));
        }

        let arms = cells.keys().map(|(a, _)| a + 1).max().unwrap_or(0);
        let mut losses: Vec<BTreeMap<u32, Vec<f64>>> = vec![BTreeMap::new(); arms];
        for ((arm, rep), iters) in cells {
            let mut seq = Vec::with_capacity(iters.len());
            for (expected, (iter, (loss, lineno))) in (1..).zip(iters) {
                if iter != expected {
                    return Err(err(
                        lineno,
                        TraceFormatError::IterationGap {
                            arm,
                            repetition: rep,
                            expected,
                            found: iter,
                        },
                    ));
                }
                seq.push(loss);
            }
            losses[arm].insert(rep, seq);
        }
        if let Some(missing) = losses.iter().position(BTreeMap::is_empty) {
            return Err(err(1, TraceFormatError::MissingArm(missing)));
        }
        Ok(TraceTable {
            task_id: task_id.to_owned(),
            losses,
        })
    }

    /// Serializes back to the CSV format with rows ordered by
    /// (arm, repetition, iteration).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for (arm, reps) in self.losses.iter().enumerate() {
            for (rep, seq) in reps {
                for (i, loss) in seq.iter().enumerate() {
                    out.push_str(&format!("{arm},{rep},{},{loss}\n", i + 1));
                }
            }
        }
        out
    }
}

/// Task id for a trace file: the file name without its `.csv` extension.
pub fn task_id_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn load_trace_table(path: impl AsRef<Path>) -> Result<TraceTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(PathBuf::from(path), e))?;
    TraceTable::parse(&task_id_from_path(path), &text, path)
}
