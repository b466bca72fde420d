//! Evaluation histories: the JSON-lines interchange format and the in-memory
//! per-task view the surrogate consumes.
//!
//! One JSON object per line, one line per evaluation:
//!
//! ```json
//! {"task_id":"t3","config":{"x0":0.25,"x1":-1.0},"signals":{"loss":0.91,"time":12.0},"iteration":4,"seed":17}
//! ```
//!
//! Config values are keyed by dimension name, signal values by signal name;
//! the declared orderings come from the search space and the signal-name
//! list, never from JSON key order.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use ablr_core::train::TaskData;

use crate::error::BoError;
use crate::space::SearchSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub task_id: String,
    pub config: BTreeMap<String, f64>,
    pub signals: BTreeMap<String, f64>,
    pub iteration: u64,
    pub seed: u64,
}

pub fn read_jsonl(path: &Path) -> Result<Vec<HistoryRecord>, BoError> {
    let file = std::fs::File::open(path).map_err(|source| BoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| BoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: HistoryRecord =
            serde_json::from_str(&line).map_err(|e| BoError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl(path: &Path, records: &[HistoryRecord]) -> Result<(), BoError> {
    let mut file = std::fs::File::create(path).map_err(|source| BoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    for rec in records {
        let line = serde_json::to_string(rec).expect("history records serialize");
        writeln!(file, "{line}").map_err(|source| BoError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

/// One task's evaluations in encoded coordinates, all `S` signals kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskHistory {
    pub task_id: String,
    /// Encoded configurations, `n x p`.
    pub x: Array2<f64>,
    /// Observed signals, `n x s`, original scale.
    pub signals: Array2<f64>,
}

impl TaskHistory {
    pub fn empty(task_id: impl Into<String>, p: usize, s: usize) -> Self {
        Self {
            task_id: task_id.into(),
            x: Array2::zeros((0, p)),
            signals: Array2::zeros((0, s)),
        }
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_signals(&self) -> usize {
        self.signals.ncols()
    }

    /// Column view of one signal.
    pub fn signal(&self, s: usize) -> ArrayView1<'_, f64> {
        self.signals.column(s)
    }

    pub fn push(&mut self, x_enc: &ArrayView1<f64>, signals: &[f64]) {
        debug_assert_eq!(x_enc.len(), self.x.ncols());
        debug_assert_eq!(signals.len(), self.signals.ncols());
        self.x
            .push(Axis(0), x_enc.view())
            .expect("row width matches");
        self.signals
            .push(Axis(0), ArrayView1::from(signals))
            .expect("signal width matches");
    }

    /// Group raw records by task (insertion order of first appearance) and
    /// encode them against the space and the declared signal ordering.
    pub fn from_records(
        space: &SearchSpace,
        signal_names: &[String],
        records: &[HistoryRecord],
    ) -> Result<Vec<TaskHistory>, BoError> {
        let mut order: Vec<String> = Vec::new();
        let mut grouped: BTreeMap<String, Vec<&HistoryRecord>> = BTreeMap::new();
        for rec in records {
            if !grouped.contains_key(&rec.task_id) {
                order.push(rec.task_id.clone());
            }
            grouped.entry(rec.task_id.clone()).or_default().push(rec);
        }
        let p = space.len();
        let s = signal_names.len();
        let mut out = Vec::with_capacity(order.len());
        for task_id in order {
            let recs = &grouped[&task_id];
            let mut hist = TaskHistory::empty(task_id.clone(), p, s);
            for rec in recs {
                let mut point = Vec::with_capacity(p);
                for name in space.names() {
                    let v = rec.config.get(name).ok_or_else(|| {
                        BoError::InvalidHistory(format!(
                            "task '{task_id}': config missing dimension '{name}'"
                        ))
                    })?;
                    point.push(*v);
                }
                if rec.config.len() != p {
                    return Err(BoError::InvalidHistory(format!(
                        "task '{task_id}': config has {} entries, space has {p}",
                        rec.config.len()
                    )));
                }
                let z = space.encode(&point)?;
                let mut sig = Vec::with_capacity(s);
                for name in signal_names {
                    let v = rec.signals.get(name).ok_or_else(|| {
                        BoError::InvalidHistory(format!(
                            "task '{task_id}': record missing signal '{name}'"
                        ))
                    })?;
                    if !v.is_finite() {
                        return Err(BoError::InvalidHistory(format!(
                            "task '{task_id}': non-finite value for signal '{name}'"
                        )));
                    }
                    sig.push(*v);
                }
                if rec.signals.len() != s {
                    return Err(BoError::InvalidHistory(format!(
                        "task '{task_id}': record has {} signals, expected {s}",
                        rec.signals.len()
                    )));
                }
                hist.push(&z.view(), &sig);
            }
            out.push(hist);
        }
        Ok(out)
    }

    /// Flatten back to records (decoded config values, named signals).
    pub fn to_records(
        &self,
        space: &SearchSpace,
        signal_names: &[String],
        seed: u64,
    ) -> Vec<HistoryRecord> {
        (0..self.len())
            .map(|i| {
                let nat = space.decode(&self.x.row(i));
                let config = space
                    .names()
                    .iter()
                    .zip(&nat)
                    .map(|(n, v)| (n.to_string(), *v))
                    .collect();
                let signals = signal_names
                    .iter()
                    .zip(self.signals.row(i))
                    .map(|(n, v)| (n.clone(), *v))
                    .collect();
                HistoryRecord {
                    task_id: self.task_id.clone(),
                    config,
                    signals,
                    iteration: i as u64,
                    seed,
                }
            })
            .collect()
    }
}

/// One task's history as a training block: identical inputs with one
/// response column per signal, each column backed by its own regression
/// head on the shared feature map. Responses are passed through raw —
/// standardization happens in the surrogate.
pub fn attach_signals(history: &TaskHistory) -> TaskData {
    TaskData::new(history.x.clone(), history.signals.clone())
        .expect("history rows are aligned by construction")
}

/// Append a task-constant context vector to every encoded row. Length-zero
/// context is the identity.
pub fn augment_with_context(x: &ArrayView2<f64>, context: &[f64]) -> Array2<f64> {
    if context.is_empty() {
        return x.to_owned();
    }
    let (n, p) = x.dim();
    let mut out = Array2::zeros((n, p + context.len()));
    for i in 0..n {
        let mut row = out.row_mut(i);
        for (j, v) in x.row(i).iter().enumerate() {
            row[j] = *v;
        }
        for (j, v) in context.iter().enumerate() {
            row[p + j] = *v;
        }
    }
    out
}
