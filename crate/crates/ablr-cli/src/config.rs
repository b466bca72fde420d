//! The two JSON documents the CLI consumes: the run document (an experiment
//! plus optional output/parallelism defaults) and the fit document
//! (histories, space, and surrogate choices for `fit`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::Value;

use ablr_bench::Experiment;
use ablr_bo::{Dimension, FeatureKind, SearchSpace};

/// A parsed `run` config: the experiment plus file-level defaults that the
/// command-line flags may override.
#[derive(Debug)]
pub struct RunDocument {
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Parse and validate the run document. The document is the experiment
/// object (`experiment` + `config` keys) with optional `out` and `jobs`
/// keys alongside; anything else is rejected by name.
pub fn parse_run_document(text: &str) -> Result<RunDocument, String> {
    let mut top: serde_json::Map<String, Value> = serde_json::from_str(text)
        .map_err(|e| format!("not a JSON object: {e}"))?;
    let out = match top.remove("out") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(other) => return Err(format!("'out' must be a path string, got {other}")),
    };
    let jobs = match top.remove("jobs") {
        None | Some(Value::Null) => None,
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => Some(n as usize),
            _ => return Err(format!("'jobs' must be a positive integer, got {v}")),
        },
    };
    if let Some(stray) = top.keys().find(|k| *k != "experiment" && *k != "config") {
        return Err(format!("unknown key '{stray}'"));
    }
    let experiment: Experiment = serde_json::from_value(Value::Object(top))
        .map_err(|e| e.to_string())?;
    experiment.validate().map_err(|e| e.to_string())?;
    Ok(RunDocument { experiment, out, jobs })
}

/// Collapse every seed list in the experiment to the single given seed.
pub fn apply_seed_override(experiment: &mut Experiment, seed: u64) {
    match experiment {
        Experiment::LotoQuadratic(cfg) => cfg.seeds = vec![seed],
        Experiment::TabularReplay(cfg) => cfg.seeds = vec![seed],
        Experiment::MultiSignal(cfg) => cfg.seeds = vec![seed],
        Experiment::TimingLadder(cfg) => cfg.seed = seed,
    }
}

fn default_fit_iters() -> usize {
    150
}

/// The `fit` command's config: where the histories live, how to interpret
/// them, and which surrogate to train.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Search-space declaration; history configs are encoded against it.
    pub space: Vec<Dimension>,
    /// Signal names in column order; every history record must carry all.
    pub signals: Vec<String>,
    /// JSON-lines history files, concatenated and grouped by task id.
    pub histories: Vec<PathBuf>,
    /// Task whose predictions the saved model will serve. May have no
    /// records of its own (pure transfer: siblings shape the features).
    pub target_task: String,
    #[serde(default)]
    pub target_signal: usize,
    #[serde(default)]
    pub feature: FeatureKind,
    #[serde(default)]
    pub seed: u64,
    /// L-BFGS iteration cap for the (fresh) fit.
    #[serde(default = "default_fit_iters")]
    pub fit_iters: usize,
    /// Optional per-task context vectors appended to the inputs.
    #[serde(default)]
    pub contexts: Option<BTreeMap<String, Vec<f64>>>,
}

impl FitConfig {
    pub fn validate(&self) -> Result<SearchSpace, String> {
        let space = SearchSpace::new(self.space.clone()).map_err(|e| e.to_string())?;
        if self.signals.is_empty() {
            return Err("'signals' must name at least one signal".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = self.signals.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(format!("duplicate signal name '{dup}'"));
        }
        if self.histories.is_empty() {
            return Err("'histories' must list at least one file".into());
        }
        if self.target_signal >= self.signals.len() {
            return Err(format!(
                "target_signal {} out of range ({} signals)",
                self.target_signal,
                self.signals.len()
            ));
        }
        if self.fit_iters == 0 {
            return Err("fit_iters must be at least 1".into());
        }
        match &self.feature {
            FeatureKind::Mlp { hidden } if hidden.is_empty() || hidden.contains(&0) => {
                return Err("feature 'mlp' needs non-empty, positive hidden widths".into())
            }
            FeatureKind::Rks { dim: 0 } => {
                return Err("feature 'rks' needs a positive dimension".into())
            }
            _ => {}
        }
        if let Some(ctx) = &self.contexts {
            let mut lens = ctx.values().map(|v| v.len());
            if let Some(first) = lens.next() {
                if lens.any(|l| l != first) {
                    return Err("context vectors must all have the same length".into());
                }
            }
            if let Some((task, _)) = ctx
                .iter()
                .find(|(_, v)| v.iter().any(|x| !x.is_finite()))
            {
                return Err(format!("context for task '{task}' has a non-finite entry"));
            }
        }
        Ok(space)
    }
}

pub fn parse_fit_config(text: &str) -> Result<(FitConfig, SearchSpace), String> {
    let cfg: FitConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let space = cfg.validate()?;
    Ok((cfg, space))
}
