//! Fitted-surrogate persistence.
//!
//! A saved model is one JSON document holding the search space, the feature
//! map, every regression head's posterior factors, and the frozen
//! standardization statistics — everything `predict` consults. All floats
//! are stored as hexadecimal literals ([`crate::hexfloat`]), so a
//! save/load/predict round trip reproduces in-process predictions
//! bit-for-bit.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use ablr_bo::{Dimension, DimensionKind, FittedSurrogate, SearchSpace};
use ablr_core::{
    FeatureMap, HeadParams, HeadPosterior, InputStandardizer, JointModel, MlpFeatures,
    ResponseStandardizer, RksFeatures,
};
use ablr_core::blr::fit_head_parts;

use crate::hexfloat::{decode_f64, decode_slice, encode_f64, encode_slice};

/// Bumped whenever the document layout changes incompatibly.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HexMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries as hex literals.
    pub data: Vec<String>,
}

impl HexMatrix {
    fn from_array(a: &Array2<f64>) -> Self {
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            data: a.iter().map(|&v| encode_f64(v)).collect(),
        }
    }

    fn to_array(&self, what: &str) -> Result<Array2<f64>, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "{what}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            ));
        }
        let values = decode_slice(&self.data, what)?;
        Array2::from_shape_vec((self.rows, self.cols), values)
            .map_err(|e| format!("{what}: {e}"))
    }
}

/// Search-space declaration with range endpoints in hex (ordinal levels and
/// continuous bounds are floats too and must round-trip exactly).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedDimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: SavedDimensionKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SavedDimensionKind {
    Continuous { lo: String, hi: String },
    Integer { lo: i64, hi: i64 },
    Ordinal { values: Vec<String> },
}

fn save_dimension(d: &Dimension) -> SavedDimension {
    let kind = match &d.kind {
        DimensionKind::Continuous { lo, hi } => SavedDimensionKind::Continuous {
            lo: encode_f64(*lo),
            hi: encode_f64(*hi),
        },
        DimensionKind::Integer { lo, hi } => SavedDimensionKind::Integer { lo: *lo, hi: *hi },
        DimensionKind::Ordinal { values } => SavedDimensionKind::Ordinal {
            values: encode_slice(values.iter()),
        },
    };
    SavedDimension { name: d.name.clone(), kind }
}

fn load_dimension(d: &SavedDimension) -> Result<Dimension, String> {
    let ctx = format!("dimension '{}'", d.name);
    let kind = match &d.kind {
        SavedDimensionKind::Continuous { lo, hi } => DimensionKind::Continuous {
            lo: decode_f64(lo).map_err(|e| format!("{ctx}: {e}"))?,
            hi: decode_f64(hi).map_err(|e| format!("{ctx}: {e}"))?,
        },
        SavedDimensionKind::Integer { lo, hi } => DimensionKind::Integer { lo: *lo, hi: *hi },
        SavedDimensionKind::Ordinal { values } => DimensionKind::Ordinal {
            values: decode_slice(values, &ctx)?,
        },
    };
    Ok(Dimension { name: d.name.clone(), kind })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SavedFeatureMap {
    /// Bias-free tanh network; `weights[l]` maps layer `l` to `l+1` and is
    /// stored as its `(fan_out, fan_in)` matrix.
    Mlp { weights: Vec<HexMatrix> },
    Rks {
        proj: HexMatrix,
        phases: Vec<String>,
        log_sigma: String,
    },
}

fn save_features(f: &FeatureMap) -> SavedFeatureMap {
    match f {
        FeatureMap::Mlp(m) => SavedFeatureMap::Mlp {
            weights: m.weights.iter().map(HexMatrix::from_array).collect(),
        },
        FeatureMap::Rks(r) => SavedFeatureMap::Rks {
            proj: HexMatrix::from_array(&r.proj),
            phases: encode_slice(r.phases.iter()),
            log_sigma: encode_f64(r.log_sigma),
        },
    }
}

fn load_features(f: &SavedFeatureMap) -> Result<FeatureMap, String> {
    match f {
        SavedFeatureMap::Mlp { weights } => {
            if weights.is_empty() {
                return Err("feature map has no weight matrices".into());
            }
            let mats = weights
                .iter()
                .enumerate()
                .map(|(l, w)| w.to_array(&format!("feature weights[{l}]")))
                .collect::<Result<Vec<_>, _>>()?;
            for (l, pair) in mats.windows(2).enumerate() {
                if pair[1].ncols() != pair[0].nrows() {
                    return Err(format!(
                        "feature weights[{}] expects {} inputs, layer below provides {}",
                        l + 1,
                        pair[1].ncols(),
                        pair[0].nrows()
                    ));
                }
            }
            Ok(FeatureMap::Mlp(MlpFeatures::from_weights(mats)))
        }
        SavedFeatureMap::Rks { proj, phases, log_sigma } => {
            let proj = proj.to_array("feature projection")?;
            let phases = Array1::from_vec(decode_slice(phases, "feature phases")?);
            if phases.len() != proj.nrows() {
                return Err(format!(
                    "{} phases for {} projection rows",
                    phases.len(),
                    proj.nrows()
                ));
            }
            Ok(FeatureMap::Rks(RksFeatures {
                proj,
                phases,
                log_sigma: decode_f64(log_sigma).map_err(|e| format!("log_sigma: {e}"))?,
            }))
        }
    }
}

/// One task-and-signal head: hyperparameters, posterior factors, and the
/// response standardization frozen at fit time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedHead {
    pub log_alpha: String,
    pub log_beta: String,
    /// Lower Cholesky factor of the regularized Gram matrix.
    pub chol: HexMatrix,
    /// Whitened projected targets.
    pub proj_targets: Vec<String>,
    pub gram: HexMatrix,
    pub jitter: String,
    pub observations: usize,
    pub targets_sq: String,
    pub response_mean: String,
    pub response_std: String,
}

fn save_head(p: &HeadPosterior, r: &ResponseStandardizer) -> SavedHead {
    SavedHead {
        log_alpha: encode_f64(p.params.log_alpha),
        log_beta: encode_f64(p.params.log_beta),
        chol: HexMatrix::from_array(&p.l),
        proj_targets: encode_slice(p.c.iter()),
        gram: HexMatrix::from_array(&p.gram),
        jitter: encode_f64(p.jitter),
        observations: p.n,
        targets_sq: encode_f64(p.y_sq),
        response_mean: encode_f64(r.mean),
        response_std: encode_f64(r.std),
    }
}

fn load_head(
    h: &SavedHead,
    idx: usize,
    feature_dim: usize,
) -> Result<(HeadPosterior, ResponseStandardizer), String> {
    let ctx = format!("head {idx}");
    let field = |e: String| format!("{ctx}: {e}");
    let l = h.chol.to_array(&format!("{ctx} chol"))?;
    let c = Array1::from_vec(decode_slice(&h.proj_targets, &format!("{ctx} proj_targets"))?);
    let gram = h.gram.to_array(&format!("{ctx} gram"))?;
    let d = feature_dim;
    if l.dim() != (d, d) || gram.dim() != (d, d) || c.len() != d {
        return Err(format!(
            "{ctx}: factor shapes {:?}/{:?}/{} do not match the {d}-dimensional feature map",
            l.dim(),
            gram.dim(),
            c.len()
        ));
    }
    let posterior = HeadPosterior {
        params: HeadParams::new(
            decode_f64(&h.log_alpha).map_err(field)?,
            decode_f64(&h.log_beta).map_err(field)?,
        ),
        l,
        c,
        gram,
        jitter: decode_f64(&h.jitter).map_err(field)?,
        n: h.observations,
        y_sq: decode_f64(&h.targets_sq).map_err(field)?,
    };
    let response = ResponseStandardizer {
        mean: decode_f64(&h.response_mean).map_err(field)?,
        std: decode_f64(&h.response_std).map_err(field)?,
    };
    Ok((posterior, response))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedStandardizer {
    pub mean: Vec<String>,
    pub std: Vec<String>,
}

/// The on-disk model document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub space: Vec<SavedDimension>,
    /// Signal names in declared order; heads are task-major, signal-minor.
    pub signals: Vec<String>,
    pub task_ids: Vec<String>,
    pub target_task: String,
    pub target_signal: usize,
    pub feature_map: SavedFeatureMap,
    pub heads: Vec<SavedHead>,
    pub input_scale: SavedStandardizer,
    pub target_head: usize,
    pub target_context: Vec<String>,
}

/// Everything a loaded model offers callers: the reusable fit plus the
/// metadata needed to encode queries and label outputs.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub fit: FittedSurrogate,
    pub space: SearchSpace,
    pub signals: Vec<String>,
    pub task_ids: Vec<String>,
    pub target_task: String,
    pub target_signal: usize,
}

pub fn saved_from_fit(
    fit: &FittedSurrogate,
    space: &SearchSpace,
    signals: &[String],
    task_ids: &[String],
    target_task: &str,
    target_signal: usize,
) -> SavedModel {
    debug_assert_eq!(fit.posteriors.len(), task_ids.len() * signals.len());
    SavedModel {
        format_version: MODEL_FORMAT_VERSION,
        space: space.dims.iter().map(save_dimension).collect(),
        signals: signals.to_vec(),
        task_ids: task_ids.to_vec(),
        target_task: target_task.to_string(),
        target_signal,
        feature_map: save_features(&fit.model.features),
        heads: fit
            .posteriors
            .iter()
            .zip(&fit.response_std)
            .map(|(p, r)| save_head(p, r))
            .collect(),
        input_scale: SavedStandardizer {
            mean: encode_slice(fit.input_std.mean.iter()),
            std: encode_slice(fit.input_std.std.iter()),
        },
        target_head: fit.target_head,
        target_context: encode_slice(fit.target_context.iter()),
    }
}

pub fn model_from_saved(saved: &SavedModel) -> Result<LoadedModel, String> {
    if saved.format_version != MODEL_FORMAT_VERSION {
        return Err(format!(
            "model format version {} is not supported (this build reads version {})",
            saved.format_version, MODEL_FORMAT_VERSION
        ));
    }
    let dims = saved
        .space
        .iter()
        .map(load_dimension)
        .collect::<Result<Vec<_>, _>>()?;
    let space = SearchSpace::new(dims).map_err(|e| e.to_string())?;
    if saved.signals.is_empty() {
        return Err("model declares no signals".into());
    }
    let expected_heads = saved.task_ids.len() * saved.signals.len();
    if saved.heads.len() != expected_heads {
        return Err(format!(
            "{} heads for {} task(s) x {} signal(s)",
            saved.heads.len(),
            saved.task_ids.len(),
            saved.signals.len()
        ));
    }
    if saved.target_head >= saved.heads.len() {
        return Err(format!(
            "target head {} out of range ({} heads)",
            saved.target_head,
            saved.heads.len()
        ));
    }
    if saved.target_signal >= saved.signals.len() {
        return Err(format!(
            "target signal {} out of range ({} signals)",
            saved.target_signal,
            saved.signals.len()
        ));
    }
    let target_idx = saved
        .task_ids
        .iter()
        .position(|t| *t == saved.target_task)
        .ok_or_else(|| {
            format!(
                "target task '{}' is not among the model's tasks",
                saved.target_task
            )
        })?;
    if target_idx * saved.signals.len() + saved.target_signal != saved.target_head {
        return Err(format!(
            "target head {} disagrees with task '{}' signal {}",
            saved.target_head, saved.target_task, saved.target_signal
        ));
    }

    let features = load_features(&saved.feature_map)?;
    let target_context = decode_slice(&saved.target_context, "target_context")?;
    let augmented = space.len() + target_context.len();
    if features.input_dim() != augmented {
        return Err(format!(
            "feature map expects {} inputs; space ({}) plus context ({}) give {augmented}",
            features.input_dim(),
            space.len(),
            target_context.len()
        ));
    }
    let d = features.output_dim();

    let mut posteriors = Vec::with_capacity(saved.heads.len());
    let mut response_std = Vec::with_capacity(saved.heads.len());
    for (i, h) in saved.heads.iter().enumerate() {
        let (p, r) = load_head(h, i, d)?;
        posteriors.push(p);
        response_std.push(r);
    }
    let head_params = posteriors.iter().map(|p| p.params).collect();
    let mean = Array1::from_vec(decode_slice(&saved.input_scale.mean, "input_scale.mean")?);
    let std = Array1::from_vec(decode_slice(&saved.input_scale.std, "input_scale.std")?);
    if mean.len() != augmented || std.len() != augmented {
        return Err(format!(
            "input scale length {}/{} does not match the {augmented} augmented inputs",
            mean.len(),
            std.len()
        ));
    }

    Ok(LoadedModel {
        fit: FittedSurrogate {
            model: JointModel { features, heads: head_params },
            input_std: InputStandardizer { mean, std },
            response_std,
            posteriors,
            target_head: saved.target_head,
            target_context,
        },
        space,
        signals: saved.signals.clone(),
        task_ids: saved.task_ids.clone(),
        target_task: saved.target_task.clone(),
        target_signal: saved.target_signal,
    })
}

pub fn save_model(path: &Path, model: &SavedModel) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(model)
        .map_err(|e| format!("cannot serialize model: {e}"))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("cannot write '{}': {e}", path.display()))
}

pub fn load_model(path: &Path) -> Result<LoadedModel, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read model '{}': {e}", path.display()))?;
    // Check the version before insisting on the full layout so that a
    // future format fails with the version message, not a field error.
    let probe: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| format!("model '{}' is not valid JSON: {e}", path.display()))?;
    match probe.get("format_version").and_then(|v| v.as_u64()) {
        None => {
            return Err(format!(
                "model '{}' has no format_version field",
                path.display()
            ))
        }
        Some(v) if v != MODEL_FORMAT_VERSION as u64 => {
            return Err(format!(
                "model '{}': format version {v} is not supported (this build reads version {MODEL_FORMAT_VERSION})",
                path.display()
            ))
        }
        Some(_) => {}
    }
    let saved: SavedModel = serde_json::from_value(probe)
        .map_err(|e| format!("model '{}': {e}", path.display()))?;
    model_from_saved(&saved).map_err(|e| format!("model '{}': {e}", path.display()))
}

/// Sanity-check a freshly loaded posterior against a recomputation from its
/// own stored Gram matrix (used by tests; cheap enough to keep available).
pub fn recheck_head(p: &HeadPosterior) -> Result<(), String> {
    let rebuilt = fit_head_parts(
        &p.gram,
        p.l.dot(&p.c),
        p.y_sq,
        p.n,
        p.params,
    )
    .map_err(|e| e.to_string())?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
    if !close(rebuilt.nll(), p.nll()) {
        return Err(format!(
            "stored posterior is inconsistent with its Gram matrix: nll {} vs {}",
            p.nll(),
            rebuilt.nll()
        ));
    }
    Ok(())
}
