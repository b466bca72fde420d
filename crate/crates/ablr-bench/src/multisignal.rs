//! Multi-signal benchmark: a 2-D target with known minimum plus auxiliary
//! signals that are smoothly distorted, noisy copies of it. Measures whether
//! extra signals speed up finding the optimum, and how fit cost scales with
//! the signal count.

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use ablr_bo::{
    continuous, run_bo, AblrSurrogate, BoTrace, FeatureKind, RunSettings, SearchSpace,
    SurrogateSettings,
};
use ablr_core::train::{joint_nll_grad, JointModel, TaskData};
use ablr_core::{FeatureMap, MlpFeatures};

use crate::error::BenchError;
use crate::stats::median;

/// Bowl center of the benchmark target.
const CENTER: [f64; 2] = [0.42, 0.61];
/// Curvature of the second coordinate relative to the first.
const CURVE_Y: f64 = 1.3;
/// Observation noise on the auxiliary signals.
const SIDE_NOISE_SD: f64 = 0.01;

/// Unit square search space for the benchmark target.
pub fn ms_space() -> SearchSpace {
    SearchSpace::new(vec![continuous("x1", 0.0, 1.0), continuous("x2", 0.0, 1.0)])
        .expect("static space is valid")
}

/// The optimized signal: an anisotropic bowl with minimum 0 at
/// (0.42, 0.61).
pub fn ms_target(x: &[f64]) -> f64 {
    (x[0] - CENTER[0]).powi(2) + CURVE_Y * (x[1] - CENTER[1]).powi(2)
}

/// Smooth distortion added to auxiliary signal `j` (deterministic in `x`).
fn ms_distortion(j: usize, x: &[f64]) -> f64 {
    match j % 3 {
        0 => 0.08 * (3.0 * x[0] + 1.0).cos() * (2.0 * x[1]).cos(),
        1 => 0.06 * (2.0 * x[0]).sin() * (3.0 * x[1] + 0.5).cos(),
        _ => 0.07 * (4.0 * x[0] - 0.7).cos() * (2.5 * x[1] + 0.2).sin(),
    }
}

/// Evaluate all `s` signals at `x`: the exact target first, then distorted
/// noisy copies.
pub fn ms_signals(x: &[f64], s: usize, rng: &mut impl Rng) -> Vec<f64> {
    let noise = Normal::new(0.0, SIDE_NOISE_SD).expect("positive spread");
    let mut out = Vec::with_capacity(s);
    out.push(ms_target(x));
    for j in 1..s {
        out.push(ms_target(x) + ms_distortion(j - 1, x) + noise.sample(rng));
    }
    out
}

/// Success threshold: within 5% of the target's range over the box. The
/// bowl is separable so its extremes sit at the corners.
pub fn ms_threshold() -> f64 {
    let corners = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let max = corners
        .iter()
        .map(|c| ms_target(c))
        .fold(f64::NEG_INFINITY, f64::max);
    0.05 * max
}

/// 1-based iteration at which the incumbent first clears the threshold;
/// `budget + 1` when it never does.
pub fn iterations_to_threshold(trace: &BoTrace, threshold: f64, budget: usize) -> usize {
    trace
        .records
        .iter()
        .position(|r| r.incumbent <= threshold)
        .map(|i| i + 1)
        .unwrap_or(budget + 1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiSignalConfig {
    /// Signal count including the target.
    pub signals: usize,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub mlp_hidden: Vec<usize>,
    pub record_timings: bool,
}

impl Default for MultiSignalConfig {
    fn default() -> Self {
        Self {
            signals: 3,
            iterations: 25,
            seeds: (0..5).collect(),
            mlp_hidden: vec![32, 32],
            record_timings: true,
        }
    }
}

impl MultiSignalConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.signals == 0 {
            return Err(BenchError::InvalidConfig("at least one signal is required".into()));
        }
        if self.iterations == 0 {
            return Err(BenchError::InvalidConfig("iterations must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::InvalidConfig("at least one seed is required".into()));
        }
        if self.mlp_hidden.is_empty() || self.mlp_hidden.contains(&0) {
            return Err(BenchError::InvalidConfig(
                "network hidden widths must be non-empty and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Run one seed: optimize the target while the surrogate sees all signals.
pub fn ms_run_one(cfg: &MultiSignalConfig, seed: u64) -> Result<BoTrace, BenchError> {
    let space = ms_space();
    let mut noise_rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5157_3E0A_11C0_FFEE);
    let s = cfg.signals;
    let mut black_box =
        |x: &[f64]| -> Result<Vec<f64>, String> { Ok(ms_signals(x, s, &mut noise_rng)) };
    let mut surrogate = AblrSurrogate::new(
        SurrogateSettings {
            feature: FeatureKind::Mlp { hidden: cfg.mlp_hidden.clone() },
            target_signal: 0,
            ..Default::default()
        },
        seed,
    );
    let settings = RunSettings {
        record_timings: cfg.record_timings,
        ..RunSettings::new(cfg.iterations, seed)
    };
    run_bo(&mut black_box, &space, &[], &mut surrogate, s, &settings).map_err(BenchError::Bo)
}

/// Iterations-to-threshold for every seed.
pub fn ms_iterations(cfg: &MultiSignalConfig) -> Result<Vec<usize>, BenchError> {
    cfg.validate()?;
    let threshold = ms_threshold();
    cfg.seeds
        .iter()
        .map(|&seed| {
            let trace = ms_run_one(cfg, seed)?;
            Ok(iterations_to_threshold(&trace, threshold, cfg.iterations))
        })
        .collect()
}

/// Fit-cost scaling over the signal count: median wall time of a fixed
/// number of joint objective-and-gradient evaluations on the same inputs,
/// with columns added one signal at a time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalLadder {
    pub signals: Vec<usize>,
    pub median_ms: Vec<f64>,
    /// `median_ms[i + 1] / median_ms[i]` — the per-added-signal growth.
    pub ratios: Vec<f64>,
}

/// Time the fit workload at `1..=s_max` signals. Each timed repetition runs
/// `evals_per_rep` objective+gradient evaluations; the feature map and the
/// input rows are identical across ladder steps so only the signal count
/// varies.
pub fn signal_fit_ladder(
    s_max: usize,
    n: usize,
    hidden: &[usize],
    reps: usize,
    evals_per_rep: usize,
    seed: u64,
) -> Result<SignalLadder, BenchError> {
    assert!(s_max >= 1 && n >= 4 && reps >= 1 && evals_per_rep >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = 2;
    let mut x = Array2::zeros((n, p));
    for mut row in x.rows_mut() {
        row[0] = rng.gen_range(0.0..1.0);
        row[1] = rng.gen_range(0.0..1.0);
    }
    let mut ys = Array2::zeros((n, s_max));
    for i in 0..n {
        let xi = [x[[i, 0]], x[[i, 1]]];
        let sig = ms_signals(&xi, s_max, &mut rng);
        ys.row_mut(i).assign(&Array1::from(sig));
    }
    let features = FeatureMap::Mlp(MlpFeatures::init(p, hidden, &mut rng));

    let mut signals = Vec::with_capacity(s_max);
    let mut median_ms = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        let ys_s = ys.slice(ndarray::s![.., ..s]).to_owned();
        let task = TaskData::new(x.clone(), ys_s).map_err(BenchError::Core)?;
        let tasks = [task];
        let model = JointModel::new(features.clone(), s);
        // Untimed warmup to fault in allocations and caches.
        joint_nll_grad(&model, &tasks).map_err(BenchError::Core)?;
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let start = Instant::now();
            for _ in 0..evals_per_rep {
                let (obj, grad) = joint_nll_grad(&model, &tasks).map_err(BenchError::Core)?;
                std::hint::black_box((obj, grad));
            }
            times.push(start.elapsed().as_secs_f64() * 1e3);
        }
        signals.push(s);
        median_ms.push(median(&times));
    }
    let ratios = median_ms.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(SignalLadder { signals, median_ms, ratios })
}
