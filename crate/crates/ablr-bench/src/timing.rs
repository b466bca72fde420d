//! Wall-time scaling ladders: how fit cost grows with the number of
//! observations for the linear-head surrogate (near-linear in N) versus the
//! exact kernel baseline (cubic in N). Both ladders time the same unit of
//! work — objective-and-gradient evaluations at fixed hyperparameters — so
//! iteration-count differences between optimizers cannot pollute the slope.

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use ablr_core::train::{joint_nll_grad, JointModel, TaskData};
use ablr_core::{FeatureMap, MlpFeatures};

use crate::error::BenchError;
use crate::gp::{gp_nll_grad, GpHyper};
use crate::stats::median;

/// Least-squares slope of `log(time)` against `log(size)`.
pub fn loglog_slope(sizes: &[usize], times_ms: &[f64]) -> f64 {
    assert_eq!(sizes.len(), times_ms.len());
    assert!(sizes.len() >= 2, "slope needs at least two rungs");
    let lx: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = times_ms.iter().map(|&t| t.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingLadder {
    pub sizes: Vec<usize>,
    pub median_ms: Vec<f64>,
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingConfig {
    /// Observation counts to ladder over.
    pub sizes: Vec<usize>,
    /// Input dimensionality of the synthetic data.
    pub input_dim: usize,
    /// Feature dimensionality (last hidden width) of the network surrogate.
    pub feature_dim: usize,
    /// Timed repetitions per rung (median taken).
    pub reps: usize,
    /// Objective evaluations inside one repetition.
    pub evals_per_rep: usize,
    pub seed: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            sizes: vec![256, 512, 1024, 2048],
            input_dim: 3,
            feature_dim: 50,
            reps: 3,
            evals_per_rep: 2,
            seed: 0,
        }
    }
}

impl TimingConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.len() < 2 {
            return Err(BenchError::InvalidConfig(
                "timing ladder needs at least two sizes".into(),
            ));
        }
        if self.sizes.iter().any(|&n| n < 4) || self.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BenchError::InvalidConfig(
                "sizes must be increasing and at least 4".into(),
            ));
        }
        if self.input_dim == 0 || self.feature_dim == 0 {
            return Err(BenchError::InvalidConfig("dimensions must be positive".into()));
        }
        if self.reps == 0 || self.evals_per_rep == 0 {
            return Err(BenchError::InvalidConfig("repetition counts must be positive".into()));
        }
        Ok(())
    }
}

fn synthetic_xy(n: usize, p: usize, rng: &mut impl Rng) -> (Array2<f64>, Array1<f64>) {
    let mut x = Array2::zeros((n, p));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let mut sq = 0.0;
        for j in 0..p {
            let v: f64 = rng.gen_range(-1.0..1.0);
            x[[i, j]] = v;
            sq += v * v;
        }
        y[i] = sq + 0.05 * rng.gen_range(-1.0..1.0);
    }
    (x, y)
}

/// Time the network surrogate's fit workload across observation counts.
/// The network has three hidden layers of `feature_dim` units.
pub fn ablr_fit_ladder(cfg: &TimingConfig) -> Result<TimingLadder, BenchError> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let hidden = vec![cfg.feature_dim; 3];
    let features = FeatureMap::Mlp(MlpFeatures::init(cfg.input_dim, &hidden, &mut rng));
    let mut median_ms = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let (x, y) = synthetic_xy(n, cfg.input_dim, &mut rng);
        let task = TaskData::single(x, y).map_err(BenchError::Core)?;
        let tasks = [task];
        let model = JointModel::new(features.clone(), 1);
        joint_nll_grad(&model, &tasks).map_err(BenchError::Core)?;
        let mut times = Vec::with_capacity(cfg.reps);
        for _ in 0..cfg.reps {
            let start = Instant::now();
            for _ in 0..cfg.evals_per_rep {
                let out = joint_nll_grad(&model, &tasks).map_err(BenchError::Core)?;
                std::hint::black_box(out);
            }
            times.push(start.elapsed().as_secs_f64() * 1e3 / cfg.evals_per_rep as f64);
        }
        median_ms.push(median(&times));
    }
    let slope = loglog_slope(&cfg.sizes, &median_ms);
    Ok(TimingLadder { sizes: cfg.sizes.clone(), median_ms, slope })
}

/// Time the exact kernel baseline's fit workload across observation counts
/// (`feature_dim` is ignored — the kernel works on the raw inputs).
pub fn gp_fit_ladder(cfg: &TimingConfig) -> Result<TimingLadder, BenchError> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0xA5A5_5A5A_F00D_CAFE);
    let hyper = GpHyper::default_for(cfg.input_dim);
    let mut median_ms = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let (x, y) = synthetic_xy(n, cfg.input_dim, &mut rng);
        gp_nll_grad(&x.view(), &y.view(), &hyper).map_err(BenchError::Core)?;
        let mut times = Vec::with_capacity(cfg.reps);
        for _ in 0..cfg.reps {
            let start = Instant::now();
            for _ in 0..cfg.evals_per_rep {
                let out = gp_nll_grad(&x.view(), &y.view(), &hyper).map_err(BenchError::Core)?;
                std::hint::black_box(out);
            }
            times.push(start.elapsed().as_secs_f64() * 1e3 / cfg.evals_per_rep as f64);
        }
        median_ms.push(median(&times));
    }
    let slope = loglog_slope(&cfg.sizes, &median_ms);
    Ok(TimingLadder { sizes: cfg.sizes.clone(), median_ms, slope })
}
