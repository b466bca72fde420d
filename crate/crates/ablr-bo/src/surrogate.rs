//! The multi-task surrogate as the BO loop sees it.
//!
//! `AblrSurrogate` owns the joint model (shared feature map + one head per
//! task-and-signal), the frozen input standardization, and per-head response
//! standardization. Refits warm-start L-BFGS from the previous optimum;
//! periodically a fresh random restart guards against a stale basin, keeping
//! whichever fit ends lower.

use ndarray::{Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use ablr_core::train::{fit_joint, head_posteriors, joint_nll, LbfgsOptions, TaskData};
use ablr_core::{
    FeatureMap, HeadPosterior, InputStandardizer, JointModel, MlpFeatures, Predictive,
    ResponseStandardizer, RksFeatures,
};

use crate::error::BoError;
use crate::history::{attach_signals, augment_with_context, TaskHistory};

/// Which feature family the surrogate learns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    /// Tanh network; `hidden` lists layer widths, last width = feature dim.
    Mlp { hidden: Vec<usize> },
    /// Random kitchen sinks with `dim` cosine features.
    Rks { dim: usize },
}

impl Default for FeatureKind {
    fn default() -> Self {
        FeatureKind::Mlp { hidden: vec![50, 50, 50] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateSettings {
    pub feature: FeatureKind,
    /// EI variance choice: latent-only (false, default) or noise-inclusive.
    pub ei_uses_noise: bool,
    /// L-BFGS iteration cap when continuing from the previous optimum.
    pub warm_refit_iters: usize,
    /// L-BFGS iteration cap for fresh restarts.
    pub fresh_refit_iters: usize,
    /// Every this-many refits, race a fresh restart against the warm fit.
    pub fresh_every: usize,
    /// Index of the optimized signal among the declared signals.
    pub target_signal: usize,
}

impl Default for SurrogateSettings {
    fn default() -> Self {
        Self {
            feature: FeatureKind::default(),
            ei_uses_noise: false,
            warm_refit_iters: 40,
            fresh_refit_iters: 150,
            fresh_every: 10,
            target_signal: 0,
        }
    }
}

/// What the BO loop needs from any surrogate (the GP baseline implements
/// this too).
pub trait Surrogate {
    /// Refit on all task histories; `target_idx` names the optimized task.
    fn refit(&mut self, tasks: &[TaskHistory], target_idx: usize) -> Result<(), BoError>;

    /// Target-signal predictions for the target task at encoded points, on
    /// the original response scale.
    fn predict(&self, x_enc: &ArrayView2<f64>) -> Result<Vec<Predictive>, BoError>;

    /// Whether EI should include observation noise in its spread.
    fn ei_uses_noise(&self) -> bool;
}

/// A frozen fit: everything `predict` consults. Export one to persist a
/// trained surrogate; import it later and predictions replay bit-exactly,
/// because the imported state drives the very same predict path.
#[derive(Debug, Clone)]
pub struct FittedSurrogate {
    pub model: JointModel,
    pub input_std: InputStandardizer,
    pub response_std: Vec<ResponseStandardizer>,
    pub posteriors: Vec<HeadPosterior>,
    /// Index of the optimized task-and-signal head.
    pub target_head: usize,
    /// Context vector appended to encoded inputs at prediction time.
    pub target_context: Vec<f64>,
}

pub struct AblrSurrogate {
    pub settings: SurrogateSettings,
    seed: u64,
    /// Optional per-task context vectors, aligned with the `tasks` slice
    /// passed to `refit` (target included). Appended to encoded inputs.
    contexts: Option<Vec<Vec<f64>>>,
    state: Option<FittedSurrogate>,
    refit_count: usize,
}

impl AblrSurrogate {
    pub fn new(settings: SurrogateSettings, seed: u64) -> Self {
        Self { settings, seed, contexts: None, state: None, refit_count: 0 }
    }

    pub fn with_contexts(mut self, contexts: Vec<Vec<f64>>) -> Self {
        self.contexts = Some(contexts);
        self
    }

    fn init_features(&self, p: usize, salt: u64) -> FeatureMap {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E3779B97F4A7C15));
        match &self.settings.feature {
            FeatureKind::Mlp { hidden } => {
                FeatureMap::Mlp(MlpFeatures::init(p, hidden, &mut rng))
            }
            FeatureKind::Rks { dim } => FeatureMap::Rks(RksFeatures::init(p, *dim, &mut rng)),
        }
    }

    fn context_of(&self, task_idx: usize, tasks_len: usize) -> Result<&[f64], BoError> {
        match &self.contexts {
            None => Ok(&[]),
            Some(ctx) => {
                if ctx.len() != tasks_len {
                    return Err(BoError::InvalidConfig(format!(
                        "{} context vectors for {} tasks",
                        ctx.len(),
                        tasks_len
                    )));
                }
                Ok(&ctx[task_idx])
            }
        }
    }

    /// The most recent per-head NLL-relevant posteriors (for tests/tools).
    pub fn posteriors(&self) -> Option<&[HeadPosterior]> {
        self.state.as_ref().map(|s| s.posteriors.as_slice())
    }

    pub fn model(&self) -> Option<&JointModel> {
        self.state.as_ref().map(|s| &s.model)
    }

    /// Snapshot the current fit for persistence; `None` before any refit.
    pub fn export(&self) -> Option<&FittedSurrogate> {
        self.state.as_ref()
    }

    /// Rebuild a surrogate around a previously exported fit. The result
    /// predicts immediately; a later `refit` warm-starts from the snapshot.
    pub fn import(settings: SurrogateSettings, fit: FittedSurrogate) -> Self {
        Self {
            settings,
            seed: 0,
            contexts: None,
            state: Some(fit),
            refit_count: 1,
        }
    }
}

impl Surrogate for AblrSurrogate {
    fn refit(&mut self, tasks: &[TaskHistory], target_idx: usize) -> Result<(), BoError> {
        if tasks.is_empty() || target_idx >= tasks.len() {
            return Err(BoError::InvalidConfig(format!(
                "target index {target_idx} with {} tasks",
                tasks.len()
            )));
        }
        let s_count = tasks[0].num_signals();
        if tasks.iter().any(|t| t.num_signals() != s_count) {
            return Err(BoError::InvalidHistory(
                "tasks disagree on the number of signals".into(),
            ));
        }
        if self.settings.target_signal >= s_count {
            return Err(BoError::InvalidConfig(format!(
                "target signal {} with {s_count} signals",
                self.settings.target_signal
            )));
        }

        // Context-augmented raw inputs per task.
        let mut raw_x: Vec<Array2<f64>> = Vec::with_capacity(tasks.len());
        for (t, hist) in tasks.iter().enumerate() {
            let ctx = self.context_of(t, tasks.len())?.to_vec();
            raw_x.push(augment_with_context(&hist.x.view(), &ctx));
        }
        let p = raw_x[0].ncols();

        // Input statistics freeze at the first refit of a run. The network
        // map gets scale-only normalization: it has no bias terms, so
        // centering would collapse its feature class to odd functions of
        // the data mean; the kitchen-sink map is phase-shifted and centers
        // safely.
        let centered = matches!(self.settings.feature, FeatureKind::Rks { .. });
        let input_std = match &self.state {
            Some(st) => st.input_std.clone(),
            None => {
                let views: Vec<_> = raw_x.iter().map(|x| x.view()).collect();
                let stacked = ndarray::concatenate(Axis(0), &views)
                    .expect("uniform widths");
                match (stacked.nrows() >= 2, centered) {
                    (true, true) => InputStandardizer::fit(&stacked.view()),
                    (true, false) => InputStandardizer::scale_only(&stacked.view()),
                    (false, true) => InputStandardizer::unit_cube(p),
                    (false, false) => InputStandardizer::unit_cube_scale_only(p),
                }
            }
        };

        // One training block per task holding every signal column; one head
        // per (task, signal). Response scale is refreshed every refit.
        let mut datasets: Vec<TaskData> = Vec::with_capacity(tasks.len());
        let mut response_std = Vec::with_capacity(tasks.len() * s_count);
        for (hist, rx) in tasks.iter().zip(&raw_x) {
            let x_std = input_std.transform(&rx.view());
            let raw = attach_signals(hist);
            let mut ys = raw.ys;
            for mut col in ys.columns_mut() {
                let stats = ResponseStandardizer::fit(&col.view());
                response_std.push(stats);
                let scaled = stats.transform(&col.view());
                col.assign(&scaled);
            }
            datasets.push(TaskData::new(x_std, ys)?);
        }
        let num_heads = tasks.len() * s_count;

        let warm_opts = LbfgsOptions {
            max_iters: self.settings.warm_refit_iters,
            ..Default::default()
        };
        let fresh_opts = LbfgsOptions {
            max_iters: self.settings.fresh_refit_iters,
            ..Default::default()
        };

        let mut model = match &self.state {
            Some(st) if st.model.heads.len() == num_heads => {
                let mut m = st.model.clone();
                // A warm start can be unevaluable on the grown data (the
                // previous optimum may sit on a numerical cliff); fall back
                // to a fresh initialization instead of failing the refit.
                match fit_joint(&mut m, &datasets, &warm_opts) {
                    Ok(_) => m,
                    Err(_) => {
                        let mut f = JointModel::new(self.init_features(p, 0), num_heads);
                        fit_joint(&mut f, &datasets, &fresh_opts)?;
                        f
                    }
                }
            }
            _ => {
                let mut m = JointModel::new(self.init_features(p, 0), num_heads);
                fit_joint(&mut m, &datasets, &fresh_opts)?;
                m
            }
        };

        // Periodic fresh restart: keep whichever ends lower.
        if self.state.is_some() && self.refit_count % self.settings.fresh_every.max(1) == 0 {
            let mut fresh =
                JointModel::new(self.init_features(p, self.refit_count as u64 + 1), num_heads);
            if fit_joint(&mut fresh, &datasets, &fresh_opts).is_ok() {
                let warm_nll = joint_nll(&model, &datasets)?;
                let fresh_nll = joint_nll(&fresh, &datasets)?;
                if fresh_nll < warm_nll {
                    model = fresh;
                }
            }
        }
        self.refit_count += 1;

        let posteriors = head_posteriors(&model, &datasets)?;
        let target_head = target_idx * s_count + self.settings.target_signal;
        let target_context = self.context_of(target_idx, tasks.len())?.to_vec();
        self.state = Some(FittedSurrogate {
            model,
            input_std,
            response_std,
            posteriors,
            target_head,
            target_context,
        });
        Ok(())
    }

    fn predict(&self, x_enc: &ArrayView2<f64>) -> Result<Vec<Predictive>, BoError> {
        let st = self
            .state
            .as_ref()
            .ok_or_else(|| BoError::InvalidConfig("predict before refit".into()))?;
        let x_aug = augment_with_context(x_enc, &st.target_context);
        let x_std = st.input_std.transform(&x_aug.view());
        let phi = st.model.features.forward(&x_std.view());
        let stats = st.response_std[st.target_head];
        Ok(st.posteriors[st.target_head]
            .predict_batch(&phi.view())
            .into_iter()
            .map(|p| Predictive {
                mean: stats.inverse_mean(p.mean),
                variance: stats.inverse_variance(p.variance),
                latent_variance: stats.inverse_variance(p.latent_variance),
            })
            .collect())
    }

    fn ei_uses_noise(&self) -> bool {
        self.settings.ei_uses_noise
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{continuous, SearchSpace};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn quadratic_history(
        task_id: &str,
        shift: f64,
        n: usize,
        rng: &mut ChaCha20Rng,
        space: &SearchSpace,
    ) -> TaskHistory {
        let mut h = TaskHistory::empty(task_id, 1, 1);
        for _ in 0..n {
            let z = space.random_point(rng);
            let x_nat = space.decode(&z.view())[0];
            let y = (x_nat - shift).powi(2);
            h.push(&z.view(), &[y]);
        }
        h
    }

    fn small_settings() -> SurrogateSettings {
        SurrogateSettings {
            feature: FeatureKind::Mlp { hidden: vec![8, 8] },
            warm_refit_iters: 30,
            fresh_refit_iters: 150,
            ..Default::default()
        }
    }

    #[test]
    fn fits_and_interpolates_a_smooth_function() {
        let space = SearchSpace::new(vec![continuous("x", -2.0, 2.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let hist = quadratic_history("t", 0.5, 40, &mut rng, &space);
        let mut surr = AblrSurrogate::new(small_settings(), 123);
        surr.refit(std::slice::from_ref(&hist), 0).unwrap();

        // Predict on the training points: close to the truth, tight variance.
        let preds = surr.predict(&hist.x.view()).unwrap();
        let mut worst = 0.0f64;
        for (p, y) in preds.iter().zip(hist.signal(0)) {
            assert!(p.variance > 0.0 && p.variance.is_finite());
            assert!(p.latent_variance <= p.variance);
            worst = worst.max((p.mean - y).abs());
        }
        assert!(worst < 0.35, "worst training-point error {worst}");
    }

    #[test]
    fn warm_refit_reuses_and_improves_the_previous_fit() {
        let space = SearchSpace::new(vec![continuous("x", -2.0, 2.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut hist = quadratic_history("t", -0.3, 25, &mut rng, &space);
        let mut surr = AblrSurrogate::new(small_settings(), 9);
        surr.refit(std::slice::from_ref(&hist), 0).unwrap();
        let frozen = match &surr.state {
            Some(st) => st.input_std.clone(),
            None => unreachable!(),
        };

        // More data arrives; input statistics must stay frozen.
        let z = space.encode(&[1.3]).unwrap();
        hist.push(&z.view(), &[(1.3f64 + 0.3).powi(2)]);
        surr.refit(std::slice::from_ref(&hist), 0).unwrap();
        let after = match &surr.state {
            Some(st) => st.input_std.clone(),
            None => unreachable!(),
        };
        assert_eq!(frozen, after);
        assert_eq!(surr.refit_count, 2);
    }

    #[test]
    fn empty_target_with_warm_tasks_predicts_from_the_shared_map() {
        let space = SearchSpace::new(vec![continuous("x", -2.0, 2.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let warm: Vec<TaskHistory> = (0..3)
            .map(|i| {
                quadratic_history(&format!("w{i}"), 0.2 * i as f64, 15, &mut rng, &space)
            })
            .collect();
        let mut tasks = warm;
        tasks.push(TaskHistory::empty("target", 1, 1));
        let mut surr = AblrSurrogate::new(small_settings(), 77);
        surr.refit(&tasks, 3).unwrap();
        let q = array![[0.25], [0.75]];
        let preds = surr.predict(&q.view()).unwrap();
        for p in preds {
            // Prior head: centered, but with informative (finite) spread.
            assert_abs_diff_eq!(p.mean, 0.0, epsilon = 1e-9);
            assert!(p.latent_variance > 0.0);
        }
    }

    #[test]
    fn side_signals_become_extra_heads_without_touching_target_predictions_at_fixed_features() {
        // With the kitchen-sink map trained on constant side signals, the
        // target head's posterior depends only on the shared features and
        // its own data; side heads absorb their constants independently.
        let space = SearchSpace::new(vec![continuous("x", 0.0, 1.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let mut single = TaskHistory::empty("t", 1, 1);
        let mut multi = TaskHistory::empty("t", 1, 3);
        for _ in 0..20 {
            let z = space.random_point(&mut rng);
            let y = (z[0] - 0.4).powi(2);
            single.push(&z.view(), &[y]);
            multi.push(&z.view(), &[y, 5.0, -2.0]);
        }
        let settings = |target| SurrogateSettings {
            feature: FeatureKind::Rks { dim: 24 },
            target_signal: target,
            warm_refit_iters: 30,
            fresh_refit_iters: 60,
            ..Default::default()
        };
        let mut s1 = AblrSurrogate::new(settings(0), 55);
        s1.refit(std::slice::from_ref(&single), 0).unwrap();
        let mut s3 = AblrSurrogate::new(settings(0), 55);
        s3.refit(std::slice::from_ref(&multi), 0).unwrap();

        let q = Array2::from_shape_fn((6, 1), |(i, _)| i as f64 / 5.0);
        let p1 = s1.predict(&q.view()).unwrap();
        let p3 = s3.predict(&q.view()).unwrap();
        for (a, b) in p1.iter().zip(&p3) {
            // Same family, same data for the target head; constants carry no
            // gradient pressure on sigma, so predictions should agree closely.
            assert_abs_diff_eq!(a.mean, b.mean, epsilon = 0.05);
        }
    }

    #[test]
    fn rks_only_trains_the_length_scale() {
        let space = SearchSpace::new(vec![continuous("x", 0.0, 1.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let hist = quadratic_history("t", 0.1, 30, &mut rng, &space);
        let settings = SurrogateSettings {
            feature: FeatureKind::Rks { dim: 16 },
            ..Default::default()
        };
        let mut surr = AblrSurrogate::new(settings, 3);
        surr.refit(std::slice::from_ref(&hist), 0).unwrap();
        let model = surr.model().unwrap();
        match &model.features {
            FeatureMap::Rks(r) => {
                let before = AblrSurrogate::new(
                    SurrogateSettings {
                        feature: FeatureKind::Rks { dim: 16 },
                        ..Default::default()
                    },
                    3,
                )
                .init_features(1, 0);
                match before {
                    FeatureMap::Rks(b) => {
                        assert_eq!(r.proj, b.proj, "projection must stay frozen");
                        assert_eq!(r.phases, b.phases, "phases must stay frozen");
                        assert_ne!(r.log_sigma, b.log_sigma, "length-scale must train");
                    }
                    _ => unreachable!(),
                }
            }
            _ => panic!("expected kitchen-sink features"),
        }
    }

    #[test]
    fn contexts_change_predictions() {
        let space = SearchSpace::new(vec![continuous("x", 0.0, 1.0)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let t0 = quadratic_history("a", 0.2, 20, &mut rng, &space);
        let t1 = quadratic_history("b", 0.8, 20, &mut rng, &space);
        let tasks = vec![t0, t1];
        let mk = || {
            AblrSurrogate::new(small_settings(), 42)
                .with_contexts(vec![vec![0.2], vec![0.8]])
        };
        let q = Array2::from_shape_fn((5, 1), |(i, _)| 0.1 + 0.2 * i as f64);
        let mut sa = mk();
        sa.refit(&tasks, 0).unwrap();
        let pa: Vec<f64> = sa.predict(&q.view()).unwrap().iter().map(|p| p.mean).collect();
        let mut sb = mk();
        sb.refit(&tasks, 1).unwrap();
        let pb: Vec<f64> = sb.predict(&q.view()).unwrap().iter().map(|p| p.mean).collect();
        // Different target context -> different prediction surface.
        let diff: f64 = pa
            .iter()
            .zip(&pb)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff > 1e-3, "contexts were ignored (max diff {diff})");
    }

    #[test]
    fn mismatched_signal_counts_are_rejected() {
        let mut a = TaskHistory::empty("a", 1, 1);
        a.push(&array![0.5].view(), &[1.0]);
        let mut b = TaskHistory::empty("b", 1, 2);
        b.push(&array![0.5].view(), &[1.0, 2.0]);
        let mut surr = AblrSurrogate::new(small_settings(), 1);
        assert!(surr.refit(&[a, b], 0).is_err());
    }

    #[test]
    fn deterministic_across_identical_runs() {
        let space = SearchSpace::new(vec![continuous("x", 0.0, 1.0)]).unwrap();
        let run = || {
            let mut rng = ChaCha20Rng::seed_from_u64(15);
            let hist = quadratic_history("t", 0.6, 18, &mut rng, &space);
            let mut surr = AblrSurrogate::new(small_settings(), 2024);
            surr.refit(std::slice::from_ref(&hist), 0).unwrap();
            let q = array![[0.31], [0.62]];
            surr.predict(&q.view())
                .unwrap()
                .iter()
                .map(|p| (p.mean.to_bits(), p.variance.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
