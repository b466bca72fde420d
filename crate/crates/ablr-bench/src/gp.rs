//! Dense Gaussian-process regression baseline with a squared-exponential
//! ARD kernel, sharing the L-BFGS engine and the evidence-maximization
//! recipe of the main surrogate. Exact inference costs cubic time in the
//! number of observations, which is the point: the benchmark ladder measures
//! that slope against the linear-in-N surrogate.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use ablr_core::linalg;
use ablr_core::train::lbfgs::{minimize, LbfgsOptions, LbfgsReport};
use ablr_core::{CoreError, Predictive, ResponseStandardizer};

use ablr_bo::{augment_with_context, BoError, Surrogate, TaskHistory};

/// Guard box for the log hyperparameters during evidence maximization;
/// steps outside are rejected by the line search. The lower noise bound
/// doubles as a noise floor that keeps the kernel matrix factorizable.
pub const GP_LOG_BOUND: f64 = 12.0;

/// Log-parametrized kernel hyperparameters: signal variance, one length
/// scale per input dimension, observation-noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GpHyper {
    pub log_sf2: f64,
    pub log_ell: Vec<f64>,
    pub log_sn2: f64,
}

impl GpHyper {
    /// Unit signal variance, unit length scales, 1% noise — sensible over
    /// standardized responses.
    pub fn default_for(p: usize) -> Self {
        Self { log_sf2: 0.0, log_ell: vec![0.0; p], log_sn2: (1e-2f64).ln() }
    }

    pub fn dims(&self) -> usize {
        self.log_ell.len()
    }

    fn pack(&self) -> Array1<f64> {
        let p = self.dims();
        let mut out = Array1::zeros(p + 2);
        out[0] = self.log_sf2;
        for (d, v) in self.log_ell.iter().enumerate() {
            out[1 + d] = *v;
        }
        out[p + 1] = self.log_sn2;
        out
    }

    fn unpack(p: usize, theta: &ArrayView1<f64>) -> Self {
        debug_assert_eq!(theta.len(), p + 2);
        Self {
            log_sf2: theta[0],
            log_ell: theta.iter().skip(1).take(p).copied().collect(),
            log_sn2: theta[p + 1],
        }
    }

    fn in_bounds(&self) -> bool {
        self.log_sf2.abs() <= GP_LOG_BOUND
            && self.log_sn2.abs() <= GP_LOG_BOUND
            && self.log_ell.iter().all(|v| v.abs() <= GP_LOG_BOUND)
    }

    fn clamped(&self) -> Self {
        let b = GP_LOG_BOUND;
        Self {
            log_sf2: self.log_sf2.clamp(-b, b),
            log_ell: self.log_ell.iter().map(|v| v.clamp(-b, b)).collect(),
            log_sn2: self.log_sn2.clamp(-b, b),
        }
    }
}

/// Noise-free kernel matrix `K_se[i][j] = sf2 exp(-1/2 sum_d (dx_d/ell_d)^2)`.
fn se_kernel(x: &ArrayView2<f64>, hyper: &GpHyper) -> Array2<f64> {
    let n = x.nrows();
    let sf2 = hyper.log_sf2.exp();
    let inv_ell2: Vec<f64> = hyper.log_ell.iter().map(|v| (-2.0 * v).exp()).collect();
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        k[[i, i]] = sf2;
        for j in 0..i {
            let mut q = 0.0;
            for (d, w) in inv_ell2.iter().enumerate() {
                let diff = x[[i, d]] - x[[j, d]];
                q += diff * diff * w;
            }
            let v = sf2 * (-0.5 * q).exp();
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    k
}

/// Cross-covariances between query rows and training rows, `m x n`.
fn se_cross(xq: &ArrayView2<f64>, x: &ArrayView2<f64>, hyper: &GpHyper) -> Array2<f64> {
    let (m, n) = (xq.nrows(), x.nrows());
    let sf2 = hyper.log_sf2.exp();
    let inv_ell2: Vec<f64> = hyper.log_ell.iter().map(|v| (-2.0 * v).exp()).collect();
    let mut k = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let mut q = 0.0;
            for (d, w) in inv_ell2.iter().enumerate() {
                let diff = xq[[i, d]] - x[[j, d]];
                q += diff * diff * w;
            }
            k[[i, j]] = sf2 * (-0.5 * q).exp();
        }
    }
    k
}

/// Negative log marginal likelihood (constant included) and its gradient in
/// [`GpHyper::pack`] order.
///
/// The gradient of each log hyperparameter `t` is
/// `1/2 tr((K^-1 - aa^T) dK/dt)` with `a = K^-1 y`; the three perturbation
/// directions are the noise-free kernel itself (signal variance), its
/// elementwise product with squared per-dimension distances (length scales),
/// and the scaled identity (noise).
pub fn gp_nll_grad(
    x: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    hyper: &GpHyper,
) -> Result<(f64, Array1<f64>), CoreError> {
    let n = x.nrows();
    let p = x.ncols();
    let sn2 = hyper.log_sn2.exp();
    let kse = se_kernel(x, hyper);
    let mut k = kse.clone();
    for i in 0..n {
        k[[i, i]] += sn2;
    }
    let (l, _jitter) = linalg::cholesky_jittered(&k.view())?;
    let half = linalg::solve_lower_vec(&l.view(), y);
    let alpha = linalg::solve_lower_t_vec(&l.view(), &half.view());
    let log_det_half: f64 = l.diag().iter().map(|v| v.ln()).sum();
    let nll = 0.5 * y.dot(&alpha)
        + log_det_half
        + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    // W = K^-1 - alpha alpha^T, the shared factor of every trace term.
    let kinv = linalg::chol_inverse(&l.view());
    let inv_ell2: Vec<f64> = hyper.log_ell.iter().map(|v| (-2.0 * v).exp()).collect();
    let mut g_sf2 = 0.0;
    let mut g_ell = vec![0.0; p];
    let mut tr_w = 0.0;
    for i in 0..n {
        let wii = kinv[[i, i]] - alpha[i] * alpha[i];
        tr_w += wii;
        g_sf2 += wii * kse[[i, i]];
        for j in 0..i {
            let wij = kinv[[i, j]] - alpha[i] * alpha[j];
            let wk = wij * kse[[i, j]];
            g_sf2 += 2.0 * wk;
            for (d, w) in inv_ell2.iter().enumerate() {
                let diff = x[[i, d]] - x[[j, d]];
                g_ell[d] += 2.0 * wk * diff * diff * w;
            }
        }
    }
    let mut grad = Array1::zeros(p + 2);
    grad[0] = 0.5 * g_sf2;
    for d in 0..p {
        grad[1 + d] = 0.5 * g_ell[d];
    }
    grad[p + 1] = 0.5 * sn2 * tr_w;
    if !nll.is_finite() || !grad.iter().all(|v| v.is_finite()) {
        return Err(CoreError::NonFinite { context: "gp objective" });
    }
    Ok((nll, grad))
}

/// Maximize the evidence over the log hyperparameters from `init` (clamped
/// into the guard box). Returns the optimum and the optimizer report.
pub fn fit_gp_hyper(
    x: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    init: &GpHyper,
    opts: &LbfgsOptions,
) -> Result<(GpHyper, LbfgsReport), CoreError> {
    let p = x.ncols();
    if init.dims() != p {
        return Err(CoreError::shape(
            "gp hyperparameters",
            format!("{p} length scales"),
            format!("{}", init.dims()),
        ));
    }
    let start = init.clamped();
    let eval = |theta: &ArrayView1<f64>| -> Option<(f64, Array1<f64>)> {
        let h = GpHyper::unpack(p, theta);
        if !h.in_bounds() {
            return None;
        }
        gp_nll_grad(x, y, &h).ok()
    };
    let (theta, report) = minimize(eval, &start.pack().view(), opts)?;
    Ok((GpHyper::unpack(p, &theta.view()), report))
}

/// A factorized GP regressor ready for prediction.
#[derive(Debug, Clone)]
pub struct GpModel {
    pub hyper: GpHyper,
    x: Array2<f64>,
    l: Array2<f64>,
    alpha: Array1<f64>,
    stats: ResponseStandardizer,
}

impl GpModel {
    fn factorize(
        x: Array2<f64>,
        y_std: &Array1<f64>,
        hyper: GpHyper,
        stats: ResponseStandardizer,
    ) -> Result<Self, CoreError> {
        let n = x.nrows();
        let sn2 = hyper.log_sn2.exp();
        let mut k = se_kernel(&x.view(), &hyper);
        for i in 0..n {
            k[[i, i]] += sn2;
        }
        let (l, _jitter) = linalg::cholesky_jittered(&k.view())?;
        let half = linalg::solve_lower_vec(&l.view(), &y_std.view());
        let alpha = linalg::solve_lower_t_vec(&l.view(), &half.view());
        Ok(Self { hyper, x, l, alpha, stats })
    }

    /// Standardize responses, maximize the evidence from `init`, factorize.
    pub fn fit(
        x: Array2<f64>,
        y: &ArrayView1<f64>,
        init: &GpHyper,
        opts: &LbfgsOptions,
    ) -> Result<Self, CoreError> {
        if x.nrows() == 0 {
            return Err(CoreError::shape("gp fit", "at least one observation", "0"));
        }
        let stats = ResponseStandardizer::fit(y);
        let y_std = stats.transform(y);
        let (hyper, _report) = fit_gp_hyper(&x.view(), &y_std.view(), init, opts)?;
        Self::factorize(x, &y_std, hyper, stats)
    }

    /// Factorize at fixed hyperparameters on the raw response scale (no
    /// standardization, no training) — the oracle-comparison path.
    pub fn with_fixed_hyper(
        x: Array2<f64>,
        y: &ArrayView1<f64>,
        hyper: GpHyper,
    ) -> Result<Self, CoreError> {
        let y_raw = y.to_owned();
        Self::factorize(x, &y_raw, hyper, ResponseStandardizer::identity())
    }

    pub fn num_observations(&self) -> usize {
        self.x.nrows()
    }

    /// Exact GP predictive distribution at each query row, on the original
    /// response scale.
    pub fn predict(&self, xq: &ArrayView2<f64>) -> Vec<Predictive> {
        let sf2 = self.hyper.log_sf2.exp();
        let sn2 = self.hyper.log_sn2.exp();
        let ks = se_cross(xq, &self.x.view(), &self.hyper);
        // One triangular solve against all queries: V = L^-1 Ks^T.
        let v = linalg::solve_lower_mat(&self.l.view(), &ks.t().to_owned().view());
        (0..xq.nrows())
            .map(|j| {
                let mean = ks.row(j).dot(&self.alpha);
                let col = v.index_axis(Axis(1), j);
                let latent = (sf2 - col.iter().map(|t| t * t).sum::<f64>()).max(0.0);
                Predictive {
                    mean: self.stats.inverse_mean(mean),
                    variance: self.stats.inverse_variance(latent + sn2),
                    latent_variance: self.stats.inverse_variance(latent),
                }
            })
            .collect()
    }
}

/// The GP baseline as a drop-in surrogate for the optimization loop:
/// either target-task data only ("plain") or every task's rows stacked into
/// one dataset, optionally distinguished by appended per-task context
/// vectors. Models the first signal.
pub struct GpSurrogate {
    stack_all_tasks: bool,
    contexts: Option<Vec<Vec<f64>>>,
    opts: LbfgsOptions,
    warm_hyper: Option<GpHyper>,
    state: Option<GpState>,
}

struct GpState {
    model: GpModel,
    target_context: Vec<f64>,
}

impl GpSurrogate {
    /// Target-task observations only.
    pub fn plain() -> Self {
        Self {
            stack_all_tasks: false,
            contexts: None,
            opts: LbfgsOptions { max_iters: 50, ..Default::default() },
            warm_hyper: None,
            state: None,
        }
    }

    /// All tasks' observations stacked into one training set.
    pub fn stacked() -> Self {
        Self { stack_all_tasks: true, ..Self::plain() }
    }

    /// Append per-task context vectors (aligned with the task list passed to
    /// `refit`, target included) to every input row.
    pub fn with_contexts(mut self, contexts: Vec<Vec<f64>>) -> Self {
        self.contexts = Some(contexts);
        self
    }

    pub fn model(&self) -> Option<&GpModel> {
        self.state.as_ref().map(|s| &s.model)
    }

    fn context_of(&self, idx: usize, tasks_len: usize) -> Result<Vec<f64>, BoError> {
        match &self.contexts {
            None => Ok(Vec::new()),
            Some(ctx) if ctx.len() == tasks_len => Ok(ctx[idx].clone()),
            Some(ctx) => Err(BoError::InvalidConfig(format!(
                "{} context vectors for {tasks_len} tasks",
                ctx.len()
            ))),
        }
    }
}

impl Surrogate for GpSurrogate {
    fn refit(&mut self, tasks: &[TaskHistory], target_idx: usize) -> Result<(), BoError> {
        if tasks.is_empty() || target_idx >= tasks.len() {
            return Err(BoError::InvalidConfig(format!(
                "target index {target_idx} with {} tasks",
                tasks.len()
            )));
        }
        let mut xs: Vec<Array2<f64>> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for (t, hist) in tasks.iter().enumerate() {
            if !self.stack_all_tasks && t != target_idx {
                continue;
            }
            if hist.is_empty() {
                continue;
            }
            let ctx = self.context_of(t, tasks.len())?;
            xs.push(augment_with_context(&hist.x.view(), &ctx));
            ys.extend(hist.signal(0).iter());
        }
        if xs.is_empty() {
            return Err(BoError::InvalidHistory(
                "gaussian process refit needs at least one observation".into(),
            ));
        }
        let views: Vec<_> = xs.iter().map(|x| x.view()).collect();
        let x = ndarray::concatenate(Axis(0), &views).expect("uniform widths");
        let y = Array1::from_vec(ys);
        let p = x.ncols();

        let init = self
            .warm_hyper
            .clone()
            .filter(|h| h.dims() == p)
            .unwrap_or_else(|| GpHyper::default_for(p));
        let model = match GpModel::fit(x.clone(), &y.view(), &init, &self.opts) {
            Ok(m) => m,
            // A stale warm start can sit on a numerical cliff of the grown
            // dataset; retry once from the default before giving up.
            Err(_) => GpModel::fit(x, &y.view(), &GpHyper::default_for(p), &self.opts)?,
        };
        self.warm_hyper = Some(model.hyper.clone());
        let target_context = self.context_of(target_idx, tasks.len())?;
        self.state = Some(GpState { model, target_context });
        Ok(())
    }

    fn predict(&self, x_enc: &ArrayView2<f64>) -> Result<Vec<Predictive>, BoError> {
        let st = self
            .state
            .as_ref()
            .ok_or_else(|| BoError::InvalidConfig("predict before refit".into()))?;
        let xq = augment_with_context(x_enc, &st.target_context);
        Ok(st.model.predict(&xq.view()))
    }

    fn ei_uses_noise(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ablr_core::blr::{fit_head, HeadParams};
    use ablr_core::{FeatureMap, RksFeatures};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn random_data(
        rng: &mut ChaCha20Rng,
        n: usize,
        p: usize,
    ) -> (Array2<f64>, Array1<f64>) {
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |_| rng.gen_range(-2.0..2.0));
        (x, y)
    }

    fn random_hyper(rng: &mut ChaCha20Rng, p: usize) -> GpHyper {
        GpHyper {
            log_sf2: rng.gen_range(-0.5..0.5),
            log_ell: (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            log_sn2: rng.gen_range(-3.0..-1.0),
        }
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(60);
        for _ in 0..4 {
            let (x, y) = random_data(&mut rng, 9, 2);
            let hyper = random_hyper(&mut rng, 2);
            let (_, grad) = gp_nll_grad(&x.view(), &y.view(), &hyper).unwrap();
            let h = 1e-5;
            let theta0 = hyper.pack();
            for k in 0..theta0.len() {
                let mut tp = theta0.clone();
                tp[k] += h;
                let mut tm = theta0.clone();
                tm[k] -= h;
                let up = gp_nll_grad(&x.view(), &y.view(), &GpHyper::unpack(2, &tp.view()))
                    .unwrap()
                    .0;
                let dn = gp_nll_grad(&x.view(), &y.view(), &GpHyper::unpack(2, &tm.view()))
                    .unwrap()
                    .0;
                let fd = (up - dn) / (2.0 * h);
                let diff = (grad[k] - fd).abs();
                let rel = diff / grad[k].abs().max(fd.abs()).max(1e-300);
                assert!(diff <= 1e-7 || rel <= 1e-5, "theta {k}: {} vs {fd}", grad[k]);
            }
        }
    }

    /// Plain Gauss-Jordan inversion, independent of the Cholesky pathway.
    fn dense_inverse(a: &Array2<f64>) -> Array2<f64> {
        let n = a.nrows();
        let mut m = a.clone();
        let mut inv = Array2::eye(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if m[[r, col]].abs() > m[[piv, col]].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for c in 0..n {
                    m.swap([col, c], [piv, c]);
                    inv.swap([col, c], [piv, c]);
                }
            }
            let d = m[[col, col]];
            for c in 0..n {
                m[[col, c]] /= d;
                inv[[col, c]] /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = m[[r, col]];
                    for c in 0..n {
                        m[[r, c]] -= f * m[[col, c]];
                        inv[[r, c]] -= f * inv[[col, c]];
                    }
                }
            }
        }
        inv
    }

    /// Cholesky-form predictions against the explicit-inverse textbook
    /// expressions `k*^T K^-1 y` and `k** - k*^T K^-1 k* + noise`.
    #[test]
    fn predictions_match_explicit_inverse_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(61);
        for case in 0..5 {
            let n = rng.gen_range(2..=40);
            let p = rng.gen_range(1..=3);
            let (x, y) = random_data(&mut rng, n, p);
            let hyper = random_hyper(&mut rng, p);
            let model =
                GpModel::with_fixed_hyper(x.clone(), &y.view(), hyper.clone()).unwrap();

            let sn2 = hyper.log_sn2.exp();
            let sf2 = hyper.log_sf2.exp();
            let mut k = se_kernel(&x.view(), &hyper);
            for i in 0..n {
                k[[i, i]] += sn2;
            }
            let kinv = dense_inverse(&k);

            let xq = Array2::from_shape_fn((7, p), |_| rng.gen_range(-1.2..1.2));
            let ks = se_cross(&xq.view(), &x.view(), &hyper);
            let preds = model.predict(&xq.view());
            for (j, pred) in preds.iter().enumerate() {
                let krow = ks.row(j).to_owned();
                let mean = krow.dot(&kinv.dot(&y));
                let var = sf2 - krow.dot(&kinv.dot(&krow)) + sn2;
                let m_tol = 1e-8 * mean.abs().max(1.0);
                let v_tol = 1e-8 * var.abs().max(1.0);
                assert!(
                    (pred.mean - mean).abs() <= m_tol,
                    "case {case} query {j}: mean {} vs oracle {mean}",
                    pred.mean
                );
                assert!(
                    (pred.variance - var).abs() <= v_tol,
                    "case {case} query {j}: var {} vs oracle {var}",
                    pred.variance
                );
            }
        }
    }

    #[test]
    fn single_point_interpolates_as_noise_vanishes() {
        let x = ndarray::array![[0.3, -0.7]];
        let y = ndarray::array![1.234];
        let hyper = GpHyper {
            log_sf2: 0.0,
            log_ell: vec![0.0, 0.0],
            log_sn2: (1e-10f64).ln(),
        };
        let model = GpModel::with_fixed_hyper(x.clone(), &y.view(), hyper).unwrap();
        let pred = &model.predict(&x.view())[0];
        assert_abs_diff_eq!(pred.mean, 1.234, epsilon = 1e-6);
        assert!(pred.latent_variance < 1e-6);
    }

    /// A GP with the exact RBF kernel and the finite kitchen-sink expansion
    /// of that kernel must agree closely once the expansion is wide enough:
    /// data drawn from the expansion itself, both models conditioned with
    /// matching noise and unit prior variance.
    #[test]
    fn rks_head_predictions_track_the_exact_kernel_gp() {
        let mut rng = ChaCha20Rng::seed_from_u64(62);
        let p = 2;
        let d = 5000;
        let sigma = 0.7f64;
        let noise_var = 0.01f64;

        let mut feats = RksFeatures::init(p, d, &mut rng);
        feats.log_sigma = sigma.ln();

        let n = 30;
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.0..1.0));
        let w = Array1::from_shape_fn(d, |_| rng.sample::<f64, _>(StandardNormal));
        let fmap = FeatureMap::Rks(feats);
        let phi = fmap.forward(&x.view());
        let noise = Array1::from_shape_fn(n, |_| {
            rng.sample::<f64, _>(StandardNormal) * noise_var.sqrt()
        });
        let y = phi.dot(&w) + noise;

        // Kitchen-sink side: fixed head with alpha = 1/noise, beta = 1.
        let params = HeadParams::new((1.0 / noise_var).ln(), 0.0);
        let head = fit_head(&phi.view(), &y.view(), params).unwrap();

        // Exact-kernel side: isotropic RBF with unit signal variance.
        let hyper = GpHyper {
            log_sf2: 0.0,
            log_ell: vec![sigma.ln(); p],
            log_sn2: noise_var.ln(),
        };
        let gp = GpModel::with_fixed_hyper(x.clone(), &y.view(), hyper).unwrap();

        let m = 40;
        let xq = Array2::from_shape_fn((m, p), |_| rng.gen_range(-1.0..1.0));
        let phi_q = fmap.forward(&xq.view());
        let gp_preds = gp.predict(&xq.view());
        let mut sq = 0.0;
        for j in 0..m {
            let rks_mean = head.predict(&phi_q.row(j)).mean;
            let diff = rks_mean - gp_preds[j].mean;
            sq += diff * diff;
        }
        let rms = (sq / m as f64).sqrt();
        assert!(rms <= 0.1, "kernel-approximation gap rms {rms}");
    }

    #[test]
    fn stacked_surrogate_uses_sibling_rows_and_contexts() {
        let mut rng = ChaCha20Rng::seed_from_u64(63);
        let mut sibling = TaskHistory::empty("warm", 1, 1);
        let mut target = TaskHistory::empty("target", 1, 1);
        for i in 0..12 {
            let z = ndarray::array![i as f64 / 11.0];
            sibling.push(&z.view(), &[(z[0] - 0.3).powi(2)]);
            if i < 3 {
                let zt = ndarray::array![rng.gen_range(0.0..1.0)];
                target.push(&zt.view(), &[(zt[0] - 0.5).powi(2)]);
            }
        }
        let tasks = vec![sibling, target];

        let mut plain = GpSurrogate::plain();
        plain.refit(&tasks, 1).unwrap();
        assert_eq!(plain.model().unwrap().num_observations(), 3);

        let mut stacked =
            GpSurrogate::stacked().with_contexts(vec![vec![0.3], vec![0.5]]);
        stacked.refit(&tasks, 1).unwrap();
        assert_eq!(stacked.model().unwrap().num_observations(), 15);

        // Stacked predictions exist and are finite over the box.
        let xq = Array2::from_shape_fn((5, 1), |(i, _)| i as f64 / 4.0);
        for p in stacked.predict(&xq.view()).unwrap() {
            assert!(p.mean.is_finite() && p.variance > 0.0);
        }
    }

    #[test]
    fn refit_without_any_observations_is_rejected() {
        let tasks = vec![TaskHistory::empty("t", 2, 1)];
        let mut gp = GpSurrogate::plain();
        assert!(gp.refit(&tasks, 0).is_err());
    }
}
