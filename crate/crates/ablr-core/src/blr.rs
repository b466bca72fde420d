//! Per-task Bayesian linear regression head on top of a feature map.
//!
//! Each task `t` models standardized responses as `y = Phi w + noise` with
//! `noise ~ N(0, alpha^{-1} I)` and prior `w ~ N(0, beta^{-1} I)`. Working in
//! feature space keeps every factorization at `D x D` regardless of how many
//! observations a task has: with `r = alpha / beta`,
//!
//! ```text
//! K = r * Phi^T Phi + I          (D x D, always >= I)
//! K = L L^T                      (lower Cholesky)
//! c = L^{-1} Phi^T y
//! ```
//!
//! are enough to evaluate the negative log marginal likelihood and the
//! predictive distribution at new points.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::CoreError;
use crate::linalg;

/// Precision hyperparameters of one head, kept on log scale so optimizers can
/// move through unconstrained space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadParams {
    /// log of alpha, the observation noise precision.
    pub log_alpha: f64,
    /// log of beta, the weight prior precision.
    pub log_beta: f64,
}

impl HeadParams {
    pub fn new(log_alpha: f64, log_beta: f64) -> Self {
        Self { log_alpha, log_beta }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn beta(&self) -> f64 {
        self.log_beta.exp()
    }

    /// alpha / beta, the signal-to-prior ratio that scales the Gram matrix.
    pub fn ratio(&self) -> f64 {
        (self.log_alpha - self.log_beta).exp()
    }
}

impl Default for HeadParams {
    fn default() -> Self {
        Self { log_alpha: 0.0, log_beta: 0.0 }
    }
}

impl HeadParams {
    /// Starting point for a fresh joint fit: low assumed noise and a loose
    /// weight prior. A neutral start (both precisions 1) sits next to a
    /// collapse attractor — the evidence explains everything as noise,
    /// shrinks the weights, and the feature gradient (proportional to
    /// alpha/beta) dies before the features can learn anything. Starting in
    /// the must-fit regime keeps that gradient alive.
    pub fn fresh() -> Self {
        Self { log_alpha: 2.0, log_beta: -2.0 }
    }
}

/// Mean and variance of the response at a single point.
#[derive(Debug, Clone, Copy)]
pub struct Predictive {
    pub mean: f64,
    /// Predictive variance including the observation noise floor `1/alpha`.
    pub variance: f64,
    /// Variance of the latent function only (no observation noise).
    pub latent_variance: f64,
}

/// Everything derived from one head's data at fixed hyperparameters: the
/// Cholesky factor of the regularized Gram matrix plus the projected targets.
#[derive(Debug, Clone)]
pub struct HeadPosterior {
    pub params: HeadParams,
    /// Lower Cholesky factor of `K = r * gram + I`.
    pub l: Array2<f64>,
    /// `L^{-1} Phi^T y`.
    pub c: Array1<f64>,
    /// Symmetrized `Phi^T Phi`, retained for hyperparameter gradients.
    pub gram: Array2<f64>,
    /// Diagonal shift the factorization needed (0.0 in the usual case).
    pub jitter: f64,
    /// Number of observations behind this posterior.
    pub n: usize,
    /// `||y||^2` for the quadratic NLL term.
    pub y_sq: f64,
}

/// `Phi^T Phi`, explicitly symmetrized so accumulated rounding cannot feed an
/// asymmetric matrix into the factorization.
pub fn build_gram(phi: &ArrayView2<f64>) -> Array2<f64> {
    let g = phi.t().dot(phi);
    let mut out = g.clone();
    out += &g.t();
    out *= 0.5;
    out
}

/// Factorize one head from precomputed data summaries.
///
/// Several heads over the same inputs (one per observed signal) share
/// `gram = sym(Phi^T Phi)`; only the projected targets `phi_t_y = Phi^T y`,
/// the response norm and the hyperparameters differ per head. This is the
/// workhorse behind [`fit_head`] and the joint objective, where sharing the
/// Gram matrix keeps the per-signal cost independent of the input count.
pub fn fit_head_parts(
    gram: &Array2<f64>,
    phi_t_y: Array1<f64>,
    y_sq: f64,
    n: usize,
    params: HeadParams,
) -> Result<HeadPosterior, CoreError> {
    if !gram.iter().all(|v| v.is_finite())
        || !phi_t_y.iter().all(|v| v.is_finite())
        || !y_sq.is_finite()
    {
        return Err(CoreError::NonFinite { context: "fit_head inputs" });
    }
    let d = gram.nrows();
    let r = params.ratio();
    let mut k = gram.mapv(|v| v * r);
    for i in 0..d {
        k[[i, i]] += 1.0;
    }
    let (l, jitter) = linalg::cholesky_jittered(&k.view())?;
    let c = linalg::solve_lower_vec(&l.view(), &phi_t_y.view());
    Ok(HeadPosterior { params, l, c, gram: gram.clone(), jitter, n, y_sq })
}

/// Factorize one head at the given hyperparameters.
///
/// `phi` is `N x D` (N may be 0), `y` has length N. Empty tasks produce the
/// prior: `L = I`, `c = 0`, and an NLL of exactly zero.
pub fn fit_head(
    phi: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    params: HeadParams,
) -> Result<HeadPosterior, CoreError> {
    let n = phi.nrows();
    if y.len() != n {
        return Err(CoreError::shape(
            "fit_head targets",
            format!("{n} responses"),
            format!("{}", y.len()),
        ));
    }
    let gram = build_gram(phi);
    let phi_t_y = phi.t().dot(y);
    let y_sq = y.iter().map(|v| v * v).sum();
    fit_head_parts(&gram, phi_t_y, y_sq, n, params)
}

impl HeadPosterior {
    /// Negative log marginal likelihood of this head's data, up to the
    /// parameter-free `(N/2) log(2 pi)` constant:
    ///
    /// ```text
    /// nll = -(N/2) log alpha + (alpha/2) ||y||^2
    ///       - (alpha^2 / (2 beta)) ||c||^2 + sum_i log L_ii
    /// ```
    pub fn nll(&self) -> f64 {
        let alpha = self.params.alpha();
        let r = self.params.ratio();
        let c_sq: f64 = self.c.iter().map(|v| v * v).sum();
        let log_det_half: f64 = self.l.diag().iter().map(|v| v.ln()).sum();
        -0.5 * self.n as f64 * self.params.log_alpha + 0.5 * alpha * self.y_sq
            - 0.5 * alpha * r * c_sq
            + log_det_half
    }

    /// Predictive distribution at one feature vector.
    pub fn predict(&self, phi_row: &ArrayView1<f64>) -> Predictive {
        let v = linalg::solve_lower_vec(&self.l.view(), phi_row);
        let r = self.params.ratio();
        let mean = r * self.c.dot(&v);
        let latent_variance = v.iter().map(|x| x * x).sum::<f64>() / self.params.beta();
        Predictive {
            mean,
            variance: latent_variance + 1.0 / self.params.alpha(),
            latent_variance,
        }
    }

    /// Predictive distributions for every row of `phi_star`.
    pub fn predict_batch(&self, phi_star: &ArrayView2<f64>) -> Vec<Predictive> {
        // One triangular solve against all rows at once: V = L^{-1} Phi*^T.
        let v = linalg::solve_lower_mat(&self.l.view(), &phi_star.t().to_owned().view());
        let r = self.params.ratio();
        let beta = self.params.beta();
        let noise = 1.0 / self.params.alpha();
        (0..phi_star.nrows())
            .map(|j| {
                let col = v.column(j);
                let mean = r * self.c.dot(&col);
                let latent_variance = col.iter().map(|x| x * x).sum::<f64>() / beta;
                Predictive { mean, variance: latent_variance + noise, latent_variance }
            })
            .collect()
    }

    /// Posterior mean of the weight vector, `r * L^{-T} c`.
    pub fn mean_weights(&self) -> Array1<f64> {
        let mut w = linalg::solve_lower_t_vec(&self.l.view(), &self.c.view());
        w *= self.params.ratio();
        w
    }
}
