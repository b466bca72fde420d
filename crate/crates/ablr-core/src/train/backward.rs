//! Reverse-mode gradients through one head's marginal likelihood.
//!
//! The forward quantities are `K = r G + I`, `L = chol(K)`, `c = L^{-1} v`
//! with `v = Phi^T y` and `r = alpha / beta`. Everything here propagates the
//! NLL adjoint back through those steps to `d nll / d Phi` and the two log
//! precisions; the feature map then carries `d nll / d Phi` to its own
//! parameters.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::blr::HeadPosterior;
use crate::linalg;

/// Adjoint of the Cholesky factorization.
///
/// Given lower `L` with `K = L L^T` and the adjoint `l_bar` (meaningful on
/// the lower triangle only), returns the symmetric `k_bar` with
/// `d loss = <k_bar, dK>` over all entries of a symmetric perturbation `dK`:
///
/// ```text
/// k_bar = sym( L^{-T} copyltu_half(L^T l_bar) L^{-1} )
/// ```
///
/// where `copyltu_half` keeps the lower triangle and halves the diagonal.
pub fn cholesky_backward(l: &ArrayView2<f64>, l_bar: &ArrayView2<f64>) -> Array2<f64> {
    let d = l.nrows();
    let m = l.t().dot(l_bar);
    let mut p = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..i {
            p[[i, j]] = m[[i, j]];
        }
        p[[i, i]] = 0.5 * m[[i, i]];
    }
    let s1 = linalg::solve_lower_t_mat(l, &p.view());
    let s1_t = s1.t().to_owned();
    let s_t = linalg::solve_lower_t_mat(l, &s1_t.view());
    // s = s_t^T; return (s + s^T)/2 without materializing s separately.
    let mut out = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            out[[i, j]] = 0.5 * (s_t[[j, i]] + s_t[[i, j]]);
        }
    }
    out
}

/// Gradient contributions of a single head.
#[derive(Debug)]
pub struct HeadGradient {
    /// `d nll / d Phi`, shape `n x d`.
    pub phi_bar: Array2<f64>,
    /// `d nll / d log_alpha`.
    pub log_alpha: f64,
    /// `d nll / d log_beta`.
    pub log_beta: f64,
}

/// The head adjoint before it touches the feature matrix: everything needed
/// to assemble `d nll / d Phi` later as `2r * Phi k_bar + y u^T`.
///
/// Heads sharing one feature matrix (one per observed signal) can sum their
/// `2 r k_bar` terms and batch their `u` vectors so the `N x D` products and
/// the feature-map backward run once per task instead of once per head.
#[derive(Debug)]
pub struct HeadCoreGradient {
    /// Adjoint of the regularized Gram matrix `K = r G + I`, symmetric.
    pub k_bar: Array2<f64>,
    /// `L^{-T} c_bar`, the adjoint of the projected targets `Phi^T y`.
    pub u: Array1<f64>,
    /// `d nll / d log_alpha`.
    pub log_alpha: f64,
    /// `d nll / d log_beta`.
    pub log_beta: f64,
}

/// Backpropagate one head's NLL through the factorization, stopping at the
/// feature matrix (a head with zero observations yields exactly zero
/// precision gradients).
pub fn head_backward_core(head: &HeadPosterior) -> HeadCoreGradient {
    let alpha = head.params.alpha();
    let r = head.params.ratio();
    let d = head.l.nrows();

    // c enters the NLL as -(alpha r / 2) ||c||^2.
    let c_bar = head.c.mapv(|v| -alpha * r * v);
    // c = L^{-1} v  =>  v_bar = L^{-T} c_bar, L_bar -= u c^T (lower part).
    let u = linalg::solve_lower_t_vec(&head.l.view(), &c_bar.view());

    let mut l_bar = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            l_bar[[i, j]] = -u[i] * head.c[j];
        }
        // log det term: d(sum log L_ii)/dL_ii = 1/L_ii.
        l_bar[[i, i]] += 1.0 / head.l[[i, i]];
    }
    let k_bar = cholesky_backward(&head.l.view(), &l_bar.view());

    let c_sq: f64 = head.c.iter().map(|v| v * v).sum();
    // K = r G + I: r picks up <k_bar, G>; the explicit -(alpha r/2)||c||^2
    // term contributes the rest.
    let r_bar = (&k_bar * &head.gram).sum() - 0.5 * alpha * c_sq;
    let alpha_bar = 0.5 * head.y_sq - 0.5 * r * c_sq;

    let log_alpha = -0.5 * head.n as f64 + alpha * alpha_bar + r * r_bar;
    let log_beta = -r * r_bar;

    HeadCoreGradient { k_bar, u, log_alpha, log_beta }
}

/// Backpropagate one head's NLL to its feature matrix and log precisions.
pub fn head_backward(
    head: &HeadPosterior,
    phi: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
) -> HeadGradient {
    let core = head_backward_core(head);
    let r = head.params.ratio();

    // Phi appears in G = Phi^T Phi (gram path) and v = Phi^T y (data path).
    let mut phi_bar = phi.dot(&core.k_bar);
    phi_bar *= 2.0 * r;
    for (i, yi) in y.iter().enumerate() {
        let mut row = phi_bar.row_mut(i);
        for (p, uj) in row.iter_mut().zip(core.u.iter()) {
            *p += yi * uj;
        }
    }

    HeadGradient { phi_bar, log_alpha: core.log_alpha, log_beta: core.log_beta }
}
