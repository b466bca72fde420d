//! Expected improvement for minimization.

use ablr_core::Predictive;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_TAU: f64 = 0.3989422804014327; // 1/sqrt(2 pi)

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal PDF.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() * INV_SQRT_TAU
}

/// Expected improvement of a Gaussian belief `N(mean, s^2)` below the
/// incumbent: `E[max(incumbent - Y, 0)] = s * (g CDF(g) + PDF(g))` with
/// `g = (incumbent - mean)/s`. Degenerate beliefs (`s < 1e-12`) collapse to
/// the deterministic improvement `max(incumbent - mean, 0)`.
pub fn expected_improvement(mean: f64, s: f64, incumbent: f64) -> f64 {
    debug_assert!(incumbent.is_finite());
    if s < 1e-12 {
        return (incumbent - mean).max(0.0);
    }
    let g = (incumbent - mean) / s;
    let ei = s * (g * normal_cdf(g) + normal_pdf(g));
    ei.max(0.0)
}

/// EI evaluated on a predictive distribution, choosing between latent-only
/// and noise-inclusive variance.
pub fn ei_of_prediction(pred: &Predictive, incumbent: f64, use_noise: bool) -> f64 {
    let var = if use_noise { pred.variance } else { pred.latent_variance };
    expected_improvement(pred.mean, var.max(0.0).sqrt(), incumbent)
}
