//! Random kitchen-sink cosine features.
//!
//! `phi(x) = sqrt(2/D) * cos(x U^T / sigma + b)` with a frozen Gaussian
//! projection `U` and frozen phases `b ~ U[0, 2pi)`. In expectation the inner
//! product `phi(x) . phi(x')` approximates a squared-exponential kernel with
//! length-scale `sigma`; only `log sigma` is trained.

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, PartialEq)]
pub struct RksFeatures {
    /// Frozen projection, `d x p`.
    pub proj: Array2<f64>,
    /// Frozen phase offsets in `[0, 2pi)`, length `d`.
    pub phases: Array1<f64>,
    /// Trainable log length-scale.
    pub log_sigma: f64,
}

/// Cosine arguments `A = x U^T / sigma + b` saved for the backward pass.
#[derive(Debug, Clone)]
pub struct RksCache {
    arg: Array2<f64>,
}

impl RksFeatures {
    /// Draw the frozen projection (standard normal) and phases (uniform on
    /// `[0, 2pi)`); the length-scale starts at `sigma = 1`.
    pub fn init(input_dim: usize, d: usize, rng: &mut impl Rng) -> Self {
        assert!(input_dim > 0 && d > 0);
        let proj = Array2::from_shape_fn((d, input_dim), |_| rng.sample(StandardNormal));
        let phases = Array1::from_shape_fn(d, |_| rng.gen_range(0.0..std::f64::consts::TAU));
        Self { proj, phases, log_sigma: 0.0 }
    }

    pub fn input_dim(&self) -> usize {
        self.proj.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.proj.nrows()
    }

    fn scale(&self) -> f64 {
        (2.0 / self.output_dim() as f64).sqrt()
    }

    pub fn forward_cached(&self, x: &ArrayView2<f64>) -> (Array2<f64>, RksCache) {
        debug_assert_eq!(x.ncols(), self.input_dim());
        let inv_sigma = (-self.log_sigma).exp();
        let mut arg = x.dot(&self.proj.t());
        arg *= inv_sigma;
        arg += &self.phases;
        let scale = self.scale();
        let phi = arg.mapv(|a| scale * a.cos());
        (phi, RksCache { arg })
    }

    /// `d loss / d log_sigma` given `d loss / d phi`.
    ///
    /// With `A = x U^T / sigma + b`, `dA/d log_sigma = -(A - b)`, so each
    /// entry contributes `phi_bar * scale * sin(A) * (A - b)`.
    pub fn backward(&self, cache: &RksCache, phi_bar: &ArrayView2<f64>) -> f64 {
        let scale = self.scale();
        let mut g = 0.0;
        for (row_bar, row_arg) in phi_bar.rows().into_iter().zip(cache.arg.rows()) {
            for ((pb, a), b) in row_bar.iter().zip(row_arg.iter()).zip(self.phases.iter()) {
                g += pb * scale * a.sin() * (a - b);
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn forward_matches_scalar_reference_loop() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut feats = RksFeatures::init(3, 7, &mut rng);
        feats.log_sigma = 0.4;
        let x = Array2::from_shape_fn((5, 3), |_| rng.gen_range(-2.0..2.0));
        let (phi, _) = feats.forward_cached(&x.view());
        let scale = (2.0 / 7.0f64).sqrt();
        let sigma = 0.4f64.exp();
        for n in 0..5 {
            for j in 0..7 {
                let mut a = feats.phases[j];
                for p in 0..3 {
                    a += x[[n, p]] * feats.proj[[j, p]] / sigma;
                }
                assert_abs_diff_eq!(phi[[n, j]], scale * a.cos(), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn phases_are_in_range_and_projection_is_seeded() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let feats = RksFeatures::init(2, 64, &mut rng);
        assert!(feats
            .phases
            .iter()
            .all(|b| (0.0..std::f64::consts::TAU).contains(b)));
        let again = RksFeatures::init(2, 64, &mut ChaCha20Rng::seed_from_u64(3));
        assert_eq!(feats, again);
    }

    #[test]
    fn length_scale_gradient_matches_finite_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let mut feats = RksFeatures::init(4, 16, &mut rng);
        feats.log_sigma = -0.3;
        let x = Array2::from_shape_fn((9, 4), |_| rng.gen_range(-1.5..1.5));
        let coeff = Array2::from_shape_fn((9, 16), |_| rng.gen_range(-1.0..1.0));

        let (_, cache) = feats.forward_cached(&x.view());
        let analytic = feats.backward(&cache, &coeff.view());

        let h = 1e-6;
        let eval = |ls: f64, f: &mut RksFeatures| {
            f.log_sigma = ls;
            (&f.forward_cached(&x.view()).0 * &coeff).sum()
        };
        let up = eval(-0.3 + h, &mut feats);
        let dn = eval(-0.3 - h, &mut feats);
        let fd = (up - dn) / (2.0 * h);
        let diff = (analytic - fd).abs();
        let rel = diff / analytic.abs().max(fd.abs()).max(1e-300);
        assert!(diff <= 1e-7 || rel <= 1e-4, "analytic {analytic} vs fd {fd}");
    }

    #[test]
    fn kernel_approximation_improves_with_width() {
        // phi(x).phi(x') should approach exp(-||x-x'||^2 / (2 sigma^2)).
        let x = ndarray::array![[0.3, -0.7], [0.1, 0.4]];
        let exact = {
            let d2: f64 = (0.3f64 - 0.1).powi(2) + (-0.7f64 - 0.4).powi(2);
            (-d2 / 2.0).exp()
        };
        let approx_err = |d: usize| {
            let mut rng = ChaCha20Rng::seed_from_u64(777);
            let feats = RksFeatures::init(2, d, &mut rng);
            let (phi, _) = feats.forward_cached(&x.view());
            let k01: f64 = phi.row(0).dot(&phi.row(1));
            (k01 - exact).abs()
        };
        assert!(approx_err(16384) < approx_err(64));
        assert!(approx_err(16384) < 0.02);
    }
}
