//! Input and response standardization.
//!
//! Inputs are standardized per dimension with statistics frozen at fit time
//! (transfer runs reuse the statistics of the source data; plain runs on a
//! unit cube fall back to the analytic uniform moments). Responses are
//! standardized per task so heads with wildly different output scales share
//! one feature map without fighting over it.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

/// Smallest standard deviation we divide by; anything tighter is treated as
/// constant data.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-dimension affine map `x -> (x - mean) / std` with frozen statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputStandardizer {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

impl InputStandardizer {
    /// Fit column means and population standard deviations. With fewer than
    /// two rows the std is pinned at 1.0 (a single point carries no scale).
    pub fn fit(x: &ArrayView2<f64>) -> Self {
        let (n, p) = x.dim();
        let mut mean = Array1::zeros(p);
        let mut std = Array1::ones(p);
        if n == 0 {
            return Self { mean, std };
        }
        for j in 0..p {
            let col = x.column(j);
            let m = col.sum() / n as f64;
            mean[j] = m;
            if n >= 2 {
                let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
                std[j] = var.sqrt().max(STD_FLOOR);
            }
        }
        Self { mean, std }
    }

    /// Fit per-dimension scale only, leaving the mean shift at zero. The
    /// bias-free network map composes odd activations, so centering the
    /// inputs would restrict it to odd functions of the data mean; dividing
    /// by the spread normalizes saturation scales without introducing that
    /// symmetry.
    pub fn scale_only(x: &ArrayView2<f64>) -> Self {
        let mut s = Self::fit(x);
        s.mean.fill(0.0);
        s
    }

    /// Analytic moments of independent U[0,1] coordinates: mean 1/2 and
    /// std 1/sqrt(12). Used when no source data exists to estimate from.
    pub fn unit_cube(p: usize) -> Self {
        Self {
            mean: Array1::from_elem(p, 0.5),
            std: Array1::from_elem(p, 1.0 / 12.0f64.sqrt()),
        }
    }

    /// Scale-only counterpart of [`Self::unit_cube`]: divide by the U[0,1]
    /// spread, keep the offset.
    pub fn unit_cube_scale_only(p: usize) -> Self {
        Self {
            mean: Array1::zeros(p),
            std: Array1::from_elem(p, 1.0 / 12.0f64.sqrt()),
        }
    }

    /// The identity map (mean 0, std 1) in `p` dimensions.
    pub fn identity(p: usize) -> Self {
        Self { mean: Array1::zeros(p), std: Array1::ones(p) }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for j in 0..self.dim() {
            let m = self.mean[j];
            let s = self.std[j];
            out.column_mut(j).mapv_inplace(|v| (v - m) / s);
        }
        out
    }

    pub fn transform_row(&self, x: &ArrayView1<f64>) -> Array1<f64> {
        let mut out = x.to_owned();
        for j in 0..self.dim() {
            out[j] = (out[j] - self.mean[j]) / self.std[j];
        }
        out
    }
}

/// Per-task response map `y -> (y - mean) / std` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseStandardizer {
    pub mean: f64,
    pub std: f64,
}

impl ResponseStandardizer {
    /// Fit on one task's responses. Fewer than two observations give mean-only
    /// centering with std 1.0; otherwise the population std, floored.
    pub fn fit(y: &ArrayView1<f64>) -> Self {
        let n = y.len();
        if n == 0 {
            return Self { mean: 0.0, std: 1.0 };
        }
        let mean = y.sum() / n as f64;
        if n < 2 {
            return Self { mean, std: 1.0 };
        }
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        Self { mean, std: var.sqrt().max(STD_FLOOR) }
    }

    pub fn identity() -> Self {
        Self { mean: 0.0, std: 1.0 }
    }

    pub fn transform(&self, y: &ArrayView1<f64>) -> Array1<f64> {
        y.mapv(|v| (v - self.mean) / self.std)
    }

    /// Map a standardized-space mean back to the original response scale.
    pub fn inverse_mean(&self, m: f64) -> f64 {
        m * self.std + self.mean
    }

    /// Map a standardized-space variance back to the original response scale.
    pub fn inverse_variance(&self, v: f64) -> f64 {
        v * self.std * self.std
    }
}
