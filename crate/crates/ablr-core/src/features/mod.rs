//! Learned feature maps shared by every task head.
//!
//! Two families are supported: a small tanh network trained end to end
//! ([`mlp::MlpFeatures`]) and a random kitchen-sink cosine expansion whose
//! only trainable parameter is the kernel length-scale ([`rks::RksFeatures`]).
//! Both expose a flat parameter vector (pack/unpack is a bit-exact bijection)
//! and reverse-mode products so the joint trainer can treat them uniformly.

pub mod mlp;
pub mod rks;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::CoreError;
pub use mlp::{MlpCache, MlpFeatures};
pub use rks::{RksCache, RksFeatures};

/// A feature map `x -> phi(x)` with trainable parameters.
#[derive(Debug, Clone)]
pub enum FeatureMap {
    Mlp(MlpFeatures),
    Rks(RksFeatures),
}

/// Intermediate state saved by [`FeatureMap::forward_cached`] so the backward
/// pass does not recompute activations.
#[derive(Debug, Clone)]
pub enum FeatureCache {
    Mlp(MlpCache),
    Rks(RksCache),
}

impl FeatureMap {
    pub fn input_dim(&self) -> usize {
        match self {
            FeatureMap::Mlp(m) => m.input_dim(),
            FeatureMap::Rks(r) => r.input_dim(),
        }
    }

    /// Width `D` of the produced feature vectors.
    pub fn output_dim(&self) -> usize {
        match self {
            FeatureMap::Mlp(m) => m.output_dim(),
            FeatureMap::Rks(r) => r.output_dim(),
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            FeatureMap::Mlp(m) => m.num_params(),
            FeatureMap::Rks(_) => 1,
        }
    }

    /// Flatten the trainable parameters into one vector.
    pub fn params(&self) -> Array1<f64> {
        match self {
            FeatureMap::Mlp(m) => m.pack(),
            FeatureMap::Rks(r) => Array1::from_elem(1, r.log_sigma),
        }
    }

    /// Overwrite the trainable parameters from a flat vector.
    pub fn set_params(&mut self, theta: &ArrayView1<f64>) -> Result<(), CoreError> {
        if theta.len() != self.num_params() {
            return Err(CoreError::shape(
                "feature parameters",
                format!("{}", self.num_params()),
                format!("{}", theta.len()),
            ));
        }
        match self {
            FeatureMap::Mlp(m) => m.unpack(theta),
            FeatureMap::Rks(r) => r.log_sigma = theta[0],
        }
        Ok(())
    }

    /// Map `n x p` inputs to `n x d` features.
    pub fn forward(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        self.forward_cached(x).0
    }

    /// Forward pass that also returns the cache needed by [`Self::backward`].
    pub fn forward_cached(&self, x: &ArrayView2<f64>) -> (Array2<f64>, FeatureCache) {
        match self {
            FeatureMap::Mlp(m) => {
                let (phi, cache) = m.forward_cached(x);
                (phi, FeatureCache::Mlp(cache))
            }
            FeatureMap::Rks(r) => {
                let (phi, cache) = r.forward_cached(x);
                (phi, FeatureCache::Rks(cache))
            }
        }
    }

    /// Reverse-mode product: given `d loss / d phi`, return `d loss / d theta`
    /// in the same layout as [`Self::params`].
    pub fn backward(&self, cache: &FeatureCache, phi_bar: &ArrayView2<f64>) -> Array1<f64> {
        match (self, cache) {
            (FeatureMap::Mlp(m), FeatureCache::Mlp(c)) => m.backward(c, phi_bar),
            (FeatureMap::Rks(r), FeatureCache::Rks(c)) => {
                Array1::from_elem(1, r.backward(c, phi_bar))
            }
            _ => panic!("feature cache does not match feature map variant"),
        }
    }
}
