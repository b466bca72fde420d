//! Multi-task Bayesian linear regression on a shared learned feature map.
//!
//! The surrogate family implemented here keeps one Bayesian linear head per
//! task on top of a feature map shared by all tasks (a small tanh network or
//! a random cosine expansion). Heads integrate their weights out in closed
//! form; the feature parameters and per-task noise/prior precisions are
//! trained jointly by L-BFGS on the summed negative log marginal likelihood.
//!
//! Module map:
//! - [`linalg`]: blocked Cholesky, triangular solves, jitter repair ladder.
//! - [`blr`]: one head's posterior, NLL, and predictive distribution.
//! - [`features`]: the two feature map families behind one interface.
//! - [`standardize`]: frozen input/response standardization.
//! - [`train`]: joint objective, reverse-mode gradients, L-BFGS driver.

pub mod blr;
pub mod error;
pub mod features;
pub mod linalg;
pub mod standardize;
pub mod train;

pub use blr::{fit_head, HeadParams, HeadPosterior, Predictive};
pub use error::CoreError;
pub use features::{FeatureMap, MlpFeatures, RksFeatures};
pub use standardize::{InputStandardizer, ResponseStandardizer};
pub use train::{
    fit_joint, head_posteriors, joint_nll, joint_nll_grad, FitReport, JointModel,
    LbfgsOptions, LbfgsReport, StopReason, TaskData,
};
