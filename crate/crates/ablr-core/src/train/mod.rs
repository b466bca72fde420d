//! Joint training of the shared feature map and all task heads.
//!
//! The objective is the sum of per-head negative log marginal likelihoods;
//! every head owns its two log precisions while the feature parameters are
//! shared. A task carries one response column per observed signal, and all
//! of a task's heads reuse a single feature forward pass, Gram matrix and
//! feature-map backward pass, so extra signals cost only the head-sized
//! (feature-dimension cubed) work. The flat parameter layout is
//!
//! ```text
//! [ feature params..., la_0, lb_0, la_1, lb_1, ... ]
//! ```
//!
//! with `la_k = log alpha_k` and `lb_k = log beta_k`, heads ordered task by
//! task and signal by signal within a task.

pub mod backward;
pub mod lbfgs;

use ndarray::{s, Array1, Array2, ArrayView1, Axis};

use crate::blr::{fit_head_parts, HeadParams, HeadPosterior};
use crate::error::CoreError;
use crate::features::FeatureMap;
pub use lbfgs::{LbfgsOptions, LbfgsReport, StopReason};

/// One task's observations in model space (inputs already standardized, the
/// responses too). `ys` holds one column per signal over identical inputs;
/// rows may be empty for a task with no data yet.
#[derive(Debug, Clone)]
pub struct TaskData {
    pub x: Array2<f64>,
    pub ys: Array2<f64>,
}

impl TaskData {
    pub fn new(x: Array2<f64>, ys: Array2<f64>) -> Result<Self, CoreError> {
        if x.nrows() != ys.nrows() {
            return Err(CoreError::shape(
                "task data",
                format!("{} response rows", x.nrows()),
                format!("{}", ys.nrows()),
            ));
        }
        if ys.ncols() == 0 {
            return Err(CoreError::shape("task data", "at least one signal", "0"));
        }
        Ok(Self { x, ys })
    }

    /// A task observing a single signal.
    pub fn single(x: Array2<f64>, y: Array1<f64>) -> Result<Self, CoreError> {
        let ys = y.insert_axis(Axis(1));
        Self::new(x, ys)
    }

    /// A task with no observations yet (single signal).
    pub fn empty(p: usize) -> Self {
        Self { x: Array2::zeros((0, p)), ys: Array2::zeros((0, 1)) }
    }

    /// Number of signals (response columns), hence heads, this task owns.
    pub fn signals(&self) -> usize {
        self.ys.ncols()
    }
}

/// Total number of heads a task list requires.
pub fn total_heads(tasks: &[TaskData]) -> usize {
    tasks.iter().map(TaskData::signals).sum()
}

/// Shared feature map plus one pair of log precisions per task.
#[derive(Debug, Clone)]
pub struct JointModel {
    pub features: FeatureMap,
    pub heads: Vec<HeadParams>,
}

impl JointModel {
    pub fn new(features: FeatureMap, num_heads: usize) -> Self {
        Self { features, heads: vec![HeadParams::fresh(); num_heads] }
    }

    pub fn num_params(&self) -> usize {
        self.features.num_params() + 2 * self.heads.len()
    }

    pub fn pack(&self) -> Array1<f64> {
        let nf = self.features.num_params();
        let mut out = Array1::zeros(self.num_params());
        out.slice_mut(s![..nf]).assign(&self.features.params());
        for (t, h) in self.heads.iter().enumerate() {
            out[nf + 2 * t] = h.log_alpha;
            out[nf + 2 * t + 1] = h.log_beta;
        }
        out
    }

    pub fn unpack(&mut self, theta: &ArrayView1<f64>) -> Result<(), CoreError> {
        if theta.len() != self.num_params() {
            return Err(CoreError::shape(
                "joint parameters",
                format!("{}", self.num_params()),
                format!("{}", theta.len()),
            ));
        }
        let nf = self.features.num_params();
        self.features.set_params(&theta.slice(s![..nf]))?;
        for (t, h) in self.heads.iter_mut().enumerate() {
            h.log_alpha = theta[nf + 2 * t];
            h.log_beta = theta[nf + 2 * t + 1];
        }
        Ok(())
    }
}

fn check_arity(model: &JointModel, tasks: &[TaskData]) -> Result<(), CoreError> {
    let needed = total_heads(tasks);
    if needed != model.heads.len() {
        return Err(CoreError::shape(
            "joint objective",
            format!("{} heads", model.heads.len()),
            format!("{needed}"),
        ));
    }
    for t in tasks {
        if t.x.ncols() != model.features.input_dim() {
            return Err(CoreError::shape(
                "task inputs",
                format!("{} columns", model.features.input_dim()),
                format!("{}", t.x.ncols()),
            ));
        }
    }
    Ok(())
}

/// Data summaries shared by all of one task's heads.
fn task_summaries(phi: &Array2<f64>, task: &TaskData) -> (Array2<f64>, Array2<f64>) {
    let gram = crate::blr::build_gram(&phi.view());
    // Phi^T Y in one product: column s is the projected targets of signal s.
    let vty = phi.t().dot(&task.ys);
    (gram, vty)
}

/// Summed NLL over all heads at the model's current parameters.
pub fn joint_nll(model: &JointModel, tasks: &[TaskData]) -> Result<f64, CoreError> {
    check_arity(model, tasks)?;
    let mut total = 0.0;
    let mut k = 0usize;
    for task in tasks {
        let phi = model.features.forward(&task.x.view());
        let (gram, vty) = task_summaries(&phi, task);
        for sig in 0..task.signals() {
            let y = task.ys.column(sig);
            let y_sq = y.iter().map(|v| v * v).sum();
            let head = fit_head_parts(
                &gram,
                vty.column(sig).to_owned(),
                y_sq,
                task.x.nrows(),
                model.heads[k],
            )?;
            total += head.nll();
            k += 1;
        }
    }
    Ok(total)
}

/// Summed NLL and its gradient in [`JointModel::pack`] layout.
///
/// Each task runs the feature map forward and backward exactly once: the
/// per-head adjoints are assembled into a single feature-matrix adjoint
/// `Phi_bar = Phi (sum_s 2 r_s Kbar_s) + Y U^T` before backpropagation, so
/// signals beyond the first add only head-sized work.
pub fn joint_nll_grad(
    model: &JointModel,
    tasks: &[TaskData],
) -> Result<(f64, Array1<f64>), CoreError> {
    check_arity(model, tasks)?;
    let nf = model.features.num_params();
    let mut grad = Array1::zeros(model.num_params());
    let mut feat_grad = Array1::zeros(nf);
    let mut total = 0.0;
    let mut k = 0usize;
    for task in tasks {
        let (phi, cache) = model.features.forward_cached(&task.x.view());
        let (gram, vty) = task_summaries(&phi, task);
        let d = phi.ncols();
        let s_count = task.signals();
        // Accumulators for the task-level feature adjoint.
        let mut m = Array2::<f64>::zeros((d, d));
        let mut u_mat = Array2::<f64>::zeros((d, s_count));
        for sig in 0..s_count {
            let y = task.ys.column(sig);
            let y_sq = y.iter().map(|v| v * v).sum();
            let head = fit_head_parts(
                &gram,
                vty.column(sig).to_owned(),
                y_sq,
                task.x.nrows(),
                model.heads[k],
            )?;
            total += head.nll();
            let core = backward::head_backward_core(&head);
            grad[nf + 2 * k] = core.log_alpha;
            grad[nf + 2 * k + 1] = core.log_beta;
            m.scaled_add(2.0 * head.params.ratio(), &core.k_bar);
            u_mat.column_mut(sig).assign(&core.u);
            k += 1;
        }
        // Phi appears in every head's Gram path (2 r Phi Kbar) and data
        // path (y u^T); both collapse into two task-level products.
        let mut phi_bar = phi.dot(&m);
        phi_bar += &task.ys.dot(&u_mat.t());
        feat_grad += &model.features.backward(&cache, &phi_bar.view());
    }
    grad.slice_mut(s![..nf]).assign(&feat_grad);
    Ok((total, grad))
}

/// Posterior factors for every head at the model's current parameters, ready
/// for prediction. Order matches the head layout: task by task, signal by
/// signal within a task.
pub fn head_posteriors(
    model: &JointModel,
    tasks: &[TaskData],
) -> Result<Vec<HeadPosterior>, CoreError> {
    check_arity(model, tasks)?;
    let mut out = Vec::with_capacity(model.heads.len());
    let mut k = 0usize;
    for task in tasks {
        let phi = model.features.forward(&task.x.view());
        let (gram, vty) = task_summaries(&phi, task);
        for sig in 0..task.signals() {
            let y = task.ys.column(sig);
            let y_sq = y.iter().map(|v| v * v).sum();
            out.push(fit_head_parts(
                &gram,
                vty.column(sig).to_owned(),
                y_sq,
                task.x.nrows(),
                model.heads[k],
            )?);
            k += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub initial_nll: f64,
    pub final_nll: f64,
    pub opt: LbfgsReport,
}

/// Numerical guard box for the per-head log precisions. Outside this range
/// the precision ratio overwhelms the unit shift in the regularized Gram
/// matrix at double precision, so such steps are rejected during the line
/// search rather than silently corrupting the factorization.
pub const HEAD_LOG_BOUND: f64 = 12.0;

fn heads_in_bounds(model: &JointModel) -> bool {
    model
        .heads
        .iter()
        .all(|h| h.log_alpha.abs() <= HEAD_LOG_BOUND && h.log_beta.abs() <= HEAD_LOG_BOUND)
}

/// Fit feature map and head precisions jointly by minimizing the summed NLL.
///
/// Evaluation failures inside the search (factorization trouble, non-finite
/// intermediate values, precisions escaping the numerical guard box) count
/// as rejected line-search steps; only an unevaluable starting point is an
/// error. Starting precisions are clamped into the guard box. The model is
/// left at the best parameters found.
pub fn fit_joint(
    model: &mut JointModel,
    tasks: &[TaskData],
    opts: &LbfgsOptions,
) -> Result<FitReport, CoreError> {
    check_arity(model, tasks)?;
    for h in &mut model.heads {
        h.log_alpha = h.log_alpha.clamp(-HEAD_LOG_BOUND, HEAD_LOG_BOUND);
        h.log_beta = h.log_beta.clamp(-HEAD_LOG_BOUND, HEAD_LOG_BOUND);
    }
    let initial_nll = joint_nll(model, tasks)?;
    let x0 = model.pack();
    let mut scratch = model.clone();
    let eval = |theta: &ArrayView1<f64>| -> Option<(f64, Array1<f64>)> {
        scratch.unpack(theta).ok()?;
        if !heads_in_bounds(&scratch) {
            return None;
        }
        joint_nll_grad(&scratch, tasks).ok()
    };
    let (theta, opt) = lbfgs::minimize(eval, &x0.view(), opts)?;
    model.unpack(&theta.view())?;
    Ok(FitReport { initial_nll, final_nll: opt.objective, opt })
}
