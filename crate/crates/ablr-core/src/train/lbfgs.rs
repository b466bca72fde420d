//! Limited-memory BFGS with a strong Wolfe line search.
//!
//! The objective callback returns `None` for points it cannot evaluate
//! (non-finite values, factorization failures past the jitter ladder); the
//! line search treats those as rejected steps and backtracks, so a ridge of
//! bad hyperparameters does not kill a whole fit.

use ndarray::{Array1, ArrayView1};
use std::collections::VecDeque;

use crate::error::CoreError;

#[derive(Debug, Clone)]
pub struct LbfgsOptions {
    /// Number of curvature pairs kept for the two-loop recursion.
    pub memory: usize,
    pub max_iters: usize,
    /// Stop when the Euclidean gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when the relative objective decrease falls below this.
    pub obj_rel_tol: f64,
    /// Armijo (sufficient decrease) constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iters: 500,
            grad_tol: 1e-6,
            obj_rel_tol: 1e-9,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Gradient norm under `grad_tol`.
    GradientNorm,
    /// Relative objective decrease under `obj_rel_tol`.
    ObjectiveStall,
    IterationLimit,
    /// No acceptable step found; the best point seen so far is returned.
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct LbfgsReport {
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Objective/gradient evaluations, line search included.
    pub evaluations: usize,
    pub converged: bool,
    pub stop: StopReason,
}

fn l2(v: &Array1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Pair {
    s: Array1<f64>,
    y: Array1<f64>,
    rho: f64,
}

/// `-H g` from the two-loop recursion over stored curvature pairs; the
/// initial Hessian is `gamma I` with `gamma = s.y / y.y` of the latest pair.
fn search_direction(g: &Array1<f64>, hist: &VecDeque<Pair>) -> Array1<f64> {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(hist.len());
    for p in hist.iter().rev() {
        let a = p.rho * p.s.dot(&q);
        q.zip_mut_with(&p.y, |qi, yi| *qi -= a * yi);
        alphas.push(a);
    }
    let gamma = hist
        .back()
        .map(|p| p.s.dot(&p.y) / p.y.dot(&p.y))
        .unwrap_or(1.0);
    q *= gamma;
    for (p, a) in hist.iter().zip(alphas.iter().rev()) {
        let b = p.rho * p.y.dot(&q);
        let corr = a - b;
        q.zip_mut_with(&p.s, |qi, si| *qi += corr * si);
    }
    -q
}

struct LineSearchResult {
    step: f64,
    f: f64,
    g: Array1<f64>,
}

/// Strong Wolfe line search (bracket then zoom, quadratic interpolation with
/// bisection safeguards). Returns `None` when no acceptable step exists
/// within the evaluation budget.
#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    eval: &mut F,
    evals: &mut usize,
    x: &Array1<f64>,
    d: &Array1<f64>,
    f0: f64,
    dphi0: f64,
    c1: f64,
    c2: f64,
) -> Option<LineSearchResult>
where
    F: FnMut(&ArrayView1<f64>) -> Option<(f64, Array1<f64>)>,
{
    debug_assert!(dphi0 < 0.0);
    let probe = |a: f64, eval: &mut F, evals: &mut usize| {
        *evals += 1;
        let xa = x + &(d * a);
        eval(&xa.view()).filter(|(f, _)| f.is_finite())
    };

    let mut a_prev = 0.0;
    let mut f_prev = f0;
    let mut dphi_prev = dphi0;
    let mut a = 1.0;
    let mut first = true;
    for _ in 0..30 {
        let Some((fa, ga)) = probe(a, eval, evals) else {
            // Unevaluable: fall halfway back toward the last good point.
            a = 0.5 * (a_prev + a);
            if a - a_prev < 1e-16 {
                return None;
            }
            continue;
        };
        if fa > f0 + c1 * a * dphi0 || (!first && fa >= f_prev) {
            return zoom(
                eval, evals, x, d, f0, dphi0, c1, c2, a_prev, f_prev, dphi_prev, a, fa,
            );
        }
        let dphia = ga.dot(d);
        if dphia.abs() <= -c2 * dphi0 {
            return Some(LineSearchResult { step: a, f: fa, g: ga });
        }
        if dphia >= 0.0 {
            return zoom(eval, evals, x, d, f0, dphi0, c1, c2, a, fa, dphia, a_prev, f_prev);
        }
        a_prev = a;
        f_prev = fa;
        dphi_prev = dphia;
        a *= 2.0;
        first = false;
        if a > 1e6 {
            return Some(LineSearchResult { step: a_prev, f: f_prev, g: ga });
        }
    }
    None
}

/// Narrow `[lo, hi]` (unordered) until a strong Wolfe point appears.
#[allow(clippy::too_many_arguments)]
fn zoom<F>(
    eval: &mut F,
    evals: &mut usize,
    x: &Array1<f64>,
    d: &Array1<f64>,
    f0: f64,
    dphi0: f64,
    c1: f64,
    c2: f64,
    mut lo: f64,
    mut f_lo: f64,
    mut dphi_lo: f64,
    mut hi: f64,
    mut f_hi: f64,
) -> Option<LineSearchResult>
where
    F: FnMut(&ArrayView1<f64>) -> Option<(f64, Array1<f64>)>,
{
    for _ in 0..40 {
        let width = (hi - lo).abs();
        if width <= 1e-16 * lo.abs().max(1.0) {
            return None;
        }
        // Quadratic model through (lo, f_lo, dphi_lo) and (hi, f_hi);
        // bisect when the model minimum is unusable.
        let delta = hi - lo;
        let curv = f_hi - f_lo - dphi_lo * delta;
        let mut a = if curv.abs() > 1e-300 {
            lo - 0.5 * dphi_lo * delta * delta / curv
        } else {
            lo + 0.5 * delta
        };
        let lo_b = lo.min(hi) + 0.1 * width;
        let hi_b = lo.max(hi) - 0.1 * width;
        if !(lo_b..=hi_b).contains(&a) {
            a = lo + 0.5 * delta;
        }

        *evals += 1;
        let xa = x + &(d * a);
        let Some((fa, ga)) = eval(&xa.view()).filter(|(f, _)| f.is_finite()) else {
            // lo is always evaluable; shrink toward it.
            hi = a;
            f_hi = f64::INFINITY;
            continue;
        };
        if fa > f0 + c1 * a * dphi0 || fa >= f_lo {
            hi = a;
            f_hi = fa;
        } else {
            let dphia = ga.dot(d);
            if dphia.abs() <= -c2 * dphi0 {
                return Some(LineSearchResult { step: a, f: fa, g: ga });
            }
            if dphia * (hi - lo) >= 0.0 {
                hi = lo;
                f_hi = f_lo;
            }
            lo = a;
            f_lo = fa;
            dphi_lo = dphia;
        }
    }
    None
}

/// Minimize `eval` starting from `x0`.
///
/// Errors only when the initial point itself cannot be evaluated. All later
/// trouble (line search dead ends, iteration caps) is reported through
/// [`LbfgsReport`] with `converged = false` and the best-seen point returned.
pub fn minimize<F>(
    mut eval: F,
    x0: &ArrayView1<f64>,
    opts: &LbfgsOptions,
) -> Result<(Array1<f64>, LbfgsReport), CoreError>
where
    F: FnMut(&ArrayView1<f64>) -> Option<(f64, Array1<f64>)>,
{
    let mut evals = 0usize;
    evals += 1;
    let (mut fx, mut gx) = eval(x0)
        .filter(|(f, _)| f.is_finite())
        .ok_or(CoreError::NonFinite { context: "objective at the initial point" })?;
    let mut x = x0.to_owned();
    let mut hist: VecDeque<Pair> = VecDeque::new();

    let mut iterations = 0usize;
    let (converged, stop) = loop {
        let gnorm = l2(&gx);
        if gnorm <= opts.grad_tol {
            break (true, StopReason::GradientNorm);
        }
        if iterations >= opts.max_iters {
            break (false, StopReason::IterationLimit);
        }
        iterations += 1;

        let mut d = search_direction(&gx, &hist);
        let mut dphi0 = d.dot(&gx);
        if !(dphi0 < 0.0) {
            // Stale curvature produced a non-descent direction: restart.
            hist.clear();
            d = -&gx;
            dphi0 = d.dot(&gx);
        }

        let Some(res) =
            line_search(&mut eval, &mut evals, &x, &d, fx, dphi0, opts.c1, opts.c2)
        else {
            break (false, StopReason::LineSearchFailed);
        };

        let s = &d * res.step;
        let y: Array1<f64> = &res.g - &gx;
        let sy = s.dot(&y);
        if sy > 1e-10 * l2(&s) * l2(&y) {
            if hist.len() == opts.memory {
                hist.pop_front();
            }
            hist.push_back(Pair { rho: 1.0 / sy, s, y });
        }

        let decrease = fx - res.f;
        let rel = decrease / fx.abs().max(res.f.abs()).max(1.0);
        x.zip_mut_with(&d, |xi, di| *xi += res.step * di);
        fx = res.f;
        gx = res.g;
        if rel.abs() <= opts.obj_rel_tol {
            break (true, StopReason::ObjectiveStall);
        }
    };

    let report = LbfgsReport {
        objective: fx,
        grad_norm: l2(&gx),
        iterations,
        evaluations: evals,
        converged,
        stop,
    };
    Ok((x, report))
}
