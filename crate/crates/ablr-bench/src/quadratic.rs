//! A parametrized family of 3-dimensional quadratic bowls used as cheap,
//! fully known black boxes: every member has a closed-form minimizer, so
//! simple regret is exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ablr_bo::{continuous, SearchSpace, TaskHistory};

/// Coefficient range for `a`, `b`, `c`.
pub const COEFF_LO: f64 = 0.1;
pub const COEFF_HI: f64 = 10.0;
/// All family members are optimized over `[BOX_LO, BOX_HI]^3`.
pub const BOX_LO: f64 = -10.0;
pub const BOX_HI: f64 = 10.0;
/// Input dimension of every family member.
pub const QUAD_DIM: usize = 3;

/// One task: `f(x) = a/2 ||x||^2 + b (x_1 + x_2 + x_3) + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTask {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticTask {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), QUAD_DIM);
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let sum: f64 = x.iter().sum();
        0.5 * self.a * sq + self.b * sum + self.c
    }

    /// The unique minimizer `-(b/a) * (1,1,1)`; inside the search box for
    /// every task [`sample_family`] produces.
    pub fn minimizer(&self) -> [f64; QUAD_DIM] {
        let m = -self.b / self.a;
        [m; QUAD_DIM]
    }

    /// The minimum value, `c - 3 b^2 / (2 a)`.
    pub fn minimum(&self) -> f64 {
        self.c - 3.0 * self.b * self.b / (2.0 * self.a)
    }

    /// Coefficients as a context vector for input augmentation.
    pub fn context(&self) -> Vec<f64> {
        vec![self.a, self.b, self.c]
    }
}

/// Free-function form of [`QuadraticTask::eval`].
pub fn quad_eval(task: &QuadraticTask, x: &[f64]) -> f64 {
    task.eval(x)
}

/// The common search box of the family.
pub fn quad_space() -> SearchSpace {
    SearchSpace::new(
        (0..QUAD_DIM)
            .map(|j| continuous(&format!("x{}", j + 1), BOX_LO, BOX_HI))
            .collect(),
    )
    .expect("static box is valid")
}

/// Draw `t` tasks with coefficients i.i.d. uniform on the coefficient box,
/// resampling any task whose minimizer `-(b/a)(1,1,1)` would leave the
/// search box (`|b/a| > 10`). Deterministic per seed.
pub fn sample_family(t: usize, seed: u64) -> Vec<QuadraticTask> {
    assert!(t >= 1, "a family needs at least one task");
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(t);
    while out.len() < t {
        let a = rng.gen_range(COEFF_LO..=COEFF_HI);
        let b = rng.gen_range(COEFF_LO..=COEFF_HI);
        let c = rng.gen_range(COEFF_LO..=COEFF_HI);
        if (b / a).abs() <= 10.0 {
            out.push(QuadraticTask { a, b, c });
        }
    }
    out
}

/// Evaluate `task` at `count` uniform random points from the box and return
/// the observations as a single-signal history in encoded coordinates.
pub fn warm_history(
    task: &QuadraticTask,
    task_id: &str,
    count: usize,
    space: &SearchSpace,
    rng: &mut ChaCha20Rng,
) -> TaskHistory {
    let mut hist = TaskHistory::empty(task_id, space.len(), 1);
    for _ in 0..count {
        let z = space.random_point(rng);
        let x = space.decode(&z.view());
        let y = task.eval(&x);
        hist.push(&z.view(), &[y]);
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    #[test]
    fn value_at_origin_is_the_offset() {
        let t = QuadraticTask { a: 3.3, b: 1.7, c: 4.2 };
        assert_abs_diff_eq!(t.eval(&[0.0, 0.0, 0.0]), 4.2, epsilon = 0.0);
    }

    #[test]
    fn pure_curvature_term_at_ones() {
        let t = QuadraticTask { a: 2.0, b: 0.0, c: 0.0 };
        assert_abs_diff_eq!(t.eval(&[1.0, 1.0, 1.0]), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_minimum_for_unit_coefficients() {
        let t = QuadraticTask { a: 1.0, b: 1.0, c: 1.0 };
        assert_abs_diff_eq!(t.minimum(), -0.5, epsilon = 1e-15);
        let m = t.minimizer();
        assert_eq!(m, [-1.0, -1.0, -1.0]);
        assert_abs_diff_eq!(t.eval(&m), t.minimum(), epsilon = 1e-15);
    }

    /// Derivative-free numerical minimization (coarse grid, then a shrinking
    /// pattern search) must land on the closed-form minimum.
    #[test]
    fn closed_form_minimum_matches_numerical_search() {
        for seed in 0..5u64 {
            let t = sample_family(1, 900 + seed)[0];
            // Coarse grid over the box.
            let mut best_x = [0.0; 3];
            let mut best = f64::INFINITY;
            let steps = 11;
            for i in 0..steps {
                for j in 0..steps {
                    for k in 0..steps {
                        let g = |n: usize| {
                            BOX_LO + (BOX_HI - BOX_LO) * n as f64 / (steps - 1) as f64
                        };
                        let x = [g(i), g(j), g(k)];
                        let v = t.eval(&x);
                        if v < best {
                            best = v;
                            best_x = x;
                        }
                    }
                }
            }
            // Local refinement: probe +-step per coordinate, shrink on
            // failure.
            let mut step = (BOX_HI - BOX_LO) / (steps - 1) as f64;
            while step > 1e-9 {
                let mut improved = false;
                for d in 0..3 {
                    for dir in [-1.0, 1.0] {
                        let mut x = best_x;
                        x[d] = (x[d] + dir * step).clamp(BOX_LO, BOX_HI);
                        let v = t.eval(&x);
                        if v < best {
                            best = v;
                            best_x = x;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            assert!(
                (best - t.minimum()).abs() <= 1e-6,
                "seed {seed}: numerical {best} vs analytic {}",
                t.minimum()
            );
        }
    }

    #[test]
    fn same_seed_reproduces_the_family() {
        assert_eq!(sample_family(30, 7), sample_family(30, 7));
        assert_ne!(sample_family(30, 7), sample_family(30, 8));
    }

    #[test]
    fn family_of_thirty_stays_in_coefficient_box_with_interior_minimizers() {
        let fam = sample_family(30, 123);
        assert_eq!(fam.len(), 30);
        for t in &fam {
            for v in [t.a, t.b, t.c] {
                assert!((COEFF_LO..=COEFF_HI).contains(&v));
            }
            assert!((t.b / t.a).abs() <= 10.0);
            let m = t.minimizer();
            assert!(m.iter().all(|v| (BOX_LO..=BOX_HI).contains(v)));
        }
    }

    #[test]
    fn coefficient_mean_matches_the_uniform_draw() {
        let fam = sample_family(3334, 42);
        let coeffs: Vec<f64> = fam.iter().flat_map(|t| [t.a, t.b, t.c]).collect();
        assert!(coeffs.len() >= 10_000);
        let mean = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
        // Uniform [0.1, 10] has mean 5.05; the minimizer-containment
        // rejection nudges it only slightly.
        assert!((mean - 5.05).abs() <= 0.1, "coefficient mean {mean}");
    }

    #[test]
    fn warm_history_replays_the_task() {
        let space = quad_space();
        let t = sample_family(1, 11)[0];
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let h = warm_history(&t, "t0", 10, &space, &mut rng);
        assert_eq!(h.len(), 10);
        for i in 0..h.len() {
            let x = space.decode(&h.x.row(i));
            assert_abs_diff_eq!(h.signal(0)[i], t.eval(&x), epsilon = 1e-12);
        }
    }
}
