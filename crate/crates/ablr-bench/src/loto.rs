//! Leave-one-task-out transfer benchmark on the synthetic quadratic family:
//! every method optimizes one held-out task while the remaining siblings
//! supply warm-start observations, and seeds rotate which task is held out.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use ablr_bo::{
    run_bo, AblrSurrogate, BoTrace, FeatureKind, RunSettings, SurrogateSettings, TaskHistory,
};

use crate::error::BenchError;
use crate::gp::GpSurrogate;
use crate::quadratic::{quad_space, sample_family, warm_history, QuadraticTask};
use crate::results::ResultRow;
use crate::stats::{mean, quantile};

/// The compared optimizers. "Context" variants append the task coefficient
/// vector to every input; "transfer" variants see the sibling histories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GpPlain,
    GpTransferContext,
    AblrPlain,
    AblrNnTransfer,
    AblrNnTransferContext,
    AblrRksTransfer,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::GpPlain,
        Method::GpTransferContext,
        Method::AblrPlain,
        Method::AblrNnTransfer,
        Method::AblrNnTransferContext,
        Method::AblrRksTransfer,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::GpPlain => "gp-plain",
            Method::GpTransferContext => "gp-transfer-context",
            Method::AblrPlain => "ablr-plain",
            Method::AblrNnTransfer => "ablr-nn-transfer",
            Method::AblrNnTransferContext => "ablr-nn-transfer-context",
            Method::AblrRksTransfer => "ablr-rks-transfer",
        }
    }

    /// Whether the method consumes sibling histories.
    pub fn uses_transfer(self) -> bool {
        !matches!(self, Method::GpPlain | Method::AblrPlain)
    }

    /// Whether the method appends task coefficients to its inputs.
    pub fn uses_context(self) -> bool {
        matches!(
            self,
            Method::GpTransferContext | Method::AblrNnTransferContext
        )
    }
}

/// Benchmark shape: family size, warm-start budget, run length, seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LotoConfig {
    /// Number of quadratic tasks in the family.
    pub tasks: usize,
    /// Warm observations drawn on each sibling task.
    pub warm_per_task: usize,
    /// Evaluations spent on the held-out task.
    pub iterations: usize,
    /// Every seed runs the full held-out rotation: one optimization run per
    /// (seed, task) pair.
    pub seeds: Vec<u64>,
    /// Seed generating the task family itself.
    pub family_seed: u64,
    pub methods: Vec<Method>,
    /// Hidden layer widths for the network feature map.
    pub mlp_hidden: Vec<usize>,
    /// Feature count for the random-kitchen-sinks map.
    pub rks_dim: usize,
    /// Optimizer-iteration cap for warm-started surrogate refits.
    pub warm_refit_iters: usize,
    /// Optimizer-iteration cap for fresh surrogate fits.
    pub fresh_refit_iters: usize,
    /// Low-discrepancy candidates scanned per proposal.
    pub candidate_count: usize,
    pub record_timings: bool,
}

impl Default for LotoConfig {
    fn default() -> Self {
        Self {
            tasks: 10,
            warm_per_task: 10,
            iterations: 50,
            seeds: (0..10).collect(),
            family_seed: 42,
            methods: Method::ALL.to_vec(),
            mlp_hidden: vec![50, 50, 50],
            // Matched to the network's feature width so the comparison
            // isolates learned versus random bases at equal capacity.
            rks_dim: 50,
            // Throughput-tuned: regret margins in this family are orders of
            // magnitude, so short refits lose nothing observable.
            warm_refit_iters: 10,
            fresh_refit_iters: 40,
            candidate_count: 1500,
            record_timings: true,
        }
    }
}

impl LotoConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.tasks < 2 {
            return Err(BenchError::InvalidConfig(
                "leave-one-task-out needs at least 2 tasks".into(),
            ));
        }
        if self.iterations == 0 {
            return Err(BenchError::InvalidConfig("iterations must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::InvalidConfig("at least one seed is required".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::InvalidConfig("at least one method is required".into()));
        }
        if self.mlp_hidden.is_empty() || self.mlp_hidden.contains(&0) {
            return Err(BenchError::InvalidConfig(
                "network hidden widths must be non-empty and positive".into(),
            ));
        }
        if self.rks_dim == 0 {
            return Err(BenchError::InvalidConfig("rks_dim must be positive".into()));
        }
        if self.warm_refit_iters == 0
            || self.fresh_refit_iters == 0
            || self.candidate_count == 0
        {
            return Err(BenchError::InvalidConfig(
                "refit iteration caps and candidate count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-iteration regret statistics for one method across its successful
/// runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub failed: usize,
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
    pub mean: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LotoOutcome {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<MethodSummary>,
    /// `method/task/seed` labels of aborted runs (excluded from rows and
    /// summaries).
    pub failed_runs: Vec<String>,
}

fn pairing_rng(family_seed: u64, seed: u64, task: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(
        family_seed
            ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (task + 1).wrapping_mul(0xD1B5_4A32_D192_ED03),
    )
}

/// One unit of benchmark work: a (method, seed) pair with its held-out task.
/// Exposed so a scheduler can farm units out and merge [`run_unit`] results.
#[derive(Debug, Clone, Copy)]
pub struct LotoUnit {
    pub method: Method,
    pub seed: u64,
    pub held_out: usize,
}

/// Enumerate all units in deterministic order: each seed sweeps the full
/// held-out rotation for each method.
pub fn plan_units(cfg: &LotoConfig) -> Vec<LotoUnit> {
    let mut units =
        Vec::with_capacity(cfg.seeds.len() * cfg.tasks * cfg.methods.len());
    for &seed in &cfg.seeds {
        for held_out in 0..cfg.tasks {
            for &method in &cfg.methods {
                units.push(LotoUnit { method, seed, held_out });
            }
        }
    }
    units
}

/// Warm histories and context vectors for one held-out rotation, shared by
/// every method so the comparison is paired. Contexts follow the task order
/// handed to the surrogate: siblings first, held-out task last.
pub fn prepare_rotation(
    family: &[QuadraticTask],
    cfg: &LotoConfig,
    seed: u64,
    held_out: usize,
) -> (Vec<TaskHistory>, Vec<Vec<f64>>) {
    let space = quad_space();
    let mut warm = Vec::new();
    let mut contexts = Vec::new();
    for (t, task) in family.iter().enumerate() {
        if t == held_out {
            continue;
        }
        let mut rng = pairing_rng(cfg.family_seed, seed, t as u64);
        warm.push(warm_history(
            task,
            &format!("task-{t}"),
            cfg.warm_per_task,
            &space,
            &mut rng,
        ));
        contexts.push(task.context());
    }
    contexts.push(family[held_out].context());
    (warm, contexts)
}

/// Run one (method, seed, held-out task) unit and return its trace.
pub fn run_unit(
    family: &[QuadraticTask],
    cfg: &LotoConfig,
    unit: LotoUnit,
) -> Result<BoTrace, BenchError> {
    let space = quad_space();
    let task = family[unit.held_out];
    let (warm, contexts) = prepare_rotation(family, cfg, unit.seed, unit.held_out);
    let settings = RunSettings {
        record_timings: cfg.record_timings,
        candidate_count: cfg.candidate_count,
        ..RunSettings::new(cfg.iterations, unit.seed)
    };
    let mut objective =
        |x: &[f64]| -> Result<Vec<f64>, String> { Ok(vec![task.eval(x)]) };

    let ablr = |feature: FeatureKind| {
        AblrSurrogate::new(
            SurrogateSettings {
                feature,
                warm_refit_iters: cfg.warm_refit_iters,
                fresh_refit_iters: cfg.fresh_refit_iters,
                ..Default::default()
            },
            unit.seed,
        )
    };
    let mlp = FeatureKind::Mlp { hidden: cfg.mlp_hidden.clone() };
    let rks = FeatureKind::Rks { dim: cfg.rks_dim };

    let trace = match unit.method {
        Method::GpPlain => {
            let mut s = GpSurrogate::plain();
            run_bo(&mut objective, &space, &[], &mut s, 1, &settings)
        }
        Method::GpTransferContext => {
            let mut s = GpSurrogate::stacked().with_contexts(contexts);
            run_bo(&mut objective, &space, &warm, &mut s, 1, &settings)
        }
        Method::AblrPlain => {
            let mut s = ablr(mlp);
            run_bo(&mut objective, &space, &[], &mut s, 1, &settings)
        }
        Method::AblrNnTransfer => {
            let mut s = ablr(mlp);
            run_bo(&mut objective, &space, &warm, &mut s, 1, &settings)
        }
        Method::AblrNnTransferContext => {
            let mut s = ablr(mlp).with_contexts(contexts);
            run_bo(&mut objective, &space, &warm, &mut s, 1, &settings)
        }
        Method::AblrRksTransfer => {
            let mut s = ablr(rks);
            run_bo(&mut objective, &space, &warm, &mut s, 1, &settings)
        }
    };
    trace.map_err(BenchError::Bo)
}

/// Convert one successful trace into result rows (regret against the known
/// family minimum).
pub fn unit_rows(task: &QuadraticTask, unit: LotoUnit, trace: &BoTrace) -> Vec<ResultRow> {
    let fmin = task.minimum();
    trace
        .records
        .iter()
        .map(|r| ResultRow {
            method: unit.method.label().to_string(),
            task: format!("task-{}", unit.held_out),
            seed: unit.seed,
            iteration: r.iteration,
            incumbent: r.incumbent,
            regret: r.incumbent - fmin,
            wall_time_ms: r.wall_ms,
        })
        .collect()
}

/// Aggregate successful runs into per-iteration regret quartiles and means.
pub fn summarize(
    cfg: &LotoConfig,
    rows: &[ResultRow],
    failed_runs: &[String],
) -> Vec<MethodSummary> {
    cfg.methods
        .iter()
        .map(|&method| {
            let label = method.label();
            let failed = failed_runs
                .iter()
                .filter(|f| f.starts_with(&format!("{label}/")))
                .count();
            let mut median = Vec::with_capacity(cfg.iterations);
            let mut q1 = Vec::with_capacity(cfg.iterations);
            let mut q3 = Vec::with_capacity(cfg.iterations);
            let mut mean_v = Vec::with_capacity(cfg.iterations);
            let mut runs = 0usize;
            for it in 0..cfg.iterations {
                let mut sample: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.method == label && r.iteration == it)
                    .map(|r| r.regret)
                    .collect();
                if it == 0 {
                    runs = sample.len();
                }
                if sample.is_empty() {
                    median.push(f64::NAN);
                    q1.push(f64::NAN);
                    q3.push(f64::NAN);
                    mean_v.push(f64::NAN);
                    continue;
                }
                sample.sort_by(f64::total_cmp);
                median.push(quantile(&sample, 0.5));
                q1.push(quantile(&sample, 0.25));
                q3.push(quantile(&sample, 0.75));
                mean_v.push(mean(&sample));
            }
            MethodSummary {
                method: label.to_string(),
                runs,
                failed,
                median,
                q1,
                q3,
                mean: mean_v,
            }
        })
        .collect()
}

/// Run the full benchmark serially in planning order.
pub fn loto_run(cfg: &LotoConfig) -> Result<LotoOutcome, BenchError> {
    cfg.validate()?;
    let family = sample_family(cfg.tasks, cfg.family_seed);
    let mut rows = Vec::new();
    let mut failed_runs = Vec::new();
    for unit in plan_units(cfg) {
        let label = format!(
            "{}/task-{}/{}",
            unit.method.label(),
            unit.held_out,
            unit.seed
        );
        match run_unit(&family, cfg, unit) {
            Ok(trace) if !trace.aborted => {
                rows.extend(unit_rows(&family[unit.held_out], unit, &trace));
            }
            Ok(_) => failed_runs.push(label),
            Err(BenchError::Bo(_)) => failed_runs.push(label),
            Err(other) => return Err(other),
        }
    }
    let summaries = summarize(cfg, &rows, &failed_runs);
    Ok(LotoOutcome { rows, summaries, failed_runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> LotoConfig {
        LotoConfig {
            tasks: 3,
            warm_per_task: 4,
            iterations: 6,
            seeds: vec![0, 1],
            family_seed: 7,
            methods: vec![Method::AblrPlain, Method::AblrNnTransfer],
            mlp_hidden: vec![12, 12],
            rks_dim: 30,
            record_timings: false,
            ..LotoConfig::default()
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        let mut cfg = tiny_config();
        cfg.tasks = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.seeds.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.methods.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.mlp_hidden = vec![8, 0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn every_seed_sweeps_the_full_held_out_rotation() {
        let mut cfg = tiny_config();
        cfg.seeds = vec![10, 11];
        let units = plan_units(&cfg);
        assert_eq!(units.len(), 2 * cfg.tasks * cfg.methods.len());
        let held: Vec<(u64, usize)> = units
            .iter()
            .filter(|u| u.method == Method::AblrPlain)
            .map(|u| (u.seed, u.held_out))
            .collect();
        assert_eq!(
            held,
            vec![(10, 0), (10, 1), (10, 2), (11, 0), (11, 1), (11, 2)]
        );
    }

    #[test]
    fn warm_data_is_shared_across_methods_for_pairing() {
        let cfg = tiny_config();
        let family = sample_family(cfg.tasks, cfg.family_seed);
        let (warm_a, ctx_a) = prepare_rotation(&family, &cfg, 5, 1);
        let (warm_b, ctx_b) = prepare_rotation(&family, &cfg, 5, 1);
        assert_eq!(warm_a, warm_b);
        assert_eq!(ctx_a, ctx_b);
        assert_eq!(warm_a.len(), cfg.tasks - 1);
        assert_eq!(ctx_a.len(), cfg.tasks);
        assert_eq!(ctx_a.last().unwrap(), &family[1].context());
        // A different seed must draw different warm points.
        let (warm_c, _) = prepare_rotation(&family, &cfg, 6, 1);
        assert_ne!(warm_a, warm_c);
    }

    #[test]
    fn small_benchmark_produces_complete_monotone_rows() {
        let cfg = tiny_config();
        let out = loto_run(&cfg).unwrap();
        assert!(out.failed_runs.is_empty(), "failures: {:?}", out.failed_runs);
        assert_eq!(
            out.rows.len(),
            cfg.methods.len() * cfg.seeds.len() * cfg.tasks * cfg.iterations
        );
        // Regret is non-negative (box minimum equals the analytic minimum)
        // and the incumbent never worsens within a run.
        for r in &out.rows {
            assert!(r.regret >= -1e-9, "negative regret {r:?}");
        }
        for &method in &cfg.methods {
            for &seed in &cfg.seeds {
                for held in 0..cfg.tasks {
                    let task = format!("task-{held}");
                    let run: Vec<&ResultRow> = out
                        .rows
                        .iter()
                        .filter(|r| {
                            r.method == method.label() && r.seed == seed && r.task == task
                        })
                        .collect();
                    assert_eq!(run.len(), cfg.iterations);
                    for pair in run.windows(2) {
                        assert!(pair[1].incumbent <= pair[0].incumbent + 1e-12);
                    }
                }
            }
        }
        // Summaries cover each iteration with ordered quartiles.
        for s in &out.summaries {
            assert_eq!(s.runs, cfg.seeds.len() * cfg.tasks);
            assert_eq!(s.failed, 0);
            assert_eq!(s.median.len(), cfg.iterations);
            for i in 0..cfg.iterations {
                assert!(s.q1[i] <= s.median[i] && s.median[i] <= s.q3[i]);
            }
        }
    }

    #[test]
    fn identical_configs_reproduce_identical_rows() {
        let cfg = LotoConfig {
            tasks: 2,
            warm_per_task: 3,
            iterations: 4,
            seeds: vec![3],
            family_seed: 11,
            methods: vec![Method::AblrNnTransfer],
            mlp_hidden: vec![10, 10],
            rks_dim: 20,
            record_timings: false,
            ..LotoConfig::default()
        };
        let a = loto_run(&cfg).unwrap();
        let b = loto_run(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn gp_methods_run_and_report_finite_regret() {
        let cfg = LotoConfig {
            tasks: 2,
            warm_per_task: 3,
            iterations: 4,
            seeds: vec![5],
            family_seed: 13,
            methods: vec![Method::GpPlain, Method::GpTransferContext],
            mlp_hidden: vec![8],
            rks_dim: 16,
            record_timings: true,
            ..LotoConfig::default()
        };
        let out = loto_run(&cfg).unwrap();
        assert!(out.failed_runs.is_empty(), "failures: {:?}", out.failed_runs);
        assert_eq!(out.rows.len(), 16);
        assert!(out.rows.iter().all(|r| r.regret.is_finite()));
    }
}
