//! Experiment dispatch: one serializable experiment description in, a
//! results directory out (per-iteration CSV, summary JSON, manifest with
//! content hashes). Work units can fan out over a thread pool; rows are
//! merged in planning order so the CSV bytes do not depend on scheduling.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use ablr_bo::{AblrSurrogate, BoTrace, FeatureKind, SurrogateSettings, TaskHistory};

use crate::error::BenchError;
use crate::loto::{plan_units, run_unit, summarize, unit_rows, LotoConfig};
use crate::multisignal::{
    iterations_to_threshold, ms_run_one, ms_threshold, signal_fit_ladder, MultiSignalConfig,
};
use crate::quadratic::sample_family;
use crate::results::{sort_rows, write_results_csv, Manifest, ResultRow};
use crate::stats::median;
use crate::tabular::{
    synthetic_table, tabular_bo, union_space, TabularBlackBox, TabularRunSettings,
};
use crate::timing::{ablr_fit_ladder, gp_fit_ladder, TimingConfig};

/// Where a replay experiment's tables come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TableSource {
    /// CSV files on disk: one target, any number of siblings.
    Files {
        target: String,
        #[serde(default)]
        siblings: Vec<String>,
    },
    /// Generated shifted-quadratic grid tables.
    Synthetic { grid: usize, siblings: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TabularMethod {
    Plain,
    Transfer,
}

impl TabularMethod {
    pub fn label(self) -> &'static str {
        match self {
            TabularMethod::Plain => "tabular-plain",
            TabularMethod::Transfer => "tabular-transfer",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabularExperiment {
    pub source: TableSource,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub methods: Vec<TabularMethod>,
    pub mlp_hidden: Vec<usize>,
    pub record_timings: bool,
}

impl Default for TabularExperiment {
    fn default() -> Self {
        Self {
            source: TableSource::Synthetic { grid: 10, siblings: 3, seed: 1 },
            budget: 15,
            seeds: (0..10).collect(),
            methods: vec![TabularMethod::Plain, TabularMethod::Transfer],
            mlp_hidden: vec![32, 32],
            record_timings: false,
        }
    }
}

impl TabularExperiment {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.budget == 0 {
            return Err(BenchError::InvalidConfig("budget must be positive".into()));
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
        if let TableSource::Synthetic { grid, .. } = self.source {
            if grid < 2 {
                return Err(BenchError::InvalidConfig(
                    "synthetic grid needs at least 2 points per axis".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiSignalExperiment {
    /// Signal counts to compare (each includes the target signal).
    pub signal_counts: Vec<usize>,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub mlp_hidden: Vec<usize>,
    /// Also measure the fit-cost-per-signal ladder (runs serially after the
    /// optimization runs).
    pub ladder: bool,
    pub ladder_max_signals: usize,
    pub record_timings: bool,
}

impl Default for MultiSignalExperiment {
    fn default() -> Self {
        Self {
            signal_counts: vec![1, 3],
            iterations: 25,
            seeds: (0..5).collect(),
            mlp_hidden: vec![32, 32],
            ladder: true,
            ladder_max_signals: 4,
            record_timings: false,
        }
    }
}

impl MultiSignalExperiment {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.signal_counts.is_empty() || self.signal_counts.contains(&0) {
            return Err(BenchError::InvalidConfig(
                "signal counts must be non-empty and positive".into(),
            ));
        }
        if self.iterations == 0 {
            return Err(BenchError::InvalidConfig("iterations must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::InvalidConfig("at least one seed is required".into()));
        }
        if self.mlp_hidden.is_empty() || self.mlp_hidden.contains(&0) {
            return Err(BenchError::InvalidConfig(
                "network hidden widths must be non-empty and positive".into(),
            ));
        }
        if self.ladder && self.ladder_max_signals < 2 {
            return Err(BenchError::InvalidConfig(
                "the signal ladder needs at least 2 signals".into(),
            ));
        }
        Ok(())
    }
}

/// Everything the harness can run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "experiment", content = "config")]
pub enum Experiment {
    /// Leave-one-task-out transfer comparison on the quadratic family.
    LotoQuadratic(LotoConfig),
    /// Optimization restricted to recorded-evaluation tables.
    TabularReplay(TabularExperiment),
    /// Signal-count comparison on the known-optimum bowl.
    MultiSignal(MultiSignalExperiment),
    /// Fit-cost scaling ladders (always serial: timings are exclusive).
    TimingLadder(TimingConfig),
}

impl Experiment {
    pub fn validate(&self) -> Result<(), BenchError> {
        match self {
            Experiment::LotoQuadratic(c) => c.validate(),
            Experiment::TabularReplay(c) => c.validate(),
            Experiment::MultiSignal(c) => c.validate(),
            Experiment::TimingLadder(c) => c.validate(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Experiment::LotoQuadratic(_) => "loto-quadratic",
            Experiment::TabularReplay(_) => "tabular-replay",
            Experiment::MultiSignal(_) => "multi-signal",
            Experiment::TimingLadder(_) => "timing-ladder",
        }
    }
}

/// What an experiment left on disk.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub failed_runs: Vec<String>,
    /// True when some runs aborted (results are partial but usable).
    pub partial: bool,
}

/// Run work units either serially (preserving order trivially) or on a
/// bounded thread pool, returning results in unit order either way.
fn run_units<U, R, F>(units: Vec<U>, jobs: usize, worker: F) -> Result<Vec<R>, BenchError>
where
    U: Send + Sync,
    R: Send,
    F: Fn(&U) -> R + Sync,
{
    if jobs <= 1 {
        Ok(units.iter().map(&worker).collect())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| BenchError::InvalidConfig(format!("thread pool: {e}")))?;
        Ok(pool.install(|| units.par_iter().map(&worker).collect()))
    }
}

fn finalize(
    out_dir: &Path,
    experiment: &Experiment,
    rows: Option<&[ResultRow]>,
    summary: serde_json::Value,
    failed_runs: Vec<String>,
) -> Result<RunReport, BenchError> {
    std::fs::create_dir_all(out_dir).map_err(|e| BenchError::io(out_dir.display(), e))?;
    let mut files = Vec::new();
    if let Some(rows) = rows {
        let csv = out_dir.join("results.csv");
        write_results_csv(&csv, rows)?;
        files.push(csv);
    }
    let summary_path = out_dir.join("summary.json");
    let pretty = serde_json::to_string_pretty(&summary)
        .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
    std::fs::write(&summary_path, pretty + "\n")
        .map_err(|e| BenchError::io(summary_path.display(), e))?;
    files.push(summary_path);

    let mut manifest = Manifest::new(
        serde_json::to_value(experiment).map_err(|e| BenchError::InvalidConfig(e.to_string()))?,
        failed_runs.clone(),
    );
    for f in &files {
        manifest.add_file(f)?;
    }
    let manifest_path = out_dir.join("manifest.json");
    manifest.write(&manifest_path)?;
    files.push(manifest_path);

    let partial = !failed_runs.is_empty();
    Ok(RunReport { out_dir: out_dir.to_path_buf(), files, failed_runs, partial })
}

fn run_loto(
    cfg: &LotoConfig,
    experiment: &Experiment,
    out_dir: &Path,
    jobs: usize,
) -> Result<RunReport, BenchError> {
    let family = sample_family(cfg.tasks, cfg.family_seed);
    let units = plan_units(cfg);
    let outcomes = run_units(units, jobs, |&unit| (unit, run_unit(&family, cfg, unit)))?;
    let mut rows = Vec::new();
    let mut failed_runs = Vec::new();
    for (unit, outcome) in outcomes {
        let label = format!(
            "{}/task-{}/{}",
            unit.method.label(),
            unit.held_out,
            unit.seed
        );
        match outcome {
            Ok(trace) if !trace.aborted => {
                rows.extend(unit_rows(&family[unit.held_out], unit, &trace));
            }
            Ok(_) | Err(BenchError::Bo(_)) => failed_runs.push(label),
            Err(other) => return Err(other),
        }
    }
    sort_rows(&mut rows);
    let summaries = summarize(cfg, &rows, &failed_runs);
    let summary = json!({ "kind": "loto-quadratic", "methods": summaries });
    finalize(out_dir, experiment, Some(&rows), summary, failed_runs)
}

fn load_tables(
    exp: &TabularExperiment,
) -> Result<(TabularBlackBox, Vec<TabularBlackBox>), BenchError> {
    match &exp.source {
        TableSource::Files { target, siblings } => {
            let t = TabularBlackBox::read_csv(Path::new(target))?;
            let sibs = siblings
                .iter()
                .map(|s| TabularBlackBox::read_csv(Path::new(s)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((t, sibs))
        }
        TableSource::Synthetic { grid, siblings, seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let mut shift = || [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
            let target_shift = shift();
            let sib_shifts: Vec<[f64; 2]> = (0..*siblings).map(|_| shift()).collect();
            let t = synthetic_table(*grid, target_shift, *seed);
            let sibs = sib_shifts
                .iter()
                .enumerate()
                .map(|(i, s)| synthetic_table(*grid, *s, seed + 1 + i as u64))
                .collect();
            Ok((t, sibs))
        }
    }
}

fn run_tabular(
    exp: &TabularExperiment,
    experiment: &Experiment,
    out_dir: &Path,
    jobs: usize,
) -> Result<RunReport, BenchError> {
    let (target, siblings) = load_tables(exp)?;
    let mut all: Vec<&TabularBlackBox> = vec![&target];
    all.extend(siblings.iter());
    let shared = union_space(&all)?;
    let target = target.with_space(shared.clone())?;
    let warm: Vec<TaskHistory> = siblings
        .iter()
        .enumerate()
        .map(|(i, t)| t.history(&format!("sibling-{i}"), &shared))
        .collect::<Result<Vec<_>, _>>()?;
    let fmin = target.signals.column(0)[target.argmin(0)];

    let mut units = Vec::new();
    for &seed in &exp.seeds {
        for &method in &exp.methods {
            units.push((method, seed));
        }
    }
    let worker = |&(method, seed): &(TabularMethod, u64)| -> (String, Result<BoTrace, BenchError>) {
        let label = format!("{}/target/{}", method.label(), seed);
        let mut surrogate = AblrSurrogate::new(
            SurrogateSettings {
                feature: FeatureKind::Mlp { hidden: exp.mlp_hidden.clone() },
                ..Default::default()
            },
            seed,
        );
        let warm_ref: &[TaskHistory] = match method {
            TabularMethod::Plain => &[],
            TabularMethod::Transfer => &warm,
        };
        let settings = TabularRunSettings {
            record_timings: exp.record_timings,
            ..TabularRunSettings::new(exp.budget, seed)
        };
        (label, tabular_bo(&target, warm_ref, &mut surrogate, &settings))
    };
    let outcomes = run_units(units.clone(), jobs, worker)?;

    let mut rows = Vec::new();
    let mut failed_runs = Vec::new();
    for ((method, seed), (label, outcome)) in units.iter().zip(outcomes) {
        match outcome {
            Ok(trace) => {
                rows.extend(trace.records.iter().map(|r| ResultRow {
                    method: method.label().to_string(),
                    task: "target".to_string(),
                    seed: *seed,
                    iteration: r.iteration,
                    incumbent: r.incumbent,
                    regret: r.incumbent - fmin,
                    wall_time_ms: r.wall_ms,
                }));
            }
            Err(BenchError::Bo(_)) => failed_runs.push(label),
            Err(other) => return Err(other),
        }
    }
    sort_rows(&mut rows);

    // Summary: per method, iterations until within 1% of the table's range
    // above its minimum (budget + 1 when never reached).
    let fmax = target
        .signals
        .column(0)
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = fmin + 0.01 * (fmax - fmin);
    let mut per_method = Vec::new();
    for &method in &exp.methods {
        let mut hits = Vec::new();
        for &seed in &exp.seeds {
            let run: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.method == method.label() && r.seed == seed)
                .collect();
            if run.is_empty() {
                continue;
            }
            let hit = run
                .iter()
                .position(|r| r.incumbent <= threshold)
                .map(|i| i + 1)
                .unwrap_or(exp.budget + 1);
            hits.push(hit as f64);
        }
        per_method.push(json!({
            "method": method.label(),
            "iterations_to_within_1pct": hits,
            "median": if hits.is_empty() { f64::NAN } else { median(&hits) },
        }));
    }
    let summary = json!({
        "kind": "tabular-replay",
        "table_rows": target.len(),
        "table_minimum": fmin,
        "threshold": threshold,
        "methods": per_method,
    });
    finalize(out_dir, experiment, Some(&rows), summary, failed_runs)
}

fn run_multisignal(
    exp: &MultiSignalExperiment,
    experiment: &Experiment,
    out_dir: &Path,
    jobs: usize,
) -> Result<RunReport, BenchError> {
    let mut units = Vec::new();
    for &s in &exp.signal_counts {
        for &seed in &exp.seeds {
            units.push((s, seed));
        }
    }
    let worker = |&(s, seed): &(usize, u64)| -> (usize, u64, Result<BoTrace, BenchError>) {
        let cfg = MultiSignalConfig {
            signals: s,
            iterations: exp.iterations,
            seeds: vec![seed],
            mlp_hidden: exp.mlp_hidden.clone(),
            record_timings: exp.record_timings,
        };
        (s, seed, ms_run_one(&cfg, seed))
    };
    let outcomes = run_units(units, jobs, worker)?;

    let threshold = ms_threshold();
    let mut rows = Vec::new();
    let mut failed_runs = Vec::new();
    let mut hits: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for (s, seed, outcome) in outcomes {
        let label = format!("signals-{s}/bowl/{seed}");
        match outcome {
            Ok(trace) if !trace.aborted => {
                hits.entry(s).or_default().push(iterations_to_threshold(
                    &trace,
                    threshold,
                    exp.iterations,
                ) as f64);
                rows.extend(trace.records.iter().map(|r| ResultRow {
                    method: format!("signals-{s}"),
                    task: "bowl".to_string(),
                    seed,
                    iteration: r.iteration,
                    incumbent: r.incumbent,
                    regret: r.incumbent,
                    wall_time_ms: r.wall_ms,
                }));
            }
            Ok(_) | Err(BenchError::Bo(_)) => failed_runs.push(label),
            Err(other) => return Err(other),
        }
    }
    sort_rows(&mut rows);

    let per_count: Vec<serde_json::Value> = hits
        .iter()
        .map(|(s, h)| {
            json!({
                "signals": s,
                "iterations_to_within_5pct": h,
                "median": median(h),
            })
        })
        .collect();
    // The fit-cost ladder runs after the optimization work, serially, so
    // its timings are exclusive.
    let ladder = if exp.ladder {
        let l = signal_fit_ladder(
            exp.ladder_max_signals,
            64,
            &exp.mlp_hidden,
            5,
            3,
            exp.seeds.first().copied().unwrap_or(0),
        )?;
        serde_json::to_value(l).map_err(|e| BenchError::InvalidConfig(e.to_string()))?
    } else {
        serde_json::Value::Null
    };
    let summary = json!({
        "kind": "multi-signal",
        "threshold": threshold,
        "signal_counts": per_count,
        "fit_ladder": ladder,
    });
    finalize(out_dir, experiment, Some(&rows), summary, failed_runs)
}

fn run_timing(
    cfg: &TimingConfig,
    experiment: &Experiment,
    out_dir: &Path,
) -> Result<RunReport, BenchError> {
    let ablr = ablr_fit_ladder(cfg)?;
    let gp = gp_fit_ladder(cfg)?;
    let summary = json!({
        "kind": "timing-ladder",
        "ablr": ablr,
        "gp": gp,
    });
    finalize(out_dir, experiment, None, summary, Vec::new())
}

/// Run an experiment into `out_dir` with at most `jobs` parallel workers
/// (timing experiments ignore `jobs` and always run serially).
pub fn run_experiment(
    experiment: &Experiment,
    out_dir: &Path,
    jobs: usize,
) -> Result<RunReport, BenchError> {
    experiment.validate()?;
    let jobs = jobs.max(1);
    match experiment {
        Experiment::LotoQuadratic(cfg) => run_loto(cfg, experiment, out_dir, jobs),
        Experiment::TabularReplay(cfg) => run_tabular(cfg, experiment, out_dir, jobs),
        Experiment::MultiSignal(cfg) => run_multisignal(cfg, experiment, out_dir, jobs),
        Experiment::TimingLadder(cfg) => run_timing(cfg, experiment, out_dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loto::Method;
    use crate::results::{read_results_csv, sha256_file, Manifest};

    fn tmp_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("ablr-bench-runner-tests").join(name);
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    fn tiny_loto() -> Experiment {
        Experiment::LotoQuadratic(LotoConfig {
            tasks: 2,
            warm_per_task: 3,
            iterations: 3,
            seeds: vec![0],
            family_seed: 5,
            methods: vec![Method::AblrNnTransfer],
            mlp_hidden: vec![10, 10],
            rks_dim: 16,
            record_timings: false,
            ..LotoConfig::default()
        })
    }

    #[test]
    fn experiment_json_round_trips_and_rejects_unknown_keys() {
        let text = r#"{
            "experiment": "loto-quadratic",
            "config": { "tasks": 4, "seeds": [1, 2] }
        }"#;
        let exp: Experiment = serde_json::from_str(text).unwrap();
        match &exp {
            Experiment::LotoQuadratic(c) => {
                assert_eq!(c.tasks, 4);
                assert_eq!(c.seeds, vec![1, 2]);
                // Unspecified fields take defaults.
                assert_eq!(c.iterations, 50);
            }
            other => panic!("wrong variant: {other:?}"),
        }
        let back = serde_json::to_string(&exp).unwrap();
        let reparsed: Experiment = serde_json::from_str(&back).unwrap();
        assert_eq!(serde_json::to_value(&reparsed).unwrap(), serde_json::to_value(&exp).unwrap());

        let bad = r#"{
            "experiment": "loto-quadratic",
            "config": { "taskz": 4 }
        }"#;
        let err = serde_json::from_str::<Experiment>(bad).unwrap_err().to_string();
        assert!(err.contains("taskz"), "{err}");
    }

    #[test]
    fn loto_experiment_writes_csv_summary_and_verifiable_manifest() {
        let out = tmp_dir("loto");
        let report = run_experiment(&tiny_loto(), &out, 1).unwrap();
        assert!(!report.partial);
        assert!(report.failed_runs.is_empty());
        // One run per (seed, held-out task): 1 seed x 2 tasks x 3 iterations.
        let rows = read_results_csv(&out.join("results.csv")).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.method == "ablr-nn-transfer"));

        let manifest: Manifest =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
                .unwrap();
        for (name, hash) in &manifest.files {
            assert_eq!(&sha256_file(&out.join(name)).unwrap(), hash, "hash mismatch for {name}");
        }
        assert_eq!(manifest.experiment["experiment"], "loto-quadratic");
    }

    #[test]
    fn reruns_and_parallel_runs_produce_identical_result_bytes() {
        let exp = tiny_loto();
        let a = tmp_dir("det-a");
        let b = tmp_dir("det-b");
        let c = tmp_dir("det-c");
        run_experiment(&exp, &a, 1).unwrap();
        run_experiment(&exp, &b, 1).unwrap();
        run_experiment(&exp, &c, 2).unwrap();
        let bytes_a = std::fs::read(a.join("results.csv")).unwrap();
        assert_eq!(bytes_a, std::fs::read(b.join("results.csv")).unwrap());
        assert_eq!(bytes_a, std::fs::read(c.join("results.csv")).unwrap());
    }

    #[test]
    fn tabular_experiment_reports_threshold_hits() {
        let out = tmp_dir("tabular");
        let exp = Experiment::TabularReplay(TabularExperiment {
            source: TableSource::Synthetic { grid: 5, siblings: 1, seed: 3 },
            budget: 4,
            seeds: vec![0],
            methods: vec![TabularMethod::Transfer],
            mlp_hidden: vec![10, 10],
            record_timings: false,
        });
        let report = run_experiment(&exp, &out, 1).unwrap();
        assert!(!report.partial);
        let rows = read_results_csv(&out.join("results.csv")).unwrap();
        assert_eq!(rows.len(), 4);
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(summary["methods"][0]["method"], "tabular-transfer");
        assert!(summary["methods"][0]["median"].is_number());
    }

    #[test]
    fn multisignal_experiment_covers_each_signal_count() {
        let out = tmp_dir("ms");
        let exp = Experiment::MultiSignal(MultiSignalExperiment {
            signal_counts: vec![1, 2],
            iterations: 3,
            seeds: vec![0],
            mlp_hidden: vec![10, 10],
            ladder: false,
            ladder_max_signals: 2,
            record_timings: false,
        });
        let report = run_experiment(&exp, &out, 1).unwrap();
        assert!(!report.partial);
        let rows = read_results_csv(&out.join("results.csv")).unwrap();
        assert_eq!(rows.len(), 6);
        let methods: std::collections::BTreeSet<String> =
            rows.iter().map(|r| r.method.clone()).collect();
        assert_eq!(
            methods,
            ["signals-1", "signals-2"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn timing_experiment_writes_summary_without_rows() {
        let out = tmp_dir("timing");
        let exp = Experiment::TimingLadder(TimingConfig {
            sizes: vec![16, 32],
            input_dim: 2,
            feature_dim: 8,
            reps: 1,
            evals_per_rep: 1,
            seed: 1,
        });
        let report = run_experiment(&exp, &out, 4).unwrap();
        assert!(!out.join("results.csv").exists());
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap())
                .unwrap();
        assert!(summary["ablr"]["slope"].is_number());
        assert!(summary["gp"]["slope"].is_number());
        assert!(report.files.iter().any(|f| f.ends_with("manifest.json")));
    }
}
