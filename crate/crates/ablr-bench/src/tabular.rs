//! Replay tables: finite sets of recorded evaluations standing in for a
//! black box. Optimization is restricted to the table's configurations,
//! evaluation is exact row lookup, and sibling tables become warm-start
//! histories.

use std::collections::HashMap;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ablr_bo::{
    continuous, propose_next, BoError, BoTrace, Candidates, IterationRecord, SearchSpace,
    Surrogate, TaskHistory,
};

use crate::error::BenchError;

/// Prefix distinguishing response columns from hyperparameter columns in
/// the CSV header.
pub const SIGNAL_PREFIX: &str = "signal:";

/// A recorded-evaluation table: hyperparameter columns, signal columns, and
/// an exact-match index from canonically rounded configurations to rows.
#[derive(Debug, Clone)]
pub struct TabularBlackBox {
    pub param_names: Vec<String>,
    pub signal_names: Vec<String>,
    /// Natural-scale configurations, `n x p`.
    pub params: Array2<f64>,
    /// Recorded signals, `n x s`.
    pub signals: Array2<f64>,
    /// Per-column box spanning the observed values.
    pub space: SearchSpace,
    /// All configurations in encoded coordinates, row-aligned with `params`.
    pub rows_enc: Array2<f64>,
    lookup: HashMap<String, usize>,
}

/// Canonical fixed-precision key for a configuration: each value rounded to
/// 12 significant digits so float drift in callers cannot break the exact
/// match (negative zero collapses onto zero).
pub fn canonical_key(values: &ArrayView1<f64>) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        let v = if *v == 0.0 { 0.0 } else { *v };
        out.push_str(&format!("{v:.11e}"));
    }
    out
}

impl TabularBlackBox {
    /// Assemble and index a table from in-memory columns, enforcing the
    /// schema invariants (finite cells, unique configurations). Reported
    /// line numbers assume the CSV layout: header on line 1, first data row
    /// on line 2.
    pub fn from_columns(
        param_names: Vec<String>,
        signal_names: Vec<String>,
        params: Array2<f64>,
        signals: Array2<f64>,
    ) -> Result<Self, BenchError> {
        if param_names.is_empty() {
            return Err(BenchError::Schema {
                line: 1,
                message: "no hyperparameter columns".into(),
            });
        }
        if signal_names.is_empty() {
            return Err(BenchError::Schema {
                line: 1,
                message: format!("no columns prefixed \"{SIGNAL_PREFIX}\""),
            });
        }
        let mut seen_names: Vec<&str> = Vec::new();
        for name in param_names.iter().chain(&signal_names) {
            if name.is_empty() {
                return Err(BenchError::Schema { line: 1, message: "empty column name".into() });
            }
            if seen_names.contains(&name.as_str()) {
                return Err(BenchError::Schema {
                    line: 1,
                    message: format!("duplicate column name '{name}'"),
                });
            }
            seen_names.push(name);
        }
        let (n, p) = params.dim();
        if signals.nrows() != n || param_names.len() != p || signal_names.len() != signals.ncols()
        {
            return Err(BenchError::InvalidConfig(
                "table columns do not align with their names".into(),
            ));
        }
        if n == 0 {
            return Err(BenchError::Schema { line: 1, message: "table has no rows".into() });
        }
        for i in 0..n {
            for (j, v) in params.row(i).iter().enumerate() {
                if !v.is_finite() {
                    return Err(BenchError::Schema {
                        line: i + 2,
                        message: format!("non-finite value in column '{}'", param_names[j]),
                    });
                }
            }
            for (j, v) in signals.row(i).iter().enumerate() {
                if !v.is_finite() {
                    return Err(BenchError::Schema {
                        line: i + 2,
                        message: format!(
                            "non-finite value in column '{SIGNAL_PREFIX}{}'",
                            signal_names[j]
                        ),
                    });
                }
            }
        }

        let mut lookup = HashMap::with_capacity(n);
        for i in 0..n {
            let key = canonical_key(&params.row(i));
            if let Some(prev) = lookup.insert(key, i) {
                return Err(BenchError::Schema {
                    line: i + 2,
                    message: format!("duplicate configuration (same as line {})", prev + 2),
                });
            }
        }

        // Each column becomes a box dimension spanning its observed range;
        // a constant column gets a unit box so encoding stays well defined.
        let dims = (0..p)
            .map(|j| {
                let col = params.column(j);
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let hi = if hi > lo { hi } else { lo + 1.0 };
                continuous(&param_names[j], lo, hi)
            })
            .collect();
        let space = SearchSpace::new(dims).map_err(BenchError::Bo)?;
        let mut rows_enc = Array2::zeros((n, p));
        for i in 0..n {
            let z = space
                .encode(&params.row(i).to_vec())
                .map_err(BenchError::Bo)?;
            rows_enc.row_mut(i).assign(&z);
        }

        Ok(Self { param_names, signal_names, params, signals, space, rows_enc, lookup })
    }

    /// Parse and validate a CSV file (header of hyperparameter columns, then
    /// signal columns prefixed [`SIGNAL_PREFIX`]).
    pub fn read_csv(path: &Path) -> Result<Self, BenchError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| BenchError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| BenchError::Schema { line: 1, message: e.to_string() })?
            .clone();

        let mut param_names: Vec<String> = Vec::new();
        let mut signal_names: Vec<String> = Vec::new();
        for name in headers.iter() {
            if let Some(sig) = name.strip_prefix(SIGNAL_PREFIX) {
                signal_names.push(sig.to_string());
            } else {
                if !signal_names.is_empty() {
                    return Err(BenchError::Schema {
                        line: 1,
                        message: format!(
                            "hyperparameter column '{name}' appears after signal columns"
                        ),
                    });
                }
                param_names.push(name.to_string());
            }
        }
        let (p, s) = (param_names.len(), signal_names.len());

        let mut params: Vec<f64> = Vec::new();
        let mut signals: Vec<f64> = Vec::new();
        let mut n = 0usize;
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record =
                record.map_err(|e| BenchError::Schema { line, message: e.to_string() })?;
            if record.len() != p + s {
                return Err(BenchError::Schema {
                    line,
                    message: format!("{} cells, header has {}", record.len(), p + s),
                });
            }
            for (j, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| BenchError::Schema {
                    line,
                    message: format!(
                        "non-numeric value '{cell}' in column '{}'",
                        headers.get(j).unwrap_or("?")
                    ),
                })?;
                if j < p {
                    params.push(v);
                } else {
                    signals.push(v);
                }
            }
            n += 1;
        }
        let params = Array2::from_shape_vec((n, p), params)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        let signals = Array2::from_shape_vec((n, s), signals)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        Self::from_columns(param_names, signal_names, params, signals)
    }

    /// Write the table back out in the schema [`read_csv`] accepts.
    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| BenchError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let mut header: Vec<String> = self.param_names.clone();
        header.extend(self.signal_names.iter().map(|s| format!("{SIGNAL_PREFIX}{s}")));
        w.write_record(&header)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        for i in 0..self.len() {
            let mut row: Vec<String> =
                self.params.row(i).iter().map(|v| format!("{v}")).collect();
            row.extend(self.signals.row(i).iter().map(|v| format!("{v}")));
            w.write_record(&row)
                .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        }
        w.flush().map_err(|e| BenchError::io(path.display(), e))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.params.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_params(&self) -> usize {
        self.params.ncols()
    }

    pub fn num_signals(&self) -> usize {
        self.signals.ncols()
    }

    /// Exact-match row lookup after canonical rounding.
    pub fn find(&self, config: &ArrayView1<f64>) -> Option<usize> {
        self.lookup.get(&canonical_key(config)).copied()
    }

    /// Index of the row minimizing one signal.
    pub fn argmin(&self, signal: usize) -> usize {
        let col = self.signals.column(signal);
        (0..self.len())
            .min_by(|&a, &b| col[a].total_cmp(&col[b]))
            .expect("tables are non-empty")
    }

    /// Re-encode every configuration against a caller-provided space (which
    /// must cover them all). Used to put a target table and its siblings
    /// into one shared coordinate system.
    pub fn with_space(mut self, space: SearchSpace) -> Result<Self, BenchError> {
        let mut rows_enc = Array2::zeros((self.len(), self.num_params()));
        for i in 0..self.len() {
            let z = space
                .encode(&self.params.row(i).to_vec())
                .map_err(BenchError::Bo)?;
            rows_enc.row_mut(i).assign(&z);
        }
        self.space = space;
        self.rows_enc = rows_enc;
        Ok(self)
    }

    /// The whole table as an evaluation history over the given space (used
    /// to feed sibling tables in as warm starts; the space must cover this
    /// table's configurations).
    pub fn history(&self, task_id: &str, space: &SearchSpace) -> Result<TaskHistory, BenchError> {
        let mut hist = TaskHistory::empty(task_id, space.len(), self.num_signals());
        for i in 0..self.len() {
            let z = space
                .encode(&self.params.row(i).to_vec())
                .map_err(BenchError::Bo)?;
            hist.push(&z.view(), &self.signals.row(i).to_vec());
        }
        Ok(hist)
    }
}

/// A box spanning several tables' observed ranges. The tables must agree on
/// their column names; the result can re-encode all of them (see
/// [`TabularBlackBox::with_space`]) so sibling warm starts and the target
/// share one coordinate system.
pub fn union_space(tables: &[&TabularBlackBox]) -> Result<SearchSpace, BenchError> {
    let first = *tables
        .first()
        .ok_or_else(|| BenchError::InvalidConfig("no tables given".into()))?;
    for t in &tables[1..] {
        if t.param_names != first.param_names || t.signal_names != first.signal_names {
            return Err(BenchError::InvalidConfig(
                "tables disagree on their column names".into(),
            ));
        }
    }
    let dims = (0..first.num_params())
        .map(|j| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for t in tables {
                for v in t.params.column(j) {
                    lo = lo.min(*v);
                    hi = hi.max(*v);
                }
            }
            let hi = if hi > lo { hi } else { lo + 1.0 };
            continuous(&first.param_names[j], lo, hi)
        })
        .collect();
    SearchSpace::new(dims).map_err(BenchError::Bo)
}

/// Validation summary for a table file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableSummary {
    pub rows: usize,
    pub params: usize,
    pub signals: usize,
}

/// Check a CSV file against the table schema without keeping the table.
pub fn validate_table(path: &Path) -> Result<TableSummary, BenchError> {
    let t = TabularBlackBox::read_csv(path)?;
    Ok(TableSummary { rows: t.len(), params: t.num_params(), signals: t.num_signals() })
}

/// Deterministic synthetic replay table: a full `grid x grid` sweep of two
/// hyperparameters scoring a shifted quadratic "loss" plus a monotone "cost"
/// signal. Stands in for recorded tuning sweeps.
pub fn synthetic_table(grid: usize, shift: [f64; 2], seed: u64) -> TabularBlackBox {
    assert!(grid >= 2);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let curve_x: f64 = rng.gen_range(0.6..1.4);
    let curve_y: f64 = rng.gen_range(0.6..1.4);
    let n = grid * grid;
    let mut params = Array2::zeros((n, 2));
    let mut signals = Array2::zeros((n, 2));
    for i in 0..grid {
        for j in 0..grid {
            let row = i * grid + j;
            let x = i as f64 / (grid - 1) as f64;
            let y = j as f64 / (grid - 1) as f64;
            params[[row, 0]] = x;
            params[[row, 1]] = y;
            let loss =
                curve_x * (x - shift[0]).powi(2) + curve_y * (y - shift[1]).powi(2);
            signals[[row, 0]] = loss;
            signals[[row, 1]] = 1.0 + 3.0 * x + y;
        }
    }
    TabularBlackBox::from_columns(
        vec!["rate".into(), "depth".into()],
        vec!["loss".into(), "cost".into()],
        params,
        signals,
    )
    .expect("generated tables satisfy the schema")
}

/// Knobs for a table-restricted optimization run.
#[derive(Debug, Clone)]
pub struct TabularRunSettings {
    /// Evaluation budget (capped by the table size — rows are never
    /// evaluated twice).
    pub budget: usize,
    /// Random rows drawn before the surrogate takes over when no warm-start
    /// data exists.
    pub init_random: usize,
    /// Which signal column drives the incumbent.
    pub target_signal: usize,
    pub seed: u64,
    pub record_timings: bool,
}

impl TabularRunSettings {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self { budget, init_random: 3, target_signal: 0, seed, record_timings: false }
    }
}

fn stream(seed: u64, tag: u64, i: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(
        seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i.wrapping_mul(0xD1B5_4A32_D192_ED03),
    )
}

/// Optimize over a replay table: proposals come from the not-yet-evaluated
/// rows (so duplicates are impossible by construction), evaluation is exact
/// row lookup, and sibling histories warm-start the surrogate. The trace
/// ends early once every row has been evaluated.
pub fn tabular_bo<S>(
    table: &TabularBlackBox,
    warm: &[TaskHistory],
    surrogate: &mut S,
    settings: &TabularRunSettings,
) -> Result<BoTrace, BenchError>
where
    S: Surrogate + ?Sized,
{
    let s_count = table.num_signals();
    if settings.target_signal >= s_count {
        return Err(BenchError::InvalidConfig(format!(
            "target signal {} out of range for {s_count} signals",
            settings.target_signal
        )));
    }
    for t in warm {
        if t.num_signals() != s_count {
            return Err(BenchError::InvalidConfig(format!(
                "warm task '{}' has {} signals, table has {s_count}",
                t.task_id,
                t.num_signals()
            )));
        }
    }
    let space = &table.space;
    let mut tasks: Vec<TaskHistory> = warm.to_vec();
    tasks.push(TaskHistory::empty("target", space.len(), s_count));
    let target_idx = tasks.len() - 1;
    let have_warm = warm.iter().any(|t| !t.is_empty());

    let mut remaining: Vec<usize> = (0..table.len()).collect();
    let mut trace = BoTrace {
        records: Vec::new(),
        failures: Vec::new(),
        aborted: false,
        target: TaskHistory::empty("target", space.len(), s_count),
    };
    let mut incumbent = f64::INFINITY;

    for iteration in 0..settings.budget {
        if remaining.is_empty() {
            break;
        }
        let timer = std::time::Instant::now();
        let model_based = have_warm || tasks[target_idx].len() >= settings.init_random;
        let pick = if model_based {
            surrogate.refit(&tasks, target_idx).map_err(BenchError::Bo)?;
            let mut cand = Array2::zeros((remaining.len(), space.len()));
            for (r, &idx) in remaining.iter().enumerate() {
                cand.row_mut(r).assign(&table.rows_enc.row(idx));
            }
            let inc = if incumbent.is_finite() { Some(incumbent) } else { None };
            let mut rng = stream(settings.seed, 2, iteration as u64);
            let sg: &S = surrogate;
            let suggestion = propose_next(
                |xs| sg.predict(xs),
                space,
                inc,
                Candidates::Explicit { rows: cand.view() },
                sg.ei_uses_noise(),
                &mut rng,
            )
            .map_err(BenchError::Bo)?;
            // The suggestion is one of the candidate rows verbatim; recover
            // its position by exact comparison.
            let within = (0..remaining.len())
                .find(|&r| cand.row(r) == suggestion.x_enc)
                .ok_or_else(|| {
                    BoError::InvalidConfig("proposal left the candidate set".into())
                })
                .map_err(BenchError::Bo)?;
            remaining.swap_remove(within)
        } else {
            let mut rng = stream(settings.seed, 1, iteration as u64);
            let within = rng.gen_range(0..remaining.len());
            remaining.swap_remove(within)
        };

        let z = table.rows_enc.row(pick).to_owned();
        let sig = table.signals.row(pick).to_vec();
        tasks[target_idx].push(&z.view(), &sig);
        trace.target.push(&z.view(), &sig);
        incumbent = incumbent.min(sig[settings.target_signal]);
        let wall_ms = if settings.record_timings {
            timer.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        trace.records.push(IterationRecord {
            iteration,
            x_enc: z,
            x_natural: table.params.row(pick).to_vec(),
            signals: sig,
            incumbent,
            wall_ms,
        });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ablr_bo::{AblrSurrogate, FeatureKind, SurrogateSettings};

    fn write_tmp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("ablr-bench-tabular-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn small_surrogate(seed: u64) -> AblrSurrogate {
        AblrSurrogate::new(
            SurrogateSettings {
                feature: FeatureKind::Mlp { hidden: vec![12, 12] },
                warm_refit_iters: 25,
                fresh_refit_iters: 60,
                ..Default::default()
            },
            seed,
        )
    }

    #[test]
    fn round_trips_through_csv() {
        let t = synthetic_table(5, [0.3, 0.6], 9);
        let path = write_tmp("round.csv", "");
        t.write_csv(&path).unwrap();
        let back = TabularBlackBox::read_csv(&path).unwrap();
        assert_eq!(back.param_names, t.param_names);
        assert_eq!(back.signal_names, t.signal_names);
        assert_eq!(back.len(), 25);
        assert_eq!(back.params, t.params);
        assert_eq!(back.signals, t.signals);
        let summary = validate_table(&path).unwrap();
        assert_eq!(summary, TableSummary { rows: 25, params: 2, signals: 2 });
    }

    #[test]
    fn duplicate_configuration_reports_the_offending_line() {
        let path = write_tmp(
            "dup.csv",
            "lr,signal:loss\n0.1,1.0\n0.2,2.0\n0.1,3.0\n",
        );
        match TabularBlackBox::read_csv(&path) {
            Err(BenchError::Schema { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate configuration"), "{message}");
                assert!(message.contains("line 2"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let path = write_tmp("nan.csv", "lr,signal:loss\n0.1,1.0\n0.2,oops\n");
        match TabularBlackBox::read_csv(&path) {
            Err(BenchError::Schema { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("signal:loss"), "{message}");
                assert!(message.contains("oops"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn signal_before_parameter_column_is_rejected() {
        let path = write_tmp("order.csv", "signal:loss,lr\n1.0,0.1\n");
        match TabularBlackBox::read_csv(&path) {
            Err(BenchError::Schema { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_rounding_makes_lookup_drift_proof() {
        let t = synthetic_table(4, [0.1, 0.9], 3);
        let row = t.params.row(7).to_owned();
        // A sub-12-digit perturbation must land on the same row; a visible
        // one must miss.
        let mut drifted = row.clone();
        drifted[0] += drifted[0].abs().max(1e-3) * 1e-14;
        assert_eq!(t.find(&drifted.view()), Some(7));
        let mut other = row;
        other[0] += 0.5;
        assert_eq!(t.find(&other.view()), None);
    }

    #[test]
    fn single_row_table_spends_its_budget_on_that_row() {
        let params = Array2::from_shape_vec((1, 1), vec![0.4]).unwrap();
        let signals = Array2::from_shape_vec((1, 1), vec![2.5]).unwrap();
        let t = TabularBlackBox::from_columns(
            vec!["x".into()],
            vec!["y".into()],
            params,
            signals,
        )
        .unwrap();
        let mut surr = small_surrogate(1);
        let trace =
            tabular_bo(&t, &[], &mut surr, &TabularRunSettings::new(1, 5)).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.records[0].incumbent, 2.5);
    }

    #[test]
    fn full_budget_exhausts_the_grid_and_finds_its_minimum() {
        let t = synthetic_table(4, [0.35, 0.55], 21);
        let best = t.signals.column(0)[t.argmin(0)];
        let mut surr = small_surrogate(2);
        let trace = tabular_bo(
            &t,
            &[],
            &mut surr,
            &TabularRunSettings::new(t.len() + 5, 5),
        )
        .unwrap();
        // Early stop at table exhaustion, minimum necessarily found, no row
        // evaluated twice.
        assert_eq!(trace.records.len(), t.len());
        assert_eq!(trace.records.last().unwrap().incumbent, best);
        let mut seen: Vec<String> = trace
            .records
            .iter()
            .map(|r| canonical_key(&ArrayView1::from(&r.x_natural)))
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), t.len());
    }

    #[test]
    fn identical_settings_reproduce_the_trace() {
        let t = synthetic_table(6, [0.2, 0.8], 13);
        let settings = TabularRunSettings::new(10, 77);
        let mut s1 = small_surrogate(3);
        let mut s2 = small_surrogate(3);
        let a = tabular_bo(&t, &[], &mut s1, &settings).unwrap();
        let b = tabular_bo(&t, &[], &mut s2, &settings).unwrap();
        let xa: Vec<Vec<f64>> = a.records.iter().map(|r| r.x_natural.clone()).collect();
        let xb: Vec<Vec<f64>> = b.records.iter().map(|r| r.x_natural.clone()).collect();
        assert_eq!(xa, xb);
    }

    /// Shifted-quadratic siblings with fully evaluated tables must lead the
    /// warm-started optimizer to the target grid minimum in fewer median
    /// iterations than the cold start needs.
    #[test]
    fn sibling_tables_accelerate_the_search() {
        let target = synthetic_table(10, [0.45, 0.55], 100);
        let siblings = [
            synthetic_table(10, [0.35, 0.60], 101),
            synthetic_table(10, [0.55, 0.50], 102),
            synthetic_table(10, [0.40, 0.45], 103),
        ];
        let warm: Vec<TaskHistory> = siblings
            .iter()
            .enumerate()
            .map(|(i, t)| t.history(&format!("sibling-{i}"), &target.space).unwrap())
            .collect();
        let best = target.signals.column(0)[target.argmin(0)];
        let worst = target
            .signals
            .column(0)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let threshold = best + 0.01 * (worst - best);
        let budget = 12;

        let iters_to_hit = |trace: &BoTrace| -> usize {
            trace
                .records
                .iter()
                .position(|r| r.incumbent <= threshold)
                .map(|i| i + 1)
                .unwrap_or(budget + 1)
        };
        let median = |mut v: Vec<usize>| -> f64 {
            v.sort_unstable();
            let n = v.len();
            if n % 2 == 1 {
                v[n / 2] as f64
            } else {
                (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
            }
        };

        let seeds: Vec<u64> = (0..6).map(|i| 500 + i).collect();
        let mut plain_hits = Vec::new();
        let mut transfer_hits = Vec::new();
        for &seed in &seeds {
            let mut surr = small_surrogate(seed);
            let trace = tabular_bo(
                &target,
                &[],
                &mut surr,
                &TabularRunSettings::new(budget, seed),
            )
            .unwrap();
            plain_hits.push(iters_to_hit(&trace));

            let mut surr = small_surrogate(seed);
            let trace = tabular_bo(
                &target,
                &warm,
                &mut surr,
                &TabularRunSettings::new(budget, seed),
            )
            .unwrap();
            transfer_hits.push(iters_to_hit(&trace));
        }
        let mp = median(plain_hits.clone());
        let mt = median(transfer_hits.clone());
        assert!(
            mt < mp,
            "transfer median {mt} (runs {transfer_hits:?}) vs plain {mp} ({plain_hits:?})"
        );
    }
}
