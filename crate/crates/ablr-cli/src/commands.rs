//! Command implementations behind the thin argument parser. Every command
//! returns the process exit code on success and a diagnostic on failure
//! (failure always maps to exit 1; partial benchmark completion to 2).

use std::path::{Path, PathBuf};

use ndarray::Array2;

use ablr_bench::{run_experiment, validate_table, RESULTS_SCHEMA_VERSION};
use ablr_bo::{
    read_jsonl, AblrSurrogate, SearchSpace, Surrogate, SurrogateSettings, TaskHistory,
};
use ablr_core::Predictive;

use crate::config::{apply_seed_override, parse_fit_config, parse_run_document};
use crate::model_io::{
    load_model, recheck_head, save_model, saved_from_fit, MODEL_FORMAT_VERSION,
};

/// Worker-thread default: everything the machine offers.
fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

pub fn cmd_run(
    config: &Path,
    jobs: Option<usize>,
    seed_override: Option<u64>,
    out: Option<PathBuf>,
) -> Result<u8, String> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("cannot read config '{}': {e}", config.display()))?;
    let mut doc = parse_run_document(&text)
        .map_err(|e| format!("config '{}': {e}", config.display()))?;
    if let Some(seed) = seed_override {
        apply_seed_override(&mut doc.experiment, seed);
    }
    let out_dir = out
        .or(doc.out)
        .unwrap_or_else(|| PathBuf::from("results").join(doc.experiment.label()));
    let jobs = jobs.or(doc.jobs).unwrap_or_else(default_jobs);

    let report = run_experiment(&doc.experiment, &out_dir, jobs).map_err(|e| e.to_string())?;
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    if report.partial {
        eprintln!(
            "warning: {} run(s) failed; labels recorded in the manifest",
            report.failed_runs.len()
        );
        Ok(2)
    } else {
        Ok(0)
    }
}

pub fn cmd_validate(table: &Path) -> Result<u8, String> {
    let summary = validate_table(table).map_err(|e| e.to_string())?;
    println!(
        "table OK: {} row(s), {} hyperparameter column(s), {} signal column(s)",
        summary.rows, summary.params, summary.signals
    );
    Ok(0)
}

pub fn cmd_fit(config: &Path, out: &Path) -> Result<u8, String> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("cannot read fit config '{}': {e}", config.display()))?;
    let (cfg, space) = parse_fit_config(&text)
        .map_err(|e| format!("fit config '{}': {e}", config.display()))?;

    let mut records = Vec::new();
    for path in &cfg.histories {
        records.extend(read_jsonl(path).map_err(|e| e.to_string())?);
    }
    let mut tasks = TaskHistory::from_records(&space, &cfg.signals, &records)
        .map_err(|e| e.to_string())?;
    // A target without records of its own is pure transfer: the siblings
    // train the shared features and the target head stays at its prior.
    if !tasks.iter().any(|t| t.task_id == cfg.target_task) {
        tasks.push(TaskHistory::empty(
            cfg.target_task.clone(),
            space.len(),
            cfg.signals.len(),
        ));
    }
    let target_idx = tasks
        .iter()
        .position(|t| t.task_id == cfg.target_task)
        .expect("target appended above if absent");

    let settings = SurrogateSettings {
        feature: cfg.feature.clone(),
        target_signal: cfg.target_signal,
        fresh_refit_iters: cfg.fit_iters,
        ..Default::default()
    };
    let mut surrogate = AblrSurrogate::new(settings, cfg.seed);
    if let Some(ctx_map) = &cfg.contexts {
        let contexts = tasks
            .iter()
            .map(|t| {
                ctx_map.get(&t.task_id).cloned().ok_or_else(|| {
                    format!("contexts: no entry for task '{}'", t.task_id)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        surrogate = surrogate.with_contexts(contexts);
    }
    surrogate
        .refit(&tasks, target_idx)
        .map_err(|e| format!("fit failed: {e}"))?;

    let fit = surrogate.export().expect("fitted state exists after refit");
    let task_ids: Vec<String> = tasks.iter().map(|t| t.task_id.clone()).collect();
    let saved = saved_from_fit(
        fit,
        &space,
        &cfg.signals,
        &task_ids,
        &cfg.target_task,
        cfg.target_signal,
    );
    save_model(out, &saved)?;
    println!(
        "fit {} task(s) x {} signal(s) on {} evaluation(s); wrote {}",
        task_ids.len(),
        cfg.signals.len(),
        records.len(),
        out.display()
    );
    Ok(0)
}

pub fn cmd_predict(model: &Path, data: &Path, out: Option<&Path>) -> Result<u8, String> {
    let loaded = load_model(model)?;
    for (i, posterior) in loaded.fit.posteriors.iter().enumerate() {
        recheck_head(posterior).map_err(|e| format!("model '{}' head {i}: {e}", model.display()))?;
    }
    let (header, rows) = read_query_csv(data)?;
    let (x_enc, ordered) = encode_queries(&loaded.space, &header, &rows)?;

    let settings = SurrogateSettings {
        target_signal: loaded.target_signal,
        ..Default::default()
    };
    let names: Vec<String> = loaded.space.names().iter().map(|s| s.to_string()).collect();
    // Keep stdout strictly tabular; the provenance note goes to stderr.
    eprintln!(
        "model of {} task(s); predicting signal '{}' for task '{}'",
        loaded.task_ids.len(),
        loaded.signals[loaded.target_signal],
        loaded.target_task
    );
    let surrogate = AblrSurrogate::import(settings, loaded.fit);
    let predictions = surrogate
        .predict(&x_enc.view())
        .map_err(|e| e.to_string())?;

    let text = render_predictions(&names, &ordered, &predictions);
    match out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| format!("cannot write '{}': {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

pub fn cmd_version() -> Result<u8, String> {
    println!(
        "ablr {} (model format {MODEL_FORMAT_VERSION}, results schema {RESULTS_SCHEMA_VERSION})",
        env!("CARGO_PKG_VERSION")
    );
    Ok(0)
}

/// Read a query CSV: a header of dimension names and one numeric row per
/// configuration, in natural units.
fn read_query_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read queries '{}': {e}", path.display()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| format!("queries '{}': {e}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = record.map_err(|e| format!("queries line {line}: {e}"))?;
        if record.len() != header.len() {
            return Err(format!(
                "queries line {line}: {} cell(s) for {} column(s)",
                record.len(),
                header.len()
            ));
        }
        let mut row = Vec::with_capacity(header.len());
        for (cell, name) in record.iter().zip(&header) {
            let value: f64 = cell.parse().map_err(|_| {
                format!("queries line {line}, column '{name}': '{cell}' is not numeric")
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format!("queries '{}' has no data rows", path.display()));
    }
    Ok((header, rows))
}

/// Match query columns to the model's dimensions by name (any column order)
/// and encode every row. Returns the encoded block plus each row reordered
/// into declaration order for echoing.
fn encode_queries(
    space: &SearchSpace,
    header: &[String],
    rows: &[Vec<f64>],
) -> Result<(Array2<f64>, Vec<Vec<f64>>), String> {
    let names = space.names();
    let matches = header.len() == names.len()
        && names.iter().all(|n| header.iter().any(|h| h == n));
    if !matches {
        return Err(format!(
            "query columns [{}] do not match the model's dimensions [{}]",
            header.join(", "),
            names.join(", ")
        ));
    }
    let positions: Vec<usize> = names
        .iter()
        .map(|n| header.iter().position(|h| h == n).expect("checked above"))
        .collect();
    let mut x = Array2::zeros((rows.len(), names.len()));
    let mut ordered = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let natural: Vec<f64> = positions.iter().map(|&j| row[j]).collect();
        let z = space
            .encode(&natural)
            .map_err(|e| format!("queries line {}: {e}", i + 2))?;
        x.row_mut(i).assign(&z);
        ordered.push(natural);
    }
    Ok((x, ordered))
}

fn render_predictions(names: &[String], inputs: &[Vec<f64>], preds: &[Predictive]) -> String {
    let mut out = String::new();
    out.push_str(&names.join(","));
    out.push_str(",mean,variance,latent_variance\n");
    for (natural, p) in inputs.iter().zip(preds) {
        let mut cells: Vec<String> = natural.iter().map(|v| v.to_string()).collect();
        cells.push(p.mean.to_string());
        cells.push(p.variance.to_string());
        cells.push(p.latent_variance.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
