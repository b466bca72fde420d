//! Result persistence: a deterministic per-iteration CSV plus a JSON
//! manifest carrying the configuration echo, content hashes, and the only
//! timestamp in the output set (so reruns stay byte-comparable on the CSVs).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::BenchError;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

/// One optimization iteration of one run, in the shared output schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub task: String,
    pub seed: u64,
    pub iteration: usize,
    pub incumbent: f64,
    pub regret: f64,
    pub wall_time_ms: f64,
}

/// Canonical row order: method, then task, then seed, then iteration.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (&a.method, &a.task, a.seed, a.iteration).cmp(&(
            &b.method,
            &b.task,
            b.seed,
            b.iteration,
        ))
    });
}

/// Write rows in canonical order. Floats use the shortest representation
/// that round-trips, so equal runs produce byte-identical files.
pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<(), BenchError> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut out = String::new();
    out.push_str("method,task,seed,iteration,incumbent,regret,wall_time_ms\n");
    for r in &sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method, r.task, r.seed, r.iteration, r.incumbent, r.regret, r.wall_time_ms
        ));
    }
    std::fs::write(path, out).map_err(|e| BenchError::io(path.display(), e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| BenchError::InvalidConfig(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<ResultRow>().enumerate() {
        rows.push(record.map_err(|e| BenchError::Schema {
            line: i + 2,
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn sha256_file(path: &Path) -> Result<String, BenchError> {
    let bytes = std::fs::read(path).map_err(|e| BenchError::io(path.display(), e))?;
    Ok(sha256_hex(&bytes))
}

/// Companion metadata for a result set: configuration echo, content hashes
/// of every produced file, failed-run labels, and the creation time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub experiment: serde_json::Value,
    /// File name -> sha256 of its contents.
    pub files: BTreeMap<String, String>,
    pub failed_runs: Vec<String>,
    /// Seconds since the Unix epoch; deliberately the only timestamp in the
    /// output set.
    pub unix_time_s: u64,
}

impl Manifest {
    pub fn new(experiment: serde_json::Value, failed_runs: Vec<String>) -> Self {
        let unix_time_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema_version: RESULTS_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment,
            files: BTreeMap::new(),
            failed_runs,
            unix_time_s,
        }
    }

    /// Hash a produced file and record it under its file name.
    pub fn add_file(&mut self, path: &Path) -> Result<(), BenchError> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.files.insert(name, sha256_file(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), BenchError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        let mut file =
            std::fs::File::create(path).map_err(|e| BenchError::io(path.display(), e))?;
        writeln!(file, "{json}").map_err(|e| BenchError::io(path.display(), e))
    }
}
