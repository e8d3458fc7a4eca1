//! Results, traces and summaries on disk.
//!
//! Results and traces are CSV, the summary is a JSON array. Floats are
//! written in shortest round-trip form, rows in canonical order, with LF line
//! endings, so the same records always produce the same bytes. The run
//! timestamp lives only in `metadata.json`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::{ExperimentPlan, RunRecord, SummaryRow};
use crate::swarm::Algorithm;

pub const DEFAULT_TRACE_STRIDE: usize = 10;

pub const RESULTS_FILE: &str = "results.csv";
pub const TRACES_FILE: &str = "traces.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {message}")]
    IoFailure { path: PathBuf, message: String },
    #[error("trace stride must be at least 1")]
    ZeroStride,
}

fn io_failure(path: &Path, err: impl std::fmt::Display) -> ReportError {
    ReportError::IoFailure {
        path: path.to_owned(),
        message: err.to_string(),
    }
}

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub function: String,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub run: u32,
    pub final_fitness: f64,
    pub wall_seconds: f64,
    pub eval_count: usize,
}

impl From<&RunRecord> for ResultRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            function: r.function.clone(),
            dimension: r.dimension,
            algorithm: r.algorithm,
            run: r.run_index,
            final_fitness: r.final_fitness,
            wall_seconds: r.wall_seconds,
            eval_count: r.eval_count,
        }
    }
}

/// One line of the traces file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub function: String,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub run: u32,
    pub iteration: usize,
    pub gbest_fitness: f64,
}

fn canonical(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.function, a.dimension, a.algorithm, a.run_index)
            .cmp(&(&b.function, b.dimension, b.algorithm, b.run_index))
    });
    sorted
}

fn write_rows<T: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<(), ReportError> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    // The header is written by hand so an empty file still carries it.
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| io_failure(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ReportError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_failure(path, e))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| io_failure(path, e))
}

pub const RESULTS_HEADER: [&str; 7] = [
    "function",
    "dimension",
    "algorithm",
    "run",
    "final_fitness",
    "wall_seconds",
    "eval_count",
];

pub const TRACES_HEADER: [&str; 6] = [
    "function",
    "dimension",
    "algorithm",
    "run",
    "iteration",
    "gbest_fitness",
];

/// One row per record, in canonical order.
pub fn write_results(records: &[RunRecord], path: &Path) -> Result<(), ReportError> {
    write_rows(
        path,
        &RESULTS_HEADER,
        canonical(records).into_iter().map(ResultRow::from),
    )
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, ReportError> {
    read_rows(path)
}

/// Iterations kept at a given stride: every `stride`-th one plus the last.
pub fn trace_iterations(trace_len: usize, stride: usize) -> Vec<usize> {
    if trace_len == 0 {
        return Vec::new();
    }
    let last = trace_len - 1;
    let mut its: Vec<usize> = (0..=last).step_by(stride.max(1)).collect();
    if its.last() != Some(&last) {
        its.push(last);
    }
    its
}

/// Long-format global best traces, subsampled by `stride` but always keeping
/// iteration 0 and the final iteration.
pub fn write_traces(records: &[RunRecord], path: &Path, stride: usize) -> Result<(), ReportError> {
    if stride == 0 {
        return Err(ReportError::ZeroStride);
    }
    let rows = canonical(records).into_iter().flat_map(|r| {
        trace_iterations(r.trace.len(), stride)
            .into_iter()
            .map(move |t| TraceRow {
                function: r.function.clone(),
                dimension: r.dimension,
                algorithm: r.algorithm,
                run: r.run_index,
                iteration: t,
                gbest_fitness: r.trace[t],
            })
    });
    write_rows(path, &TRACES_HEADER, rows)
}

pub fn read_traces(path: &Path) -> Result<Vec<TraceRow>, ReportError> {
    read_rows(path)
}

/// Pretty-printed JSON array, keys in [`SummaryRow`] field order.
pub fn write_summary(summary: &[SummaryRow], path: &Path) -> Result<(), ReportError> {
    write_json(summary, path)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_failure(path, e))
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<(), ReportError> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_failure(path, e))?;
    w.write_all(b"\n").map_err(|e| io_failure(path, e))?;
    w.flush().map_err(|e| io_failure(path, e))
}

/// Tool version, seed, timestamp and the plan that produced a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub master_seed: u64,
    pub unix_timestamp: u64,
    pub config: BTreeMap<String, serde_json::Value>,
}

impl Metadata {
    pub fn for_plan(plan: &ExperimentPlan) -> Self {
        let s = &plan.settings;
        let mut config = BTreeMap::new();
        let mut put = |k: &str, v: serde_json::Value| {
            config.insert(k.to_owned(), v);
        };
        put("functions", plan.functions.clone().into());
        put("dimensions", plan.dimensions.clone().into());
        put(
            "algorithms",
            plan.algorithms
                .iter()
                .map(|a| a.as_str())
                .collect::<Vec<_>>()
                .into(),
        );
        put("runs", plan.runs.into());
        put("workers", plan.workers.into());
        put("timing", plan.timing.into());
        put(
            "settings",
            serde_json::to_value(s).unwrap_or(serde_json::Value::Null),
        );
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            master_seed: plan.master_seed,
            unix_timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
        }
    }
}

/// Paths of one experiment's output files.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub results_csv_path: PathBuf,
    pub traces_csv_path: PathBuf,
    pub summary_json_path: PathBuf,
    pub metadata_path: PathBuf,
    pub metadata: Metadata,
}

impl ReportBundle {
    pub fn in_dir(dir: &Path, metadata: Metadata) -> Self {
        Self {
            results_csv_path: dir.join(RESULTS_FILE),
            traces_csv_path: dir.join(TRACES_FILE),
            summary_json_path: dir.join(SUMMARY_FILE),
            metadata_path: dir.join(METADATA_FILE),
            metadata,
        }
    }

    /// Creates the directory if needed and writes all four files.
    pub fn write(
        &self,
        records: &[RunRecord],
        summary: &[SummaryRow],
        trace_stride: usize,
    ) -> Result<(), ReportError> {
        if let Some(dir) = self.results_csv_path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        }
        write_results(records, &self.results_csv_path)?;
        write_traces(records, &self.traces_csv_path, trace_stride)?;
        write_summary(summary, &self.summary_json_path)?;
        write_json(&self.metadata, &self.metadata_path)
    }
}
