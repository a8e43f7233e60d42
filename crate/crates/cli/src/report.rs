//! CSV and JSON output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use faultloc_core::SolverKind;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::harness::{BenchmarkReport, BenchmarkRow, CellAggregate};

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create_file(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Core(e.into()))?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create_file(path)?);
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| CliError::Core(e.into()))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_rows(path: &Path) -> Result<Vec<BenchmarkRow>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Input {
            path: path.to_owned(),
            source: e.into(),
        })
}

/// Mean location error laid out with one row per (line, solver, noise,
/// outliers) and one column per fault distance.
pub fn write_table(path: &Path, report: &BenchmarkReport) -> Result<()> {
    let xs = &report.spec.x_values;
    let mut writer = csv::Writer::from_writer(create_file(path)?);
    let header = ["line_id", "solver", "noise_rel", "outlier_fraction"]
        .into_iter()
        .map(str::to_owned)
        .chain(xs.iter().map(|x| format!("x={x}")));
    writer
        .write_record(header)
        .map_err(|e| CliError::Core(e.into()))?;

    let mut keys: Vec<(&str, SolverKind, f64, f64)> = Vec::new();
    for c in &report.cells {
        let key = (
            c.line_id.as_str(),
            c.solver,
            c.noise_rel,
            c.outlier_fraction,
        );
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let cell = |key: &(&str, SolverKind, f64, f64), x: f64| -> Option<&CellAggregate> {
        report.cells.iter().find(|c| {
            (
                c.line_id.as_str(),
                c.solver,
                c.noise_rel,
                c.outlier_fraction,
            ) == *key
                && c.x_true.to_bits() == x.to_bits()
        })
    };
    for key in &keys {
        let record = [
            key.0.to_owned(),
            key.1.to_string(),
            key.2.to_string(),
            key.3.to_string(),
        ]
        .into_iter()
        .chain(xs.iter().map(|&x| {
            cell(key, x)
                .and_then(|c| c.mean_error_percent)
                .map_or_else(String::new, |v| v.to_string())
        }));
        writer
            .write_record(record)
            .map_err(|e| CliError::Core(e.into()))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct SolverSummary {
    solver: SolverKind,
    runs: usize,
    no_fault: usize,
    failed: usize,
    mean_error_percent: Option<f64>,
    median_error_percent: Option<f64>,
    max_error_percent: Option<f64>,
    median_normalized_error: Option<f64>,
    worst_cell_mean_error_percent: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    spec: &'a crate::config::BenchmarkSpec,
    rows: usize,
    cells: usize,
    solvers: Vec<SolverSummary>,
}

fn summarize(report: &BenchmarkReport) -> Summary<'_> {
    let solvers = report
        .spec
        .solvers
        .iter()
        .map(|&kind| {
            let rows: Vec<&BenchmarkRow> =
                report.rows.iter().filter(|r| r.solver == kind).collect();
            let scored: Vec<&&BenchmarkRow> = rows
                .iter()
                .filter(|r| r.status != crate::harness::RowStatus::Error)
                .collect();
            let errors: Vec<f64> = scored.iter().filter_map(|r| r.x_error_percent).collect();
            let normalized: Vec<f64> = scored.iter().filter_map(|r| r.normalized_error).collect();
            SolverSummary {
                solver: kind,
                runs: rows.len(),
                no_fault: rows
                    .iter()
                    .filter(|r| r.status == crate::harness::RowStatus::NoFault)
                    .count(),
                failed: rows.len() - scored.len(),
                mean_error_percent: crate::harness::mean(&errors),
                median_error_percent: crate::harness::median(&errors),
                max_error_percent: errors.iter().copied().reduce(f64::max),
                median_normalized_error: crate::harness::median(&normalized),
                worst_cell_mean_error_percent: report
                    .cells
                    .iter()
                    .filter(|c| c.solver == kind)
                    .filter_map(|c| c.mean_error_percent)
                    .reduce(f64::max),
            }
        })
        .collect();
    Summary {
        spec: &report.spec,
        rows: report.rows.len(),
        cells: report.cells.len(),
        solvers,
    }
}

/// Paths of the files written by [`write_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub rows: PathBuf,
    pub aggregate: PathBuf,
    pub table: PathBuf,
    pub summary: PathBuf,
    pub runtime: PathBuf,
}

impl ReportFiles {
    pub fn in_dir(dir: &Path) -> Self {
        ReportFiles {
            rows: dir.join("rows.csv"),
            aggregate: dir.join("aggregate.csv"),
            table: dir.join("table.csv"),
            summary: dir.join("summary.json"),
            runtime: dir.join("runtime.json"),
        }
    }
}

/// Writes rows, aggregates, the distance table and the summary, all
/// deterministic, plus timing in a separate `runtime.json`.
pub fn write_report(dir: &Path, report: &BenchmarkReport) -> Result<ReportFiles> {
    create_dir(dir)?;
    let files = ReportFiles::in_dir(dir);
    write_csv(&files.rows, &report.rows)?;
    write_csv(&files.aggregate, &report.cells)?;
    write_table(&files.table, report)?;
    write_json(&files.summary, &summarize(report))?;
    write_json(&files.runtime, &report.runtime)?;
    Ok(files)
}
