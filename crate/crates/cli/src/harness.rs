//! Monte-Carlo benchmark over a scenario grid.

use std::time::Instant;

use faultloc_core::fixtures::Benchmark;
use faultloc_core::{
    generate_case, locate_pipeline, Error, ErrorKind, FaultScenario, GroundTruth, LocationResult,
    SolverKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{BenchmarkSpec, RunConfig};
use crate::error::{CliError, Result};

/// Per-scenario seed: `base` XOR the first eight bytes (little endian) of
/// SHA-256 over the scenario key.
pub fn scenario_seed(
    base: u64,
    line_id: &str,
    x: f64,
    noise: f64,
    outliers: f64,
    repetition: usize,
) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(line_id.as_bytes());
    hasher.update([0u8]);
    for value in [x, noise, outliers] {
        hasher.update(value.to_bits().to_le_bytes());
    }
    hasher.update((repetition as u64).to_le_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    base ^ u64::from_le_bytes(head)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The recovered vector was zero; scored as 100 % location error.
    NoFault,
    Error,
}

/// One solver run on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub scenario_id: usize,
    pub line_id: String,
    pub x_true: f64,
    pub noise_rel: f64,
    pub outlier_fraction: f64,
    pub repetition: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub status: RowStatus,
    pub identified_line: Option<String>,
    pub x_hat: Option<f64>,
    pub fault_at_bus: Option<i64>,
    pub x_error_percent: Option<f64>,
    pub normalized_error: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub message: Option<String>,
}

impl BenchmarkRow {
    fn new(id: usize, scenario: &FaultScenario, repetition: usize, solver: SolverKind) -> Self {
        BenchmarkRow {
            scenario_id: id,
            line_id: scenario.line_id.clone(),
            x_true: scenario.x,
            noise_rel: scenario.noise_rel,
            outlier_fraction: scenario.outlier_fraction,
            repetition,
            seed: scenario.seed,
            solver,
            status: RowStatus::Error,
            identified_line: None,
            x_hat: None,
            fault_at_bus: None,
            x_error_percent: None,
            normalized_error: None,
            iterations: None,
            converged: None,
            message: None,
        }
    }

    fn scored(mut self, result: &LocationResult) -> Self {
        self.status = RowStatus::Ok;
        self.identified_line = Some(result.line_id.clone());
        self.x_hat = Some(result.x_hat);
        self.fault_at_bus = result.fault_at_bus;
        self.x_error_percent = result.x_error_percent;
        self.normalized_error = result.normalized_recovery_error;
        self.iterations = Some(result.iterations);
        self.converged = Some(result.converged);
        self
    }

    fn no_fault(mut self) -> Self {
        self.status = RowStatus::NoFault;
        self.x_error_percent = Some(100.0);
        self.normalized_error = Some(1.0);
        self.message = Some(Error::NoFault.to_string());
        self
    }

    fn failed(mut self, err: &Error) -> Self {
        self.status = RowStatus::Error;
        self.message = Some(err.to_string());
        self
    }
}

/// Statistics of one grid cell (line, x, noise, outliers) for one solver.
/// Rows with `error` status are counted but excluded from the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub line_id: String,
    pub solver: SolverKind,
    pub x_true: f64,
    pub noise_rel: f64,
    pub outlier_fraction: f64,
    pub runs: usize,
    pub no_fault: usize,
    pub failed: usize,
    pub line_accuracy: Option<f64>,
    pub mean_error_percent: Option<f64>,
    pub median_error_percent: Option<f64>,
    pub max_error_percent: Option<f64>,
    pub mean_normalized_error: Option<f64>,
    pub median_normalized_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub workers: usize,
    pub scenarios: usize,
    pub solves: usize,
    pub wall_seconds: f64,
    pub mean_scenario_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub spec: BenchmarkSpec,
    pub rows: Vec<BenchmarkRow>,
    pub cells: Vec<CellAggregate>,
    pub runtime: RuntimeStats,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

/// Groups rows by (line, x, noise, outliers, solver) in first-seen order.
pub fn aggregate(rows: &[BenchmarkRow]) -> Vec<CellAggregate> {
    let mut cells: Vec<(CellAggregate, Vec<f64>, Vec<f64>, usize)> = Vec::new();
    for row in rows {
        let same_cell = |c: &CellAggregate| {
            c.line_id == row.line_id
                && c.solver == row.solver
                && c.x_true.to_bits() == row.x_true.to_bits()
                && c.noise_rel.to_bits() == row.noise_rel.to_bits()
                && c.outlier_fraction.to_bits() == row.outlier_fraction.to_bits()
        };
        let k = match cells.iter().position(|(c, ..)| same_cell(c)) {
            Some(k) => k,
            None => {
                cells.push((
                    CellAggregate {
                        line_id: row.line_id.clone(),
                        solver: row.solver,
                        x_true: row.x_true,
                        noise_rel: row.noise_rel,
                        outlier_fraction: row.outlier_fraction,
                        runs: 0,
                        no_fault: 0,
                        failed: 0,
                        line_accuracy: None,
                        mean_error_percent: None,
                        median_error_percent: None,
                        max_error_percent: None,
                        mean_normalized_error: None,
                        median_normalized_error: None,
                    },
                    Vec::new(),
                    Vec::new(),
                    0,
                ));
                cells.len() - 1
            }
        };
        let (cell, errors, normalized, correct) = &mut cells[k];
        cell.runs += 1;
        match row.status {
            RowStatus::Error => cell.failed += 1,
            RowStatus::NoFault => cell.no_fault += 1,
            RowStatus::Ok => {}
        }
        if row.status != RowStatus::Error {
            errors.extend(row.x_error_percent);
            normalized.extend(row.normalized_error);
            *correct += usize::from(row.identified_line.as_deref() == Some(row.line_id.as_str()));
        }
    }
    cells
        .into_iter()
        .map(|(mut cell, errors, normalized, correct)| {
            let scored = cell.runs - cell.failed;
            cell.line_accuracy = (scored > 0).then(|| correct as f64 / scored as f64);
            cell.mean_error_percent = mean(&errors);
            cell.median_error_percent = median(&errors);
            cell.max_error_percent = errors.iter().copied().reduce(f64::max);
            cell.mean_normalized_error = mean(&normalized);
            cell.median_normalized_error = median(&normalized);
            cell
        })
        .collect()
}

/// Runs one scenario through every solver. Measurements are generated once
/// and shared.
pub fn run_scenario(
    bench: &Benchmark,
    id: usize,
    scenario: &FaultScenario,
    repetition: usize,
    solvers: &[SolverKind],
    cfg: &RunConfig,
) -> Vec<BenchmarkRow> {
    let case = generate_case(scenario, &bench.network, &bench.sensing);
    solvers
        .iter()
        .map(|&kind| {
            let row = BenchmarkRow::new(id, scenario, repetition, kind);
            let (meas, injection) = match &case {
                Ok(case) => case,
                Err(e) => return row.failed(e),
            };
            let truth = GroundTruth::new(scenario, injection);
            match locate_pipeline(
                &bench.network,
                &bench.sensing.real,
                &meas.y_corrupted,
                kind,
                cfg.solver_config(kind),
                Some(&truth),
            ) {
                Ok((result, _)) => row.scored(&result),
                Err(e) if e.kind() == ErrorKind::NoFault => row.no_fault(),
                Err(e) => {
                    log::warn!("scenario {id} ({kind}): {e}");
                    row.failed(&e)
                }
            }
        })
        .collect()
}

/// Executes the whole grid. `workers == 0` uses one thread per core.
/// Rows come back sorted by scenario id (grid order) and then by the order
/// of `spec.solvers`, independent of scheduling.
pub fn run_benchmark(
    bench: &Benchmark,
    spec: &BenchmarkSpec,
    cfg: &RunConfig,
    workers: usize,
) -> Result<BenchmarkReport> {
    spec.validate()?;
    let lines: Vec<String> = if spec.lines.is_empty() {
        bench.network.lines().iter().map(|l| l.id.clone()).collect()
    } else {
        for id in &spec.lines {
            bench.network.line(id)?;
        }
        spec.lines.clone()
    };

    let mut grid = Vec::new();
    for line in &lines {
        for &x in &spec.x_values {
            for &noise in &spec.noise_levels {
                for &outliers in &spec.outlier_fractions {
                    for rep in 0..spec.repetitions {
                        let seed = scenario_seed(spec.base_seed, line, x, noise, outliers, rep);
                        grid.push((spec.scenario(line, x, noise, outliers, seed), rep));
                    }
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let started = Instant::now();
    let rows: Vec<BenchmarkRow> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .flat_map_iter(|(id, (scenario, rep))| {
                run_scenario(bench, id, scenario, *rep, &spec.solvers, cfg)
            })
            .collect()
    });
    let wall_seconds = started.elapsed().as_secs_f64();

    let cells = aggregate(&rows);
    let runtime = RuntimeStats {
        workers: pool.current_num_threads(),
        scenarios: grid.len(),
        solves: rows.len(),
        wall_seconds,
        mean_scenario_ms: 1e3 * wall_seconds * pool.current_num_threads() as f64
            / grid.len() as f64,
    };
    Ok(BenchmarkReport {
        spec: spec.clone(),
        rows,
        cells,
        runtime,
    })
}
