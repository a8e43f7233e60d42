//! All solvers on one scenario, with the recovered vectors kept for plotting.

use std::path::Path;

use faultloc_core::fixtures::Benchmark;
use faultloc_core::{
    generate_case, locate_pipeline, ErrorKind, FaultScenario, GroundTruth, MeasurementSet,
    SolverKind,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{create_dir, create_file, write_csv, write_json};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub solver: SolverKind,
    pub no_fault: bool,
    pub identified_line: Option<String>,
    pub line_correct: bool,
    pub x_hat: Option<f64>,
    pub fault_at_bus: Option<i64>,
    pub x_error_percent: f64,
    pub normalized_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub scenario: FaultScenario,
    pub measurements: MeasurementSet,
    /// Real-stacked true injection vector.
    pub theta_true: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
    /// Real-stacked estimate per solver, in `rows` order.
    pub theta_hat: Vec<Vec<f64>>,
}

/// Solves the corrupted measurements of `scenario` with each solver.
pub fn compare_solvers(
    bench: &Benchmark,
    scenario: &FaultScenario,
    solvers: &[SolverKind],
    cfg: &RunConfig,
) -> Result<Comparison> {
    let (measurements, injection) = generate_case(scenario, &bench.network, &bench.sensing)?;
    let truth = GroundTruth::new(scenario, &injection);
    let mut rows = Vec::new();
    let mut theta_hat = Vec::new();
    for &kind in solvers {
        let solver_cfg = cfg.solver_config(kind);
        match locate_pipeline(
            &bench.network,
            &bench.sensing.real,
            &measurements.y_corrupted,
            kind,
            solver_cfg,
            Some(&truth),
        ) {
            Ok((result, recovery)) => {
                rows.push(ComparisonRow {
                    solver: kind,
                    no_fault: false,
                    identified_line: Some(result.line_id),
                    line_correct: result.line_correct == Some(true),
                    x_hat: Some(result.x_hat),
                    fault_at_bus: result.fault_at_bus,
                    x_error_percent: result.x_error_percent.unwrap_or(100.0),
                    normalized_error: result.normalized_recovery_error.unwrap_or(f64::NAN),
                    iterations: recovery.iterations,
                    converged: recovery.converged,
                    lambda: recovery.lambda,
                });
                theta_hat.push(recovery.theta);
            }
            Err(e) if e.kind() == ErrorKind::NoFault => {
                // The estimate is identically zero.
                let recovery = faultloc_core::solve(
                    kind,
                    &bench.sensing.real,
                    &measurements.y_corrupted,
                    solver_cfg,
                )?;
                rows.push(ComparisonRow {
                    solver: kind,
                    no_fault: true,
                    identified_line: None,
                    line_correct: false,
                    x_hat: None,
                    fault_at_bus: None,
                    x_error_percent: 100.0,
                    normalized_error: 1.0,
                    iterations: recovery.iterations,
                    converged: recovery.converged,
                    lambda: recovery.lambda,
                });
                theta_hat.push(recovery.theta);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Comparison {
        scenario: scenario.clone(),
        measurements,
        theta_true: truth.theta,
        rows,
        theta_hat,
    })
}

#[derive(Serialize)]
struct ThetaRecord {
    index: usize,
    bus_id: i64,
    part: &'static str,
    theta_hat: f64,
    theta_true: f64,
}

#[derive(Serialize)]
struct ComparisonDocument<'a> {
    scenario: &'a FaultScenario,
    outlier_indices: &'a [usize],
    solvers: &'a [ComparisonRow],
}

/// Writes `comparison.csv`, `comparison.json`, `measurements.csv` and one
/// `theta_<solver>.csv` dump (2N entries) per solver.
pub fn write_comparison(dir: &Path, bench: &Benchmark, comparison: &Comparison) -> Result<()> {
    create_dir(dir)?;
    write_csv(&dir.join("comparison.csv"), &comparison.rows)?;
    write_json(
        &dir.join("comparison.json"),
        &ComparisonDocument {
            scenario: &comparison.scenario,
            outlier_indices: &comparison.measurements.outlier_indices,
            solvers: &comparison.rows,
        },
    )?;
    let path = dir.join("measurements.csv");
    comparison
        .measurements
        .write_csv(create_file(&path)?)
        .map_err(|e| CliError::Input { path, source: e })?;

    let buses = bench.network.bus_count();
    for (row, theta) in comparison.rows.iter().zip(&comparison.theta_hat) {
        let records: Vec<ThetaRecord> = theta
            .iter()
            .zip(&comparison.theta_true)
            .enumerate()
            .map(|(index, (&hat, &truth))| ThetaRecord {
                index,
                bus_id: bench.network.bus_id(index % buses),
                part: if index < buses { "re" } else { "im" },
                theta_hat: hat,
                theta_true: truth,
            })
            .collect();
        write_csv(&dir.join(format!("theta_{}.csv", row.solver)), &records)?;
    }
    Ok(())
}
