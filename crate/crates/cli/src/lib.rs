//! Command-line front end for `faultloc-core`: measurement synthesis, single
//! fault location, the Monte-Carlo benchmark harness and solver comparison.

pub mod compare;
pub mod config;
pub mod error;
pub mod harness;
pub mod report;

pub use config::{BenchmarkSpec, RunConfig};
pub use error::{CliError, Result};
pub use harness::{
    run_benchmark, scenario_seed, BenchmarkReport, BenchmarkRow, CellAggregate, RowStatus,
};
