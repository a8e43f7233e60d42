//! Shared inputs for the criterion benchmarks.

use faultloc_core::fixtures::Benchmark;
use faultloc_core::{generate_case, FaultScenario, MeasurementSet};

/// Corrupted measurements for a fault at `x` on the first line of `bench`.
pub fn corrupted_case(bench: &Benchmark, x: f64, outliers: f64, seed: u64) -> MeasurementSet {
    let line = &bench.network.lines()[0];
    let scenario = FaultScenario {
        noise_rel: 0.01,
        outlier_fraction: outliers,
        seed,
        ..FaultScenario::new(line.id.clone(), x)
    };
    generate_case(&scenario, &bench.network, &bench.sensing)
        .expect("bundled scenario")
        .0
}
