//! Fault location on transmission networks from a handful of branch-current
//! phasor measurements.
//!
//! The pipeline is:
//!
//! 1. [`netmodel`] assembles the distributed-parameter network, its bus
//!    impedance matrix and the branch-bus sensing matrix that maps bus
//!    current injections to superimposed currents on monitored branches.
//! 2. [`simkit`] synthesizes measurements for a fault at a point along a line
//!    (equivalent terminal injections, noise, gross outliers).
//! 3. [`solvers`] recovers the sparse injection vector, either with the
//!    robust L1-L1 ADMM solver or with the Lasso / Huber FISTA baselines.
//! 4. [`locator`] picks the faulted line from the recovered vector and solves
//!    for the per-unit distance in closed form.

pub mod error;
pub mod fixtures;
pub mod locator;
pub mod netmodel;
pub mod serde_complex;
pub mod simkit;
pub mod solvers;

pub use error::{Error, ErrorKind, Result};
pub use locator::{
    identify_faulted_line, locate_on_line, locate_pipeline, percentage_error, GroundTruth,
    LineEstimate, LocationResult,
};
pub use netmodel::{
    beta_coefficient, build_sensing_matrix, build_ybus, build_zbus, complexify_vector,
    load_network, load_sensors, realify_matrix, realify_vector, Bus, Line, Network, SensingMatrix,
    SensorSet, ZBus,
};
pub use simkit::{
    equivalent_injections, forward_measurements, generate_case, scenario_to_injection,
    FaultScenario, InjectionVector, MeasurementSet, NoiseModel,
};
pub use solvers::{
    huber_fista_solve, lasso_fista_solve, objective_l1l1, oracle_solve_small, soft_threshold,
    solve, yall1_solve, RecoveryResult, SolverConfig, SolverKind, ThresholdMode,
};

/// Complex scalar used throughout (phasors, impedances, admittances).
pub type C64 = num_complex::Complex64;
