//! Run configuration: solver settings, a single scenario, and the benchmark
//! grid, all read from one JSON document.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use faultloc_core::serde_complex;
use faultloc_core::{FaultScenario, NoiseModel, SolverConfig, SolverKind, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Settings shared by every solver.
    pub solver: SolverConfig,
    /// Complete per-solver replacements for `solver`, keyed by solver name.
    pub solver_overrides: BTreeMap<String, SolverConfig>,
    pub scenario: Option<FaultScenario>,
    pub benchmark: Option<BenchmarkSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Input {
            path: path.to_owned(),
            source: e.into(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        for (name, cfg) in &self.solver_overrides {
            name.parse::<SolverKind>()?;
            cfg.validate()?;
        }
        if let Some(spec) = &self.benchmark {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn solver_config(&self, kind: SolverKind) -> &SolverConfig {
        self.solver_overrides
            .iter()
            .find(|(name, _)| name.parse::<SolverKind>().ok() == Some(kind))
            .map_or(&self.solver, |(_, cfg)| cfg)
    }
}

fn default_fault_current() -> C64 {
    FaultScenario::new("", 0.5).fault_current
}

fn default_noise_levels() -> Vec<f64> {
    vec![0.01]
}

fn default_outlier_fractions() -> Vec<f64> {
    vec![0.0]
}

fn default_x_values() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.9]
}

fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::Robust]
}

fn one() -> usize {
    1
}

fn unit_scale() -> f64 {
    1.0
}

/// Scenario grid for the Monte-Carlo harness:
/// lines × x values × noise levels × outlier fractions × repetitions, each
/// solved by every listed solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    /// Network file; relative paths resolve against the config file.
    #[serde(default)]
    pub network: Option<PathBuf>,
    #[serde(default)]
    pub sensors: Option<PathBuf>,
    /// Bundled benchmark name, used when no files are given.
    #[serde(default)]
    pub fixture: Option<String>,
    /// Faulted lines; empty means every line of the network.
    #[serde(default)]
    pub lines: Vec<String>,
    #[serde(default = "default_x_values")]
    pub x_values: Vec<f64>,
    #[serde(default = "default_noise_levels")]
    pub noise_levels: Vec<f64>,
    #[serde(default = "default_outlier_fractions")]
    pub outlier_fractions: Vec<f64>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(with = "serde_complex", default = "default_fault_current")]
    pub fault_current: C64,
    #[serde(default = "unit_scale")]
    pub outlier_scale: f64,
    #[serde(default)]
    pub noise_model: NoiseModel,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            network: None,
            sensors: None,
            fixture: None,
            lines: Vec::new(),
            x_values: default_x_values(),
            noise_levels: default_noise_levels(),
            outlier_fractions: default_outlier_fractions(),
            repetitions: 1,
            solvers: default_solvers(),
            base_seed: 0,
            fault_current: default_fault_current(),
            outlier_scale: 1.0,
            noise_model: NoiseModel::Component,
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(CliError::Usage(format!("benchmark: {msg}")));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1");
        }
        if self.x_values.is_empty()
            || self.noise_levels.is_empty()
            || self.outlier_fractions.is_empty()
        {
            return fail("x_values, noise_levels and outlier_fractions must be non-empty");
        }
        if self.solvers.is_empty() {
            return fail("solver list is empty");
        }
        if self.network.is_some() != self.sensors.is_some() {
            return fail("network and sensors must be given together");
        }
        // Every combination must form a valid scenario.
        for &x in &self.x_values {
            for &noise in &self.noise_levels {
                for &outliers in &self.outlier_fractions {
                    self.scenario("grid", x, noise, outliers, 0).validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn scenario(
        &self,
        line: &str,
        x: f64,
        noise: f64,
        outliers: f64,
        seed: u64,
    ) -> FaultScenario {
        FaultScenario {
            line_id: line.to_owned(),
            x,
            fault_current: self.fault_current,
            noise_rel: noise,
            noise_model: self.noise_model,
            outlier_fraction: outliers,
            outlier_scale: self.outlier_scale,
            seed,
        }
    }

    /// Makes file paths relative to `base` absolute.
    pub fn resolve_paths(&mut self, base: &Path) {
        for path in [&mut self.network, &mut self.sensors].into_iter().flatten() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}
