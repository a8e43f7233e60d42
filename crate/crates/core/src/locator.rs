//! Faulted-line identification and closed-form distance estimation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{Line, Network};
use crate::simkit::{FaultScenario, InjectionVector};
use crate::solvers::{solve, RecoveryResult, SolverConfig, SolverKind};
use crate::C64;

/// Estimates within this distance outside `[0, 1]` are clamped silently
/// (with a log warning); further out they are flagged unreliable.
pub const CLAMP_MARGIN: f64 = 0.05;

/// Relative size below which a terminal injection counts as absent.
pub const BUS_FAULT_RATIO: f64 = 1e-12;

/// Per-unit distance along one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineEstimate {
    /// Distance from the from-bus, clamped to `[0, 1]`.
    pub x: f64,
    /// Real part of the distance formula before clamping.
    pub x_raw: f64,
    /// Imaginary part of the distance formula; zero for exact data.
    pub residual_im: f64,
    pub clamped: bool,
    pub reliable: bool,
}

impl LineEstimate {
    fn exact(x: f64) -> Self {
        LineEstimate {
            x,
            x_raw: x,
            residual_im: 0.0,
            clamped: false,
            reliable: true,
        }
    }
}

/// Inverts the terminal-injection ratio `ΔI_from/ΔI_to` for the fault
/// distance: `x = Re ln[(e^{γd} + r)/(e^{-γd} + r)] / (2γd)` using the
/// principal logarithm. An infinite ratio means a fault at the from-bus.
pub fn locate_on_line(ratio: C64, line: &Line) -> Result<LineEstimate> {
    if ratio.re.is_nan() || ratio.im.is_nan() {
        return Err(Error::NonFinite(format!(
            "injection ratio on line `{}`",
            line.id
        )));
    }
    if ratio.re.is_infinite() || ratio.im.is_infinite() {
        return Ok(LineEstimate::exact(0.0));
    }
    let gd = line.gamma_length();
    let (forward, backward) = (gd.exp(), (-gd).exp());
    let numerator = forward + ratio;
    let denominator = backward + ratio;
    let tiny = |v: C64, reference: C64| v.norm() <= 1e-12 * (reference.norm() + ratio.norm());
    if tiny(denominator, backward) || tiny(numerator, forward) {
        return Err(Error::DegenerateRatio {
            re: ratio.re,
            im: ratio.im,
        });
    }
    let value = (numerator / denominator).ln() / (gd * 2.0);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(format!(
            "distance formula on line `{}`",
            line.id
        )));
    }
    let x_raw = value.re;
    let x = x_raw.clamp(0.0, 1.0);
    let clamped = x != x_raw;
    let reliable = (-CLAMP_MARGIN..=1.0 + CLAMP_MARGIN).contains(&x_raw);
    if clamped && reliable {
        log::warn!("line `{}`: distance {x_raw:.6} clamped to {x}", line.id);
    } else if !reliable {
        log::warn!(
            "line `{}`: distance {x_raw:.6} is outside [0, 1] by more than {CLAMP_MARGIN}",
            line.id
        );
    }
    Ok(LineEstimate {
        x,
        x_raw,
        residual_im: value.im,
        clamped,
        reliable,
    })
}

/// The line whose terminals carry the largest `|θ_i| + |θ_j|`, with that
/// value as a fraction of `‖θ‖₁`. Ties go to the earlier line.
pub fn identify_faulted_line<'a>(theta: &[C64], net: &'a Network) -> Result<(&'a Line, f64)> {
    if theta.len() != net.bus_count() {
        return Err(Error::Dimension(format!(
            "injection vector has {} entries, network has {} buses",
            theta.len(),
            net.bus_count()
        )));
    }
    let total: f64 = theta.iter().map(|v| v.norm()).sum();
    if !total.is_finite() {
        return Err(Error::NonFinite("injection vector".into()));
    }
    if total == 0.0 {
        return Err(Error::NoFault);
    }
    let mut best: Option<(&Line, f64)> = None;
    for line in net.lines() {
        let (i, j) = net.terminals(line);
        let score = theta[i].norm() + theta[j].norm();
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((line, score));
        }
    }
    let (line, score) = best.ok_or(Error::NoFault)?;
    Ok((line, score / total))
}

/// `|x̂ - x|·100`, the location error in percent of line length.
pub fn percentage_error(x_hat: f64, x_true: f64) -> f64 {
    (x_hat - x_true).abs() * 100.0
}

/// Known fault for scoring an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub line_id: String,
    pub x: f64,
    /// Real-stacked true injection vector.
    pub theta: Vec<f64>,
}

impl GroundTruth {
    pub fn new(scenario: &FaultScenario, injection: &InjectionVector) -> Self {
        GroundTruth {
            line_id: scenario.line_id.clone(),
            x: scenario.x,
            theta: injection.realified().as_slice().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationResult {
    pub line_id: String,
    pub x_hat: f64,
    pub x_raw: f64,
    pub residual_im: f64,
    pub clamped: bool,
    pub reliable: bool,
    /// `θ_from/θ_to` on the identified line; absent when `θ_to` vanishes.
    #[serde(with = "crate::serde_complex::option")]
    pub injection_ratio: Option<C64>,
    pub support_score: f64,
    /// Set when only one terminal carries injection: the fault is at that bus.
    pub fault_at_bus: Option<i64>,
    pub solver: SolverKind,
    pub iterations: usize,
    pub converged: bool,
    pub x_true: Option<f64>,
    pub line_correct: Option<bool>,
    /// Location error in percent of line length; 100 when the wrong line was
    /// identified.
    pub x_error_percent: Option<f64>,
    pub normalized_recovery_error: Option<f64>,
}

/// Distance estimate on `line` from a recovered injection vector.
fn estimate_on_line(
    theta: &[C64],
    net: &Network,
    line: &Line,
) -> Result<(LineEstimate, Option<C64>, Option<i64>)> {
    let (i, j) = net.terminals(line);
    let peak = theta.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let threshold = BUS_FAULT_RATIO * peak;
    if theta[j].norm() < threshold {
        return Ok((LineEstimate::exact(0.0), None, Some(line.from_bus)));
    }
    let ratio = theta[i] / theta[j];
    if theta[i].norm() < threshold {
        return Ok((LineEstimate::exact(1.0), Some(ratio), Some(line.to_bus)));
    }
    Ok((locate_on_line(ratio, line)?, Some(ratio), None))
}

/// Solve, identify the line, estimate the distance, and score against
/// `truth` when given.
pub fn locate_pipeline(
    net: &Network,
    sensing_real: &DMatrix<f64>,
    y: &[f64],
    solver: SolverKind,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
) -> Result<(LocationResult, RecoveryResult)> {
    let recovery = solve(solver, sensing_real, y, cfg)?;
    let (line, support_score) = identify_faulted_line(&recovery.theta_complex, net)?;
    let (estimate, injection_ratio, fault_at_bus) =
        estimate_on_line(&recovery.theta_complex, net, line)?;

    let mut result = LocationResult {
        line_id: line.id.clone(),
        x_hat: estimate.x,
        x_raw: estimate.x_raw,
        residual_im: estimate.residual_im,
        clamped: estimate.clamped,
        reliable: estimate.reliable,
        injection_ratio,
        support_score,
        fault_at_bus,
        solver,
        iterations: recovery.iterations,
        converged: recovery.converged,
        x_true: None,
        line_correct: None,
        x_error_percent: None,
        normalized_recovery_error: None,
    };
    if let Some(truth) = truth {
        if truth.theta.len() != recovery.theta.len() {
            return Err(Error::Dimension(format!(
                "true injection vector has {} entries, estimate has {}",
                truth.theta.len(),
                recovery.theta.len()
            )));
        }
        let correct = truth.line_id == line.id;
        let norm: f64 = truth.theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff: f64 = truth
            .theta
            .iter()
            .zip(&recovery.theta)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        result.x_true = Some(truth.x);
        result.line_correct = Some(correct);
        result.x_error_percent = Some(if correct {
            percentage_error(estimate.x, truth.x)
        } else {
            100.0
        });
        result.normalized_recovery_error = Some(if norm > 0.0 { diff / norm } else { diff });
    }
    Ok((result, recovery))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::simkit::equivalent_injections;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn unit_ratio_is_the_midpoint() {
        let bench = fixtures::six_bus().unwrap();
        for line in bench.network.lines() {
            let est = locate_on_line(c(1.0, 0.0), line).unwrap();
            assert!((est.x - 0.5).abs() < 1e-12);
            assert!(est.residual_im.abs() < 1e-12);
        }
    }

    #[test]
    fn limiting_ratios() {
        let line = &fixtures::six_bus().unwrap().network.lines()[0].clone();
        assert!((locate_on_line(c(1e-15, 0.0), line).unwrap().x - 1.0).abs() < 1e-9);
        assert!(locate_on_line(c(1e15, 0.0), line).unwrap().x.abs() < 1e-9);
        assert_eq!(locate_on_line(c(f64::INFINITY, 0.0), line).unwrap().x, 0.0);
        assert!(locate_on_line(c(f64::NAN, 0.0), line).is_err());
    }

    #[test]
    fn round_trip_on_table_distances() {
        let bench = fixtures::six_bus().unwrap();
        for line in bench.network.lines() {
            for x in [0.1, 0.3, 0.5, 0.9] {
                let (a, b) = equivalent_injections(line, x, c(700.0, -300.0)).unwrap();
                let est = locate_on_line(a / b, line).unwrap();
                assert!((est.x - x).abs() <= 1e-9);
                assert!(!est.clamped && est.reliable);
            }
        }
    }

    #[test]
    fn pole_is_degenerate() {
        let line = fixtures::six_bus().unwrap().network.lines()[2].clone();
        let pole = -(-line.gamma_length()).exp();
        assert!(matches!(
            locate_on_line(pole, &line),
            Err(Error::DegenerateRatio { .. })
        ));
        let zero = -line.gamma_length().exp();
        assert!(matches!(
            locate_on_line(zero, &line),
            Err(Error::DegenerateRatio { .. })
        ));
    }

    #[test]
    fn clamping_flags() {
        let line = fixtures::six_bus().unwrap().network.lines()[0].clone();
        let ratio_at = |x: f64| {
            let gd = line.gamma_length();
            ((gd * (1.0 - x)).sinh()) / (gd * x).sinh()
        };
        let slightly = locate_on_line(ratio_at(1.02), &line).unwrap();
        assert_eq!(slightly.x, 1.0);
        assert!(slightly.clamped && slightly.reliable);
        assert!((slightly.x_raw - 1.02).abs() < 1e-9);
        let far = locate_on_line(ratio_at(-0.2), &line).unwrap();
        assert_eq!(far.x, 0.0);
        assert!(far.clamped && !far.reliable);
    }

    #[test]
    fn identification() {
        let net = fixtures::six_bus().unwrap().network;
        let zero = vec![c(0.0, 0.0); 6];
        assert!(matches!(
            identify_faulted_line(&zero, &net),
            Err(Error::NoFault)
        ));
        let line = &net.lines()[4];
        let (i, j) = net.terminals(line);
        let mut theta = zero.clone();
        theta[i] = c(3.0, 1.0);
        theta[j] = c(-1.0, 2.0);
        let (found, score) = identify_faulted_line(&theta, &net).unwrap();
        assert_eq!(found.id, line.id);
        assert!((score - 1.0).abs() < 1e-15);
        assert!(identify_faulted_line(&theta[..5], &net).is_err());
    }

    #[test]
    fn percentage_examples() {
        assert_eq!(percentage_error(0.5, 0.5), 0.0);
        assert!((percentage_error(0.1004, 0.1) - 0.04).abs() < 1e-9);
        assert!((percentage_error(0.3255, 0.1) - 22.55).abs() < 1e-9);
    }
}
