//! Sparse recovery of the real-stacked injection vector from `y = Bθ + e`.
//!
//! All solvers rescale the data to `‖y‖∞ = 1` before iterating and map the
//! estimate back afterwards, so `rho`, `tau`, `tol` and `huber_delta_rel` are
//! interpreted on the rescaled problem. Absolute `lambda` / `huber_delta`
//! values are in the units of `y` and converted internally.

mod fista;
mod oracle;
mod robust;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::complexify_vector;
use crate::C64;

pub use fista::{huber_fista_solve, lasso_fista_solve};
pub use oracle::oracle_solve_small;
pub use robust::yall1_solve;

/// Shrinkage constants used by the robust ADMM iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Thresholds from the augmented Lagrangian of the L1-L1 problem:
    /// `v` shrinks by `1/ρ`, `θ` by `λτ`, with `b = θ - τρBᵀ(a - v)`.
    #[default]
    Canonical,
    /// `v` shrinks by `ρ/λ`, `θ` by `τ/ρ`, with `b = θ - τBᵀ(a - v)`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// L1-L1 ADMM.
    #[serde(alias = "yall1")]
    Robust,
    Lasso,
    Huber,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Robust, SolverKind::Huber, SolverKind::Lasso];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Robust => "robust",
            SolverKind::Lasso => "lasso",
            SolverKind::Huber => "huber",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "robust" | "yall1" => Ok(SolverKind::Robust),
            "lasso" => Ok(SolverKind::Lasso),
            "huber" => Ok(SolverKind::Huber),
            other => Err(Error::invalid(
                "solver",
                format!("unknown solver `{other}` (expected robust, lasso or huber)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Absolute regularization weight. Overrides `lambda_rel` when set.
    pub lambda: Option<f64>,
    /// λ as a fraction of `‖Bᵀy‖∞` on the rescaled data.
    pub lambda_rel: f64,
    pub rho: f64,
    /// Step size. Defaults to `0.99/(ρσ²)` (canonical ADMM) or `0.99/σ²`
    /// (literal ADMM), σ the largest singular value of B.
    pub tau: Option<f64>,
    /// Absolute Huber threshold. Overrides `huber_delta_rel` when set.
    pub huber_delta: Option<f64>,
    /// Huber threshold on the rescaled residual.
    pub huber_delta_rel: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub threshold_mode: ThresholdMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: None,
            lambda_rel: 0.01,
            rho: 1.0,
            tau: None,
            huber_delta: None,
            huber_delta_rel: 0.02,
            max_iter: 10_000,
            tol: 1e-8,
            threshold_mode: ThresholdMode::Canonical,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    "solver config",
                    format!("{name} must be positive, got {v}"),
                ))
            }
        };
        if let Some(l) = self.lambda {
            positive("lambda", l)?;
        }
        positive("lambda_rel", self.lambda_rel)?;
        positive("rho", self.rho)?;
        if let Some(t) = self.tau {
            positive("tau", t)?;
        }
        if let Some(d) = self.huber_delta {
            positive("huber_delta", d)?;
        }
        positive("huber_delta_rel", self.huber_delta_rel)?;
        positive("tol", self.tol)?;
        if self.max_iter == 0 {
            return Err(Error::invalid(
                "solver config",
                "max_iter must be at least 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    /// Real-stacked estimate, length 2N.
    pub theta: Vec<f64>,
    #[serde(skip)]
    pub theta_complex: Vec<C64>,
    pub iterations: usize,
    /// Value of the minimized objective after each iteration, in the units
    /// of the input data. L1-L1 for the robust solver, squared/Huber loss
    /// plus L1 penalty for the baselines.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    /// The absolute λ used.
    pub lambda: f64,
}

impl RecoveryResult {
    fn from_normalized(
        theta_n: DVector<f64>,
        scale: f64,
        iterations: usize,
        objective_trace: Vec<f64>,
        converged: bool,
        lambda: f64,
    ) -> Result<Self> {
        let theta: Vec<f64> = theta_n.iter().map(|v| v * scale).collect();
        let theta_complex = complexify_vector(&theta)?;
        Ok(RecoveryResult {
            theta,
            theta_complex,
            iterations,
            objective_trace,
            converged,
            lambda,
        })
    }

    fn zero(cols: usize) -> Result<Self> {
        Self::from_normalized(DVector::zeros(cols), 1.0, 1, vec![0.0], true, 0.0)
    }
}

/// Component-wise `sign(v)·max(|v| - t, 0)`.
pub fn soft_threshold(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|&x| shrink(x, t)).collect()
}

#[inline]
pub(crate) fn shrink(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

pub(crate) fn shrink_in_place(v: &mut DVector<f64>, t: f64) {
    v.apply(|x| *x = shrink(*x, t));
}

/// `‖Bθ - y‖₁ + λ‖θ‖₁`.
pub fn objective_l1l1(b: &DMatrix<f64>, y: &[f64], theta: &[f64], lambda: f64) -> Result<f64> {
    check_dims(b, y)?;
    if theta.len() != b.ncols() {
        return Err(Error::Dimension(format!(
            "theta has {} entries, matrix has {} columns",
            theta.len(),
            b.ncols()
        )));
    }
    let r = b * DVector::from_column_slice(theta) - DVector::from_column_slice(y);
    Ok(r.lp_norm(1) + lambda * theta.iter().map(|v| v.abs()).sum::<f64>())
}

pub(crate) fn check_dims(b: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if b.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but y has {} entries",
            b.nrows(),
            y.len()
        )));
    }
    if b.ncols() == 0 {
        return Err(Error::Dimension("matrix has no columns".into()));
    }
    if b.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("solver input".into()));
    }
    Ok(())
}

/// Largest squared singular value of `b` by power iteration on `BᵀB`.
pub(crate) fn spectral_norm_sq(b: &DMatrix<f64>) -> f64 {
    const MAX_ITER: usize = 100;
    const REL_TOL: f64 = 1e-6;
    let n = b.ncols();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // For unit v both vᵀBᵀBv and ‖BᵀBv‖ approach σ² from below; the
    // latter is never smaller, so it is the one returned.
    let mut estimate = 0.0;
    for _ in 0..MAX_ITER {
        let w = b.tr_mul(&(b * &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - estimate).abs() <= REL_TOL * next.abs() {
            return norm;
        }
        estimate = next;
    }
    b.tr_mul(&(b * &v)).norm()
}

/// Data rescaled to unit infinity norm.
pub(crate) struct Normalized {
    pub y: DVector<f64>,
    pub scale: f64,
}

pub(crate) fn normalize(y: &[f64]) -> Option<Normalized> {
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    (scale > 0.0).then(|| Normalized {
        y: DVector::from_iterator(y.len(), y.iter().map(|v| v / scale)),
        scale,
    })
}

/// Relative λ on rescaled data: `lambda_rel · ‖Bᵀy‖∞`.
pub(crate) fn relative_lambda(b: &DMatrix<f64>, y: &DVector<f64>, lambda_rel: f64) -> f64 {
    lambda_rel * b.tr_mul(y).amax()
}

pub(crate) fn inf_norm_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Runs the selected solver.
pub fn solve(
    kind: SolverKind,
    b: &DMatrix<f64>,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<RecoveryResult> {
    match kind {
        SolverKind::Robust => yall1_solve(b, y, cfg),
        SolverKind::Lasso => lasso_fista_solve(b, y, cfg),
        SolverKind::Huber => huber_fista_solve(b, y, cfg),
    }
}
