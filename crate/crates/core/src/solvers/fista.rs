use nalgebra::{DMatrix, DVector};

use super::{
    check_dims, inf_norm_diff, normalize, relative_lambda, shrink_in_place, spectral_norm_sq,
    RecoveryResult, SolverConfig,
};
use crate::error::{Error, Result};

/// Smooth data-fit term minimized by FISTA.
#[derive(Clone, Copy)]
enum Loss {
    Squared,
    Huber { delta: f64 },
}

impl Loss {
    fn value(self, r: &DVector<f64>) -> f64 {
        match self {
            Loss::Squared => 0.5 * r.norm_squared(),
            Loss::Huber { delta } => r
                .iter()
                .map(|x| {
                    let a = x.abs();
                    if a <= delta {
                        0.5 * x * x
                    } else {
                        delta * (a - 0.5 * delta)
                    }
                })
                .sum(),
        }
    }

    fn gradient(self, mut r: DVector<f64>) -> DVector<f64> {
        if let Loss::Huber { delta } = self {
            r.apply(|x| *x = x.clamp(-delta, delta));
        }
        r
    }
}

/// Lasso, `min ½‖Bθ - y‖₂² + λ‖θ‖₁`, by FISTA with step `1/σ²`.
pub fn lasso_fista_solve(
    b: &DMatrix<f64>,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<RecoveryResult> {
    fista(b, y, cfg, None)
}

/// Huber-loss regression with an L1 penalty by FISTA. The Huber gradient is
/// the residual clipped to `[-δ, δ]`, which is `σ²`-Lipschitz in θ.
pub fn huber_fista_solve(
    b: &DMatrix<f64>,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<RecoveryResult> {
    let delta = cfg.huber_delta.map(Some).unwrap_or(None);
    fista(b, y, cfg, Some(delta))
}

/// `huber`: `None` for the squared loss, `Some(absolute δ)` or `Some(None)`
/// for the Huber loss with a configured or relative threshold.
fn fista(
    b: &DMatrix<f64>,
    y: &[f64],
    cfg: &SolverConfig,
    huber: Option<Option<f64>>,
) -> Result<RecoveryResult> {
    check_dims(b, y)?;
    cfg.validate()?;
    let Some(data) = normalize(y) else {
        return RecoveryResult::zero(b.ncols());
    };
    let s = data.scale;
    let yn = &data.y;
    // Quadratic and Huber losses scale with s², the penalty with s, so
    // absolute thresholds shrink by s on the rescaled problem.
    let lambda = cfg
        .lambda
        .map_or_else(|| relative_lambda(b, yn, cfg.lambda_rel), |l| l / s);
    let loss = match huber {
        None => Loss::Squared,
        Some(delta) => Loss::Huber {
            delta: delta.map_or(cfg.huber_delta_rel, |d| d / s),
        },
    };
    let lipschitz = spectral_norm_sq(b);
    if lipschitz == 0.0 {
        return RecoveryResult::zero(b.ncols());
    }
    let step = 1.0 / lipschitz;

    let n = b.ncols();
    let mut theta = DVector::<f64>::zeros(n);
    let mut z = theta.clone();
    let mut t = 1.0f64;
    let mut trace = Vec::new();
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let grad = b.tr_mul(&loss.gradient(b * &z - yn));
        let mut theta_next = &z - grad * step;
        shrink_in_place(&mut theta_next, lambda * step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = &theta_next + (&theta_next - &theta) * ((t - 1.0) / t_next);

        let objective = loss.value(&(b * &theta_next - yn)) + lambda * theta_next.lp_norm(1);
        if !objective.is_finite() {
            return Err(Error::Diverged { iteration });
        }
        trace.push(objective * s * s);

        let change = inf_norm_diff(&theta_next, &theta);
        theta = theta_next;
        t = t_next;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    let iterations = trace.len();
    RecoveryResult::from_normalized(theta, s, iterations, trace, converged, lambda * s)
}
