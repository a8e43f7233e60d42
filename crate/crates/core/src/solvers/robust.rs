use nalgebra::{DMatrix, DVector};

use super::{
    check_dims, inf_norm_diff, normalize, relative_lambda, shrink_in_place, spectral_norm_sq,
    RecoveryResult, SolverConfig, ThresholdMode,
};
use crate::error::{Error, Result};

/// Robust L1-L1 recovery, `min ‖Bθ - y‖₁ + λ‖θ‖₁`, by linearized ADMM on the
/// split `v = Bθ - y`:
///
/// ```text
/// a  = Bθ - y - w/ρ
/// v  = soft(a, 1/ρ)
/// b  = θ - τρ Bᵀ(a - v)
/// θ  = soft(b, λτ)
/// w ← w - ρ(Bθ - y - v)
/// ```
///
/// [`ThresholdMode::Literal`] swaps in the alternative shrink constants.
/// Starts from `θ = v = w = 0` and stops once `θ` and `v` move by less than
/// `tol` in the infinity norm and the split `v = Bθ - y` holds to `tol`.
pub fn yall1_solve(b: &DMatrix<f64>, y: &[f64], cfg: &SolverConfig) -> Result<RecoveryResult> {
    check_dims(b, y)?;
    cfg.validate()?;
    let Some(data) = normalize(y) else {
        return RecoveryResult::zero(b.ncols());
    };
    let yn = &data.y;
    // Both terms are 1-homogeneous in (θ, y), so λ needs no rescaling.
    let lambda = cfg
        .lambda
        .unwrap_or_else(|| relative_lambda(b, yn, cfg.lambda_rel));
    let rho = cfg.rho;
    let literal = cfg.threshold_mode == ThresholdMode::Literal;
    let tau = cfg.tau.unwrap_or_else(|| {
        let l = spectral_norm_sq(b);
        if literal {
            0.99 / l
        } else {
            0.99 / (rho * l)
        }
    });
    let (v_shrink, theta_shrink, grad_scale) = if literal {
        (rho / lambda, tau / rho, tau)
    } else {
        (1.0 / rho, lambda * tau, tau * rho)
    };

    let (m, n) = b.shape();
    let mut theta = DVector::<f64>::zeros(n);
    let mut v = DVector::<f64>::zeros(m);
    let mut w = DVector::<f64>::zeros(m);
    let mut b_theta = DVector::<f64>::zeros(m);
    let mut trace = Vec::new();
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let a = &b_theta - yn - &w / rho;
        let mut v_next = a.clone();
        shrink_in_place(&mut v_next, v_shrink);
        let mut theta_next = &theta - b.tr_mul(&(&a - &v_next)) * grad_scale;
        shrink_in_place(&mut theta_next, theta_shrink);
        b_theta = b * &theta_next;
        let residual = &b_theta - yn;
        let gap = &residual - &v_next;
        w -= &gap * rho;

        let objective = residual.lp_norm(1) + lambda * theta_next.lp_norm(1);
        if !objective.is_finite() || !w.iter().all(|x| x.is_finite()) {
            return Err(Error::Diverged { iteration });
        }
        trace.push(objective * data.scale);

        let change = inf_norm_diff(&theta_next, &theta)
            .max(inf_norm_diff(&v_next, &v))
            .max(gap.amax());
        theta = theta_next;
        v = v_next;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!(
            "robust solver stopped at max_iter = {} without converging",
            cfg.max_iter
        );
    }
    let iterations = trace.len();
    RecoveryResult::from_normalized(theta, data.scale, iterations, trace, converged, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_is_a_fixed_point() {
        let b = DMatrix::from_fn(4, 6, |i, j| (i + 2 * j) as f64);
        let r = yall1_solve(&b, &[0.0; 4], &SolverConfig::default()).unwrap();
        assert_eq!(r.theta, vec![0.0; 6]);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.objective_trace.len(), 1);
        assert!(r.converged);
    }

    #[test]
    fn huge_step_diverges_with_a_hint() {
        let b = DMatrix::from_fn(4, 4, |i, j| 1.0 + (i * 4 + j) as f64);
        let cfg = SolverConfig {
            tau: Some(1e306),
            max_iter: 50,
            ..Default::default()
        };
        let err = yall1_solve(&b, &[1.0, 2.0, 3.0, 4.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
        assert!(err.to_string().contains("smaller step size"));
    }

    #[test]
    fn dimension_mismatch() {
        let b = DMatrix::<f64>::zeros(3, 2);
        assert!(matches!(
            yall1_solve(&b, &[1.0], &SolverConfig::default()),
            Err(Error::Dimension(_))
        ));
    }
}
