//! Solver accuracy against two independent minimizers of the L1-L1
//! objective: the library's grid/line-search oracle and exhaustive vertex
//! enumeration written here.

use faultloc_core::{
    fixtures, generate_case, huber_fista_solve, lasso_fista_solve, locate_pipeline, objective_l1l1,
    oracle_solve_small, realify_matrix, realify_vector, yall1_solve, FaultScenario, GroundTruth,
    SolverConfig, SolverKind, ThresholdMode, C64,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum over all vertices of the arrangement `b_i·θ = y_i`, `θ_k = 0`.
fn vertex_enumeration_min(b: &DMatrix<f64>, y: &[f64], lambda: f64) -> f64 {
    let (m, n) = b.shape();
    let planes: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|i| (b.row(i).iter().copied().collect(), y[i]))
        .chain((0..n).map(|k| ((0..n).map(|j| f64::from(j == k)).collect(), 0.0)))
        .collect();
    let mut best = objective_l1l1(b, y, &vec![0.0; n], lambda).unwrap();
    let mut pick: Vec<usize> = (0..n).collect();
    let total = planes.len();
    loop {
        let a = DMatrix::from_fn(n, n, |r, c| planes[pick[r]].0[c]);
        let rhs = DVector::from_fn(n, |r, _| planes[pick[r]].1);
        if let Some(theta) = a.lu().solve(&rhs) {
            if theta.iter().all(|v| v.is_finite()) {
                best = best.min(objective_l1l1(b, y, theta.as_slice(), lambda).unwrap());
            }
        }
        let Some(i) = (0..n).rev().find(|&i| pick[i] < total - n + i) else {
            return best;
        };
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn random_problem(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (DMatrix<f64>, Vec<f64>, f64) {
    let b = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let y = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    (b, y, rng.random_range(0.05..0.5))
}

#[test]
fn oracle_and_vertex_enumeration_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let n = 2 * (1 + case % 3);
        let (b, y, lambda) = random_problem(&mut rng, n + 1 + case % 4, n);
        let exact = vertex_enumeration_min(&b, &y, lambda);
        let theta = oracle_solve_small(&b, &y, lambda).unwrap();
        let found = objective_l1l1(&b, &y, &theta, lambda).unwrap();
        assert!(found >= exact - 1e-12 * (1.0 + exact));
        assert!(
            found - exact <= 1e-4,
            "case {case}: oracle {found} vs exact {exact}"
        );
    }
}

#[test]
fn robust_solver_reaches_the_vertex_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..20 {
        let n = 2 * (1 + case % 3);
        let (b, y, lambda) = random_problem(&mut rng, n + 1 + case % 4, n);
        let exact = vertex_enumeration_min(&b, &y, lambda);
        let cfg = SolverConfig {
            lambda: Some(lambda),
            ..Default::default()
        };
        let r = yall1_solve(&b, &y, &cfg).unwrap();
        let got = objective_l1l1(&b, &y, &r.theta, lambda).unwrap();
        assert!(
            (got - exact).abs() <= 1e-3 * (1.0 + exact),
            "case {case}: {got} vs {exact}"
        );
        assert!((r.objective_trace.last().unwrap() - got).abs() <= 1e-9 * (1.0 + got));
    }
}

#[test]
fn oracle_scalar_example_value() {
    let b = DMatrix::from_element(1, 1, 1.0);
    let theta = oracle_solve_small(&b, &[2.0], 0.5).unwrap();
    assert!((objective_l1l1(&b, &[2.0], &theta, 0.5).unwrap() - 1.0).abs() < 1e-12);
}

/// Random complex system with a two-sparse complex injection vector.
fn sparse_complex_problem(seed: u64, rows: usize, buses: usize) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = DMatrix::from_fn(rows, buses, |_, _| c());
    let mut theta = vec![C64::new(0.0, 0.0); buses];
    theta[0] = c() * 5.0;
    theta[buses - 1] = c() * 5.0;
    (realify_matrix(&b), realify_vector(&theta))
}

#[test]
fn noiseless_two_sparse_recovery() {
    for seed in 0..40 {
        let (b, truth) = sparse_complex_problem(seed, 6, 6);
        let y = &b * &truth;
        let r = yall1_solve(&b, y.as_slice(), &SolverConfig::default()).unwrap();
        let err = (DVector::from_column_slice(&r.theta) - &truth).norm() / truth.norm();
        assert!(err <= 1e-3, "seed {seed}: relative error {err}");
    }
}

#[test]
fn noiseless_recovery_cross_checked_by_oracle() {
    for seed in 20..26 {
        let (b, truth) = sparse_complex_problem(seed, 4, 3);
        let y = &b * &truth;
        let r = yall1_solve(&b, y.as_slice(), &SolverConfig::default()).unwrap();
        let lambda = r.lambda;
        let oracle = oracle_solve_small(&b, y.as_slice(), lambda).unwrap();
        let solver_value = objective_l1l1(&b, y.as_slice(), &r.theta, lambda).unwrap();
        let oracle_value = objective_l1l1(&b, y.as_slice(), &oracle, lambda).unwrap();
        let truth_value = objective_l1l1(&b, y.as_slice(), truth.as_slice(), lambda).unwrap();
        assert!((solver_value - oracle_value).abs() <= 1e-3 * (1.0 + oracle_value));
        assert!(oracle_value <= truth_value + 1e-9 * truth_value);
        let err = (DVector::from_column_slice(&r.theta) - &truth).norm() / truth.norm();
        assert!(err <= 1e-3, "seed {seed}: relative error {err}");
    }
}

#[test]
fn baselines_find_the_support_without_noise() {
    let bench = fixtures::six_bus().unwrap();
    let cfg = SolverConfig {
        lambda_rel: 1e-5,
        ..Default::default()
    };
    for line in bench.network.lines() {
        let scn = FaultScenario::new(line.id.clone(), 0.4);
        let (meas, inj) = generate_case(&scn, &bench.network, &bench.sensing).unwrap();
        let (i, j) = inj.support;
        for solver in [lasso_fista_solve, huber_fista_solve] {
            let r = solver(&bench.sensing.real, &meas.y_clean, &cfg).unwrap();
            let peak = r.theta_complex.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            for (k, v) in r.theta_complex.iter().enumerate() {
                if k == i || k == j {
                    assert!(v.norm() > 0.5 * inj.theta[k].norm());
                } else {
                    assert!(
                        v.norm() < 1e-3 * peak,
                        "{}: bus {k} carries {}",
                        line.id,
                        v.norm()
                    );
                }
            }
        }
    }
}

#[test]
fn literal_thresholds_also_recover_noiseless_faults() {
    let bench = fixtures::six_bus().unwrap();
    let cfg = SolverConfig {
        threshold_mode: ThresholdMode::Literal,
        ..Default::default()
    };
    for line in bench.network.lines() {
        let scn = FaultScenario::new(line.id.clone(), 0.7);
        let (meas, inj) = generate_case(&scn, &bench.network, &bench.sensing).unwrap();
        let truth = GroundTruth::new(&scn, &inj);
        let (result, recovery) = locate_pipeline(
            &bench.network,
            &bench.sensing.real,
            &meas.y_clean,
            SolverKind::Robust,
            &cfg,
            Some(&truth),
        )
        .unwrap();
        assert!(recovery.theta.iter().all(|v| v.is_finite()));
        assert_eq!(result.line_id, line.id);
        assert!(result.x_error_percent.unwrap() < 1e-3);
    }
}
