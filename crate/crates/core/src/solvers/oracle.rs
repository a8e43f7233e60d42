use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::check_dims;
use crate::error::{Error, Result};

const MAX_DIM: usize = 6;
const GRID_BUDGET: usize = 200_000;
const MAX_PASSES: usize = 400;
const MAX_VERTEX_ROUNDS: usize = 500;

/// Brute-force minimizer of `‖Bθ - y‖₁ + λ‖θ‖₁` for at most six unknowns,
/// used to check the iterative solvers.
///
/// Any minimizer satisfies `‖θ‖∞ ≤ ‖y‖₁/λ`, so a uniform grid over that box
/// gives a starting point, which is then refined by golden-section line
/// searches along coordinate, pairwise-diagonal and pseudo-random directions
/// with a shrinking bracket, and finally walked along the edges of the
/// nearest vertex of the objective's kink arrangement until no edge descends.
/// On well-scaled, non-degenerate instances the returned objective is within
/// 1e-4 of the true minimum.
pub fn oracle_solve_small(b: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_dims(b, y)?;
    let n = b.ncols();
    if n > MAX_DIM {
        return Err(Error::OracleDimension(n));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("oracle", "lambda must be positive"));
    }
    let y = DVector::from_column_slice(y);
    let radius = y.lp_norm(1) / lambda;
    if radius == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let f = |theta: &DVector<f64>| (b * theta - &y).lp_norm(1) + lambda * theta.lp_norm(1);

    // Coarse grid.
    let per_axis = ((GRID_BUDGET as f64).powf(1.0 / n as f64).floor() as usize).clamp(3, 41) | 1;
    let spacing = 2.0 * radius / (per_axis - 1) as f64;
    let mut best = DVector::<f64>::zeros(n);
    let mut best_value = f(&best);
    let mut point = DVector::<f64>::zeros(n);
    let mut counter = vec![0usize; n];
    loop {
        for k in 0..n {
            point[k] = -radius + spacing * counter[k] as f64;
        }
        let value = f(&point);
        if value < best_value {
            best_value = value;
            best.copy_from(&point);
        }
        let mut k = 0;
        while k < n {
            counter[k] += 1;
            if counter[k] < per_axis {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    // Line-search refinement.
    let mut directions = Vec::new();
    for i in 0..n {
        directions.push(DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }));
        for j in i + 1..n {
            for sign in [1.0, -1.0] {
                directions.push(DVector::from_fn(n, |k, _| {
                    if k == i {
                        std::f64::consts::FRAC_1_SQRT_2
                    } else if k == j {
                        sign * std::f64::consts::FRAC_1_SQRT_2
                    } else {
                        0.0
                    }
                }));
            }
        }
    }
    let fixed = directions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bracket = spacing;
    let floor = 1e-13 * (1.0 + radius);
    for _ in 0..MAX_PASSES {
        directions.truncate(fixed);
        for _ in 0..2 * n {
            let d = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let norm = d.norm();
            if norm > 0.0 {
                directions.push(d / norm);
            }
        }
        let start = best_value;
        let mut hit_edge = false;
        for d in &directions {
            let (t, value) = golden_section(|t| f(&(&best + d * t)), -bracket, bracket);
            if value < best_value {
                best_value = value;
                best += d * t;
                hit_edge |= t.abs() > 0.9 * bracket;
            }
        }
        if hit_edge {
            bracket *= 2.0;
        } else if start - best_value <= 1e-15 * (1.0 + best_value) {
            bracket *= 0.5;
            if bracket < floor {
                break;
            }
        }
    }
    // Vertex refinement. The objective is convex and piecewise linear, so its
    // minimum sits on a vertex of the arrangement of hyperplanes
    // `b_i·θ = y_i` and `θ_k = 0`, and a vertex is optimal when no edge
    // leaving it descends.
    let planes: Vec<(DVector<f64>, f64)> = (0..b.nrows())
        .map(|i| (b.row(i).transpose(), y[i]))
        .chain((0..n).map(|k| {
            (
                DVector::from_fn(n, |j, _| if j == k { 1.0 } else { 0.0 }),
                0.0,
            )
        }))
        .collect();
    let reach = 2.0 * radius + best.amax();
    for _ in 0..MAX_VERTEX_ROUNDS {
        let Some((vertex, edges)) = nearest_vertex(&planes, &best) else {
            break;
        };
        let value = f(&vertex);
        if value <= best_value {
            best_value = value;
            best = vertex;
        }
        let mut moved = false;
        for edge in &edges {
            for sign in [1.0, -1.0] {
                let d = edge * sign;
                let (t, value) = golden_section(|t| f(&(&best + &d * t)), 0.0, reach);
                if value < best_value - 1e-14 * (1.0 + best_value) {
                    best_value = value;
                    best += d * t;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    Ok(best.as_slice().to_vec())
}

/// Intersection of the `n` linearly independent planes closest to `point`,
/// with the unit edge directions leaving it (columns of the inverse normal
/// matrix).
fn nearest_vertex(
    planes: &[(DVector<f64>, f64)],
    point: &DVector<f64>,
) -> Option<(DVector<f64>, Vec<DVector<f64>>)> {
    let n = point.len();
    let mut order: Vec<(f64, usize)> = planes
        .iter()
        .enumerate()
        .filter(|(_, (a, _))| a.norm() > 0.0)
        .map(|(k, (a, c))| ((a.dot(point) - c).abs() / a.norm(), k))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut chosen = Vec::with_capacity(n);
    for &(_, k) in &order {
        let a = &planes[k].0;
        let mut r = a / a.norm();
        for q in &basis {
            r -= q * q.dot(&r);
        }
        if r.norm() > 1e-8 {
            basis.push(r.normalize());
            chosen.push(k);
            if chosen.len() == n {
                break;
            }
        }
    }
    if chosen.len() < n {
        return None;
    }
    let normals = DMatrix::from_fn(n, n, |r, c| planes[chosen[r]].0[c]);
    let rhs = DVector::from_fn(n, |r, _| planes[chosen[r]].1);
    let inverse = normals.try_inverse()?;
    let vertex = &inverse * rhs;
    let edges = inverse.column_iter().map(|c| c.normalize()).collect();
    vertex
        .iter()
        .all(|v| v.is_finite())
        .then_some((vertex, edges))
}

/// Minimum of a unimodal function on `[lo, hi]`, also checking `t = 0`.
fn golden_section(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc <= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - INV_PHI * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + INV_PHI * (hi - lo);
            gd = g(d);
        }
    }
    let (t, v) = if gc <= gd { (c, gc) } else { (d, gd) };
    let zero = g(0.0);
    if zero <= v {
        (0.0, zero)
    } else {
        (t, v)
    }
}
