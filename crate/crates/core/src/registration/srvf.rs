use nalgebra::DMatrix;

use super::warping::Warping;
use crate::error::{FdaError, Result};
use crate::repr::sample::differentiate;
use crate::repr::{Grid, GridSample};

/// Largest step, in grid indices along either axis, of an alignment path.
pub const DP_MAX_STEP: usize = 5;

/// Square-root velocity values `q = x' / sqrt(|x'|)` (zero where `x' = 0`).
pub fn srvf_transform(sample: &GridSample) -> Result<GridSample> {
    if sample.n_points() < 2 {
        return Err(FdaError::InsufficientPoints {
            required: 2,
            available: sample.n_points(),
        });
    }
    let pts = sample.points();
    let mut values = DMatrix::zeros(sample.n_samples(), sample.n_points());
    for i in 0..sample.n_samples() {
        let row = sample.curve(i);
        for (j, d) in differentiate(pts, &row).into_iter().enumerate() {
            values[(i, j)] = srvf_value(d);
        }
    }
    sample.with_values(values)
}

fn srvf_value(derivative: f64) -> f64 {
    if derivative == 0.0 {
        0.0
    } else {
        derivative.signum() * derivative.abs().sqrt()
    }
}

/// Recovers curves from SRVF values and initial values:
/// `x(t) = x(a) + ∫_a^t q |q|`, by cumulative trapezoid.
pub fn srvf_inverse(q: &GridSample, initial: &[f64]) -> Result<GridSample> {
    if initial.len() != q.n_samples() {
        return Err(FdaError::ShapeMismatch(format!(
            "{} initial values for {} curves",
            initial.len(),
            q.n_samples()
        )));
    }
    let pts = q.points();
    let mut values = DMatrix::zeros(q.n_samples(), q.n_points());
    for (i, &x0) in initial.iter().enumerate() {
        let mut acc = x0;
        values[(i, 0)] = acc;
        for j in 1..pts.len() {
            let (a, b) = (q.values()[(i, j - 1)], q.values()[(i, j)]);
            acc += 0.5 * (pts[j] - pts[j - 1]) * (a * a.abs() + b * b.abs());
            values[(i, j)] = acc;
        }
    }
    q.with_values(values)
}

fn interpolate(pts: &[f64], values: &[f64], t: f64) -> f64 {
    let m = pts.len();
    if t <= pts[0] {
        return values[0];
    }
    if t >= pts[m - 1] {
        return values[m - 1];
    }
    let j = pts.partition_point(|p| *p <= t) - 1;
    let w = (t - pts[j]) / (pts[j + 1] - pts[j]);
    values[j] + w * (values[j + 1] - values[j])
}

/// Cost of mapping template indices `k..=i` linearly onto `t_l..=t_j` of the
/// moving curve: trapezoid of `(q_T - q_M(gamma) sqrt(gamma'))^2`.
fn segment_cost(pts: &[f64], q_moving: &[f64], q_template: &[f64], k: usize, l: usize, i: usize, j: usize) -> f64 {
    let slope = (pts[j] - pts[l]) / (pts[i] - pts[k]);
    let root = slope.sqrt();
    let residual = |p: usize| {
        let gamma = if p == i { pts[j] } else { pts[l] + slope * (pts[p] - pts[k]) };
        q_template[p] - interpolate(pts, q_moving, gamma) * root
    };
    let mut cost = 0.0;
    let mut left = residual(k);
    for p in k + 1..=i {
        let right = residual(p);
        cost += 0.5 * (pts[p] - pts[p - 1]) * (left * left + right * right);
        left = right;
    }
    cost
}

/// Elastic alignment cost of the warping given by `gamma` on the grid
/// (piecewise linear between grid points).
pub fn alignment_cost(grid: &Grid, q_moving: &[f64], q_template: &[f64], gamma: &[f64]) -> f64 {
    let pts = grid.points();
    let mut cost = 0.0;
    for p in 0..pts.len() - 1 {
        let h = pts[p + 1] - pts[p];
        let root = ((gamma[p + 1] - gamma[p]) / h).max(0.0).sqrt();
        let r0 = q_template[p] - interpolate(pts, q_moving, gamma[p]) * root;
        let r1 = q_template[p + 1] - interpolate(pts, q_moving, gamma[p + 1]) * root;
        cost += 0.5 * h * (r0 * r0 + r1 * r1);
    }
    cost
}

/// Preference between equal-cost predecessor steps: closest to diagonal,
/// then lexicographically smallest.
fn step_rank(di: usize, dj: usize) -> (usize, usize, usize) {
    (di.abs_diff(dj), di, dj)
}

/// Dynamic-programming warp aligning `q_moving` to `q_template` on `grid`,
/// returned as `gamma` values on the grid.
pub fn dp_align_values(grid: &Grid, q_moving: &[f64], q_template: &[f64]) -> Result<Vec<f64>> {
    let pts = grid.points();
    let m = pts.len();
    if q_moving.len() != m || q_template.len() != m {
        return Err(FdaError::ShapeMismatch("SRVF values do not match the grid".into()));
    }
    if m < 2 {
        return Err(FdaError::InsufficientPoints { required: 2, available: m });
    }
    let mut cost = vec![f64::INFINITY; m * m];
    let mut parent = vec![(0usize, 0usize); m * m];
    cost[0] = 0.0;
    for i in 1..m {
        for j in 1..m {
            let mut best = f64::INFINITY;
            let mut best_step = (0, 0);
            for di in 1..=DP_MAX_STEP.min(i) {
                for dj in 1..=DP_MAX_STEP.min(j) {
                    let (k, l) = (i - di, j - dj);
                    let base = cost[k * m + l];
                    if !base.is_finite() {
                        continue;
                    }
                    let candidate = base + segment_cost(pts, q_moving, q_template, k, l, i, j);
                    let better = if !best.is_finite() {
                        true
                    } else if (candidate - best).abs() <= 1e-12 * best.abs() {
                        step_rank(di, dj) < step_rank(best_step.0, best_step.1)
                    } else {
                        candidate < best
                    };
                    if better {
                        best = candidate;
                        best_step = (di, dj);
                    }
                }
            }
            cost[i * m + j] = best;
            parent[i * m + j] = best_step;
        }
    }
    let mut gamma = vec![0.0; m];
    let (mut i, mut j) = (m - 1, m - 1);
    while i > 0 {
        let (di, dj) = parent[i * m + j];
        let (k, l) = (i - di, j - dj);
        let slope = (pts[j] - pts[l]) / (pts[i] - pts[k]);
        gamma[i] = pts[j];
        for p in k + 1..i {
            gamma[p] = pts[l] + slope * (pts[p] - pts[k]);
        }
        i = k;
        j = l;
    }
    gamma[0] = pts[0];
    gamma[m - 1] = pts[m - 1];
    Ok(gamma)
}

/// Aligns the first curve of `q_moving` to the first curve of `q_template`
/// (both SRVFs on the same grid).
pub fn dp_align(q_moving: &GridSample, q_template: &GridSample) -> Result<Warping> {
    if !q_moving.grid().same_as(q_template.grid()) {
        return Err(FdaError::GridMismatch);
    }
    let gamma = dp_align_values(q_moving.grid(), &q_moving.curve(0), &q_template.curve(0))?;
    Warping::from_rows(q_moving.grid(), vec![gamma])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::linspace;

    #[test]
    fn srvf_of_a_line() {
        // x = 4t: x' = 4, q = 2
        let pts = linspace(0.0, 1.0, 11);
        let row: Vec<f64> = pts.iter().map(|t| 4.0 * t).collect();
        let q = srvf_transform(&GridSample::new(pts, vec![row]).unwrap()).unwrap();
        for v in q.values().iter() {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn srvf_of_flat_curve_is_zero() {
        let q = srvf_transform(&GridSample::new(vec![0.0, 0.5, 1.0], vec![vec![3.0; 3]]).unwrap()).unwrap();
        assert!(q.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn srvf_round_trip() {
        let pts = linspace(0.0, 1.0, 2001);
        let row: Vec<f64> = pts.iter().map(|t| (3.0 * t).sin() + t).collect();
        let x = GridSample::new(pts, vec![row]).unwrap();
        let back = srvf_inverse(&srvf_transform(&x).unwrap(), &[0.0]).unwrap();
        for (a, b) in back.values().iter().zip(x.values().iter()) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn identical_curves_align_to_identity() {
        let grid = Grid::uniform(0.0, 1.0, 41).unwrap();
        let q: Vec<f64> = grid.points().iter().map(|t| (6.0 * t).cos()).collect();
        let gamma = dp_align_values(&grid, &q, &q).unwrap();
        for (g, t) in gamma.iter().zip(grid.points()) {
            assert!((g - t).abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_a_known_warp() {
        let grid = Grid::uniform(0.0, 1.0, 101).unwrap();
        let pts = grid.points().to_vec();
        let curve = |t: f64| (2.0 * std::f64::consts::PI * t).sin() + 0.5 * (5.0 * t).cos();
        let warp = |t: f64| t + 0.15 * t * (1.0 - t);
        let template: Vec<f64> = pts.iter().map(|&t| curve(t)).collect();
        // moving = template composed with the inverse warp, so gamma ~ warp
        let moving: Vec<f64> = pts
            .iter()
            .map(|&t| {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if warp(mid) < t { lo = mid } else { hi = mid }
                }
                curve(0.5 * (lo + hi))
            })
            .collect();
        let sample = GridSample::new(pts.clone(), vec![moving, template]).unwrap();
        let q = srvf_transform(&sample).unwrap();
        let gamma = dp_align_values(&grid, &q.curve(0), &q.curve(1)).unwrap();
        let step = 0.01;
        for (g, &t) in gamma.iter().zip(&pts) {
            assert!((g - warp(t)).abs() <= 2.0 * step + 1e-12, "t={t} gamma={g} expected {}", warp(t));
        }
        let identity_cost = alignment_cost(&grid, &q.curve(0), &q.curve(1), &pts);
        let aligned_cost = alignment_cost(&grid, &q.curve(0), &q.curve(1), &gamma);
        assert!(aligned_cost <= identity_cost);
    }
}
