use nalgebra::DMatrix;
use serde::Serialize;

use super::depth::{depth, DepthMethod};
use crate::error::{FdaError, Result};
use crate::repr::GridSample;

/// Pointwise mean curve.
pub fn sample_mean(sample: &GridSample) -> Result<Vec<f64>> {
    let n = sample.n_samples();
    if n == 0 {
        return Err(FdaError::InsufficientSample { required: 1, available: 0 });
    }
    Ok(sample.values().column_iter().map(|c| c.sum() / n as f64).collect())
}

/// `M x M` sample covariance surface with the `1/(n-1)` normalization.
pub fn sample_covariance(sample: &GridSample) -> Result<DMatrix<f64>> {
    let n = sample.n_samples();
    if n < 2 {
        return Err(FdaError::InsufficientSample { required: 2, available: n });
    }
    let mean = sample_mean(sample)?;
    let m = sample.n_points();
    let centered = DMatrix::from_fn(n, m, |i, j| sample.values()[(i, j)] - mean[j]);
    Ok(centered.transpose() * centered / (n - 1) as f64)
}

/// Pointwise sample variance (diagonal of the covariance).
pub fn sample_variance(sample: &GridSample) -> Result<Vec<f64>> {
    let n = sample.n_samples();
    if n < 2 {
        return Err(FdaError::InsufficientSample { required: 2, available: n });
    }
    let mean = sample_mean(sample)?;
    Ok((0..sample.n_points())
        .map(|j| {
            sample
                .values()
                .column(j)
                .iter()
                .map(|v| (v - mean[j]) * (v - mean[j]))
                .sum::<f64>()
                / (n - 1) as f64
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricMedian {
    pub curve: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `sum_i ||x_i - z||` at the start and after every iteration.
    pub objective_history: Vec<f64>,
}

fn l2_distances(sample: &GridSample, weights: &[f64], z: &[f64]) -> Vec<f64> {
    (0..sample.n_samples())
        .map(|i| {
            sample
                .values()
                .row(i)
                .iter()
                .zip(z)
                .zip(weights)
                .map(|((x, z), w)| w * (x - z) * (x - z))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Geometric median by Weiszfeld iteration under the L2 norm.
pub fn geometric_median(sample: &GridSample, tol: f64, max_iter: usize) -> Result<GeometricMedian> {
    let weights = sample.grid().trapezoid_weights();
    let mut z = sample_mean(sample)?;
    let mut distances = l2_distances(sample, &weights, &z);
    let scale = distances.iter().cloned().fold(0.0, f64::max);
    let mut history = vec![distances.iter().sum::<f64>()];
    if scale == 0.0 {
        return Ok(GeometricMedian {
            curve: z,
            converged: true,
            iterations: 0,
            objective_history: history,
        });
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        if let Some(i) = distances.iter().position(|d| *d < tol * scale) {
            history.push(distances.iter().sum());
            return Ok(GeometricMedian {
                curve: sample.curve(i),
                converged: true,
                iterations,
                objective_history: history,
            });
        }
        iterations += 1;
        let inverse: Vec<f64> = distances.iter().map(|d| 1.0 / d).collect();
        let total: f64 = inverse.iter().sum();
        let next: Vec<f64> = (0..sample.n_points())
            .map(|j| {
                sample
                    .values()
                    .column(j)
                    .iter()
                    .zip(&inverse)
                    .map(|(x, w)| w * x)
                    .sum::<f64>()
                    / total
            })
            .collect();
        let step: f64 = next
            .iter()
            .zip(&z)
            .zip(&weights)
            .map(|((a, b), w)| w * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let size: f64 = next
            .iter()
            .zip(&weights)
            .map(|(a, w)| w * a * a)
            .sum::<f64>()
            .sqrt();
        z = next;
        distances = l2_distances(sample, &weights, &z);
        history.push(distances.iter().sum());
        if step <= tol * size {
            converged = true;
            break;
        }
    }
    Ok(GeometricMedian {
        curve: z,
        converged,
        iterations,
        objective_history: history,
    })
}

/// Curve indices from deepest to shallowest; ties keep the smaller index first.
pub fn depth_order(depths: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..depths.len()).collect();
    order.sort_by(|&a, &b| depths[b].total_cmp(&depths[a]).then(a.cmp(&b)));
    order
}

/// The deepest curve and its index.
pub fn depth_based_median(sample: &GridSample, method: DepthMethod) -> Result<(usize, Vec<f64>)> {
    let report = depth(sample, method)?;
    let index = depth_order(&report.values)[0];
    Ok((index, sample.curve(index)))
}

/// Mean of the `n - floor(proportion * n)` deepest curves.
pub fn trimmed_mean(sample: &GridSample, proportion: f64, method: DepthMethod) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&proportion) {
        return Err(FdaError::InvalidParameter(format!(
            "trimming proportion must lie in [0, 1), got {proportion}"
        )));
    }
    let n = sample.n_samples();
    let discard = (proportion * n as f64).floor() as usize;
    if discard == 0 {
        return sample_mean(sample);
    }
    let report = depth(sample, method)?;
    let mut keep = depth_order(&report.values);
    keep.truncate(n - discard);
    keep.sort_unstable();
    sample_mean(&sample.select(&keep)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> GridSample {
        GridSample::new(
            vec![0.0, 0.1, 0.3, 0.4, 0.7, 1.0],
            vec![
                vec![109.5, 115.8, 121.9, 130.0, 138.2, 141.1],
                vec![104.6, 112.3, 118.9, 125.0, 130.1, 133.0],
                vec![100.4, 111.1, 112.7, 113.8, 118.1, 126.5],
            ],
        )
        .unwrap()
    }

    #[test]
    fn toy_mean_at_zero() {
        let mean = sample_mean(&toy()).unwrap();
        assert!((mean[0] - 104.833_333_333_333_33).abs() < 1e-10);
    }

    #[test]
    fn single_curve_mean_is_itself() {
        let s = toy().select(&[1]).unwrap();
        assert_eq!(sample_mean(&s).unwrap(), s.curve(0));
        assert!(sample_variance(&s).is_err());
        assert!(sample_covariance(&s).is_err());
    }

    #[test]
    fn covariance_of_opposite_pair() {
        // {+f, -f}: mean 0, cov = (f f^T + f f^T) / 1 = 2 f f^T
        let f = [1.0, -2.0, 0.5];
        let s = GridSample::new(vec![0.0, 0.5, 1.0], vec![f.to_vec(), f.iter().map(|v| -v).collect()]).unwrap();
        let cov = sample_covariance(&s).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((cov[(i, j)] - 2.0 * f[i] * f[j]).abs() < 1e-14);
            }
        }
        assert_eq!(sample_variance(&s).unwrap(), vec![2.0, 8.0, 0.5]);
    }

    #[test]
    fn geometric_median_majority_point() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0; 2], vec![0.0; 2], vec![10.0; 2]]).unwrap();
        let gm = geometric_median(&s, 1e-8, 100).unwrap();
        assert!(gm.converged);
        assert_eq!(gm.curve, vec![0.0, 0.0]);
        for w in gm.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn geometric_median_of_symmetric_pair() {
        let s = GridSample::new(vec![0.0, 0.5, 1.0], vec![vec![1.0, 2.0, 3.0], vec![-1.0, -2.0, -3.0]]).unwrap();
        let gm = geometric_median(&s, 1e-8, 100).unwrap();
        assert!(gm.curve.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn trimming_nothing_is_the_mean() {
        let s = toy();
        assert_eq!(trimmed_mean(&s, 0.0, DepthMethod::ModifiedBandDepth).unwrap(), sample_mean(&s).unwrap());
    }

    #[test]
    fn median_of_parallel_curves_is_the_middle() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0; 2], vec![5.0; 2], vec![2.0; 2]]).unwrap();
        let (index, _) = depth_based_median(&s, DepthMethod::ModifiedBandDepth).unwrap();
        assert_eq!(index, 2);
    }
}
