use super::warping::{apply_warping, Warping};
use crate::error::{FdaError, Result};
use crate::repr::GridSample;

/// Fritsch–Carlson monotone cubic Hermite interpolant through increasing
/// nodes `(x_k, y_k)`.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(FdaError::ShapeMismatch("monotone interpolation needs matching node lists of length >= 2".into()));
        }
        let n = x.len();
        let secants: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for k in 1..n - 1 {
            slopes[k] = if secants[k - 1] * secants[k] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[k - 1] + secants[k])
            };
        }
        for k in 0..n - 1 {
            if secants[k] == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let alpha = slopes[k] / secants[k];
            let beta = slopes[k + 1] / secants[k];
            let radius = alpha.hypot(beta);
            if radius > 3.0 {
                let tau = 3.0 / radius;
                slopes[k] = tau * alpha * secants[k];
                slopes[k + 1] = tau * beta * secants[k];
            }
        }
        Ok(Self { x, y, slopes })
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.x.len();
        let k = self.x.partition_point(|p| *p <= t).saturating_sub(1).min(n - 2);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

/// Column means of the landmark matrix: the default common targets.
fn mean_landmarks(landmarks: &[Vec<f64>]) -> Vec<f64> {
    let n = landmarks.len() as f64;
    let l = landmarks[0].len();
    (0..l).map(|j| landmarks.iter().map(|r| r[j]).sum::<f64>() / n).collect()
}

/// Warps each curve so that its landmarks `landmarks[i]` land on the common
/// targets (default: mean landmark positions). Returns the registered sample
/// and the warpings.
pub fn landmark_elastic_register(
    sample: &GridSample,
    landmarks: &[Vec<f64>],
    targets: Option<&[f64]>,
) -> Result<(GridSample, Warping)> {
    let n = sample.n_samples();
    if landmarks.len() != n {
        return Err(FdaError::ShapeMismatch(format!(
            "{} landmark rows for {n} curves",
            landmarks.len()
        )));
    }
    let l = landmarks[0].len();
    if landmarks.iter().any(|r| r.len() != l) {
        return Err(FdaError::ShapeMismatch("ragged landmark rows".into()));
    }
    let targets = match targets {
        Some(t) if t.len() != l => {
            return Err(FdaError::ShapeMismatch(format!(
                "{} targets for {l} landmarks per curve",
                t.len()
            )))
        }
        Some(t) => t.to_vec(),
        None => mean_landmarks(landmarks),
    };
    let grid = sample.grid();
    let (a, b) = (grid.first(), grid.last());
    let increasing = |row: &[f64]| {
        let mut previous = a;
        row.iter().all(|&v| {
            let ok = v > previous && v < b;
            previous = v;
            ok
        })
    };
    if !increasing(&targets) {
        return Err(FdaError::NonMonotoneLandmarks { curve: n });
    }
    let mut rows = Vec::with_capacity(n);
    for (i, row) in landmarks.iter().enumerate() {
        if !increasing(row) {
            return Err(FdaError::NonMonotoneLandmarks { curve: i });
        }
        let mut x = vec![a];
        x.extend_from_slice(&targets);
        x.push(b);
        let mut y = vec![a];
        y.extend_from_slice(row);
        y.push(b);
        let spline = MonotoneCubic::new(x, y)?;
        let gamma: Vec<f64> = grid.points().iter().map(|&t| spline.value(t)).collect();
        Warping::from_rows(grid, vec![gamma.clone()]).map_err(|_| FdaError::NonMonotoneLandmarks { curve: i })?;
        rows.push(gamma);
    }
    let warping = Warping::from_rows(grid, rows)?;
    let registered = apply_warping(sample, &warping)?;
    Ok((registered, warping))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::linspace;

    #[test]
    fn monotone_cubic_hits_nodes_and_stays_monotone() {
        let spline = MonotoneCubic::new(vec![0.0, 0.3, 0.5, 1.0], vec![0.0, 0.1, 0.8, 1.0]).unwrap();
        assert_eq!(spline.value(0.3), 0.1);
        assert!((spline.value(0.5) - 0.8).abs() < 1e-15);
        let pts = linspace(0.0, 1.0, 1001);
        for w in pts.windows(2) {
            assert!(spline.value(w[1]) > spline.value(w[0]));
        }
    }

    #[test]
    fn monotone_cubic_reproduces_lines() {
        let spline = MonotoneCubic::new(vec![0.0, 0.25, 1.0], vec![1.0, 1.5, 3.0]).unwrap();
        assert!((spline.value(0.6) - 2.2).abs() < 1e-12);
    }

    fn bumps(modes: &[f64]) -> GridSample {
        let pts = linspace(0.0, 1.0, 201);
        let rows = modes
            .iter()
            .map(|c| pts.iter().map(|t| (-(t - c) * (t - c) / (2.0 * 0.05 * 0.05)).exp()).collect())
            .collect();
        GridSample::new(pts, rows).unwrap()
    }

    #[test]
    fn modes_move_to_target() {
        let sample = bumps(&[0.4, 0.6]);
        let landmarks = vec![vec![0.4], vec![0.6]];
        let (registered, warping) = landmark_elastic_register(&sample, &landmarks, Some(&[0.5])).unwrap();
        for i in 0..2 {
            let row = registered.curve(i);
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .unwrap()
                .0;
            assert!((registered.points()[argmax] - 0.5).abs() <= 0.005 + 1e-12);
            let g = warping.row(i);
            assert_eq!(g[0], 0.0);
            assert_eq!(g[200], 1.0);
        }
    }

    #[test]
    fn landmarks_on_target_give_identity() {
        let sample = bumps(&[0.5]);
        let (registered, warping) = landmark_elastic_register(&sample, &[vec![0.5]], None).unwrap();
        assert!(warping.max_deviation(0) < 1e-15);
        for (x, y) in registered.values().iter().zip(sample.values().iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn unordered_landmarks_are_rejected() {
        let sample = bumps(&[0.4, 0.6]);
        let landmarks = vec![vec![0.3, 0.6], vec![0.7, 0.5]];
        assert_eq!(
            landmark_elastic_register(&sample, &landmarks, None).unwrap_err(),
            FdaError::NonMonotoneLandmarks { curve: 1 }
        );
    }
}
