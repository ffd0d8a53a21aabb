use nalgebra::DMatrix;

use crate::error::{FdaError, Result};

/// Double-centered pairwise distance matrix of one variable, with its
/// distance variance.
#[derive(Debug, Clone)]
pub(crate) struct CenteredDistances {
    centered: DMatrix<f64>,
    variance: f64,
}

impl CenteredDistances {
    fn from_distances(distances: DMatrix<f64>) -> Self {
        let n = distances.nrows();
        let nf = n as f64;
        let row_means: Vec<f64> = (0..n).map(|i| distances.row(i).sum() / nf).collect();
        let grand = row_means.iter().sum::<f64>() / nf;
        let centered = DMatrix::from_fn(n, n, |i, j| distances[(i, j)] - row_means[i] - row_means[j] + grand);
        let variance = centered.iter().map(|v| v * v).sum::<f64>() / (nf * nf);
        Self { centered, variance }
    }

    pub(crate) fn real(x: &[f64]) -> Self {
        let n = x.len();
        Self::from_distances(DMatrix::from_fn(n, n, |i, j| (x[i] - x[j]).abs()))
    }

    pub(crate) fn vectors(x: &[Vec<f64>]) -> Self {
        let n = x.len();
        Self::from_distances(DMatrix::from_fn(n, n, |i, j| {
            x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        }))
    }

    /// Labels embedded as one-hot vectors: distance `sqrt(2)` between
    /// different classes.
    pub(crate) fn labels(y: &[usize]) -> Self {
        let n = y.len();
        let d = std::f64::consts::SQRT_2;
        Self::from_distances(DMatrix::from_fn(n, n, |i, j| if y[i] == y[j] { 0.0 } else { d }))
    }

    pub(crate) fn len(&self) -> usize {
        self.centered.nrows()
    }

    pub(crate) fn is_degenerate(&self) -> bool {
        !(self.variance > 0.0)
    }

    pub(crate) fn correlation(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(FdaError::ShapeMismatch(format!(
                "{} observations against {}",
                self.len(),
                other.len()
            )));
        }
        if self.is_degenerate() || other.is_degenerate() {
            return Err(FdaError::DegenerateSample("zero distance variance".into()));
        }
        let n = self.len() as f64;
        let covariance = self
            .centered
            .iter()
            .zip(other.centered.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n * n);
        let ratio = covariance.max(0.0) / (self.variance * other.variance).sqrt();
        Ok(ratio.sqrt().min(1.0))
    }

    /// Dependence used inside selection rules, where a constant variable
    /// counts as carrying no information.
    pub(crate) fn dependence(&self, other: &Self) -> f64 {
        self.correlation(other).unwrap_or(0.0)
    }
}

fn check_size(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(FdaError::ShapeMismatch(format!("{n} observations against {m}")));
    }
    if n < 2 {
        return Err(FdaError::InsufficientSample { required: 2, available: n });
    }
    Ok(())
}

/// Distance correlation of two real samples.
pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    check_size(x.len(), y.len())?;
    CenteredDistances::real(x).correlation(&CenteredDistances::real(y))
}

/// Distance correlation of a real sample with class labels.
pub fn distance_correlation_labels(x: &[f64], labels: &[usize]) -> Result<f64> {
    check_size(x.len(), labels.len())?;
    CenteredDistances::real(x).correlation(&CenteredDistances::labels(labels))
}

/// Distance correlation of two vector-valued samples.
pub fn distance_correlation_vectors(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<f64> {
    check_size(x.len(), y.len())?;
    CenteredDistances::vectors(x).correlation(&CenteredDistances::vectors(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_dependence_is_one() {
        let x = [0.3, -1.2, 2.5, 0.0, 4.1];
        assert!((distance_correlation(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_map_is_one() {
        let r = distance_correlation(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_degenerate() {
        assert!(matches!(
            distance_correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(FdaError::DegenerateSample(_))
        ));
    }

    #[test]
    fn labels_match_one_hot_vectors() {
        let x = [0.1, 0.5, 0.2, 0.9, 1.3, 0.4];
        let labels = [0, 1, 0, 2, 1, 2];
        let one_hot: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| (0..3).map(|k| if k == l { 1.0 } else { 0.0 }).collect())
            .collect();
        let xs: Vec<Vec<f64>> = x.iter().map(|v| vec![*v]).collect();
        let a = distance_correlation_labels(&x, &labels).unwrap();
        let b = distance_correlation_vectors(&xs, &one_hot).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
