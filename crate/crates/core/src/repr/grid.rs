use crate::error::{FdaError, Result};

/// Strictly increasing discretization points shared by every curve of a sample,
/// together with the closed interval the functions are defined on.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    domain: (f64, f64),
}

impl Grid {
    /// Grid whose domain is the span of its points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        check_points(&points)?;
        let domain = (points[0], points[points.len() - 1]);
        Ok(Self { points, domain })
    }

    pub fn with_domain(points: Vec<f64>, domain: (f64, f64)) -> Result<Self> {
        check_points(&points)?;
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite()) || a > points[0] || b < points[points.len() - 1] {
            return Err(FdaError::InvalidParameter(format!(
                "domain [{a}, {b}] does not contain the grid points"
            )));
        }
        Ok(Self { points, domain })
    }

    /// `m` equally spaced points covering `[a, b]`, endpoints included exactly.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Self> {
        if m < 2 || !(a < b) {
            return Err(FdaError::InvalidParameter(format!(
                "uniform grid needs m >= 2 and a < b (got m={m}, [{a}, {b}])"
            )));
        }
        Self::new(linspace(a, b, m))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domain_range(&self) -> (f64, f64) {
        self.domain
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Length of the interval spanned by the grid points.
    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }

    /// Trapezoidal quadrature weights over the grid points.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.points)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        integrate(&self.points, values)
    }

    /// Trapezoidal integral divided by the grid span, so constants integrate to
    /// themselves.
    pub fn mean_value(&self, values: &[f64]) -> f64 {
        self.integrate(values) / self.span()
    }

    /// Index of `t` if it is exactly one of the grid points.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
            .ok()
    }

    /// Uniform grid over the domain with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Grid {
        let (a, b) = self.domain;
        let m = factor.max(1) * (self.len() - 1) + 1;
        Grid {
            points: linspace(a, b, m),
            domain: self.domain,
        }
    }

    /// Same points, possibly different domain; used to compare grids for
    /// binary operations.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.domain == other.domain && self.points == other.points
    }
}

fn check_points(points: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(FdaError::InsufficientPoints {
            required: 2,
            available: points.len(),
        });
    }
    for (i, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(FdaError::NonIncreasingGrid { index: i });
        }
        if i > 0 && !(points[i - 1] < *p) {
            return Err(FdaError::NonIncreasingGrid { index: i });
        }
    }
    Ok(())
}

pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![a];
    }
    let step = (b - a) / (m - 1) as f64;
    let mut points: Vec<f64> = (0..m).map(|i| a + step * i as f64).collect();
    points[m - 1] = b;
    points
}

pub fn trapezoid_weights(points: &[f64]) -> Vec<f64> {
    let m = points.len();
    let mut weights = vec![0.0; m];
    for j in 0..m.saturating_sub(1) {
        let half = 0.5 * (points[j + 1] - points[j]);
        weights[j] += half;
        weights[j + 1] += half;
    }
    weights
}

pub fn integrate(points: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(points.len(), values.len());
    points
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_repeated_points() {
        assert_eq!(
            Grid::new(vec![0.0, 1.0, 1.0]),
            Err(FdaError::NonIncreasingGrid { index: 2 })
        );
    }

    #[test]
    fn rejects_single_point() {
        assert!(matches!(
            Grid::new(vec![0.5]),
            Err(FdaError::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn domain_must_contain_points() {
        assert!(Grid::with_domain(vec![0.0, 1.0], (0.5, 2.0)).is_err());
        let g = Grid::with_domain(vec![0.2, 0.8], (0.0, 1.0)).unwrap();
        assert_eq!(g.domain_range(), (0.0, 1.0));
    }

    #[test]
    fn uniform_hits_endpoints() {
        let g = Grid::uniform(0.0, 2.0 * std::f64::consts::PI, 2001).unwrap();
        assert_eq!(g.last(), 2.0 * std::f64::consts::PI);
        assert_eq!(g.first(), 0.0);
    }

    #[test]
    fn trapezoid_of_linear_is_exact() {
        let g = Grid::uniform(0.0, 1.0, 1001).unwrap();
        let v: Vec<f64> = g.points().to_vec();
        assert!((g.integrate(&v) - 0.5).abs() < 1e-14);
        let w = g.trapezoid_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn index_lookup() {
        let g = Grid::new(vec![0.0, 0.1, 0.3]).unwrap();
        assert_eq!(g.index_of(0.1), Some(1));
        assert_eq!(g.index_of(0.2), None);
    }
}
