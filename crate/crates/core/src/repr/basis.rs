use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::bspline;
use crate::error::{FdaError, Result};

/// The family a [`BasisSpec`] belongs to, with any family-specific settings.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind {
    Constant,
    /// `1, t, t^2, ...`
    Monomial,
    /// Clamped B-splines of the given order over strictly increasing
    /// breakpoints spanning the domain.
    BSpline { order: usize, knots: Vec<f64> },
    /// `[1, sin_1, cos_1, sin_2, cos_2, ...]`, orthonormal over one period.
    Fourier { period: f64 },
}

/// A finite basis of real functions on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    kind: BasisKind,
    n_basis: usize,
    domain: (f64, f64),
}

impl BasisSpec {
    pub fn constant(domain: (f64, f64)) -> Result<Self> {
        Self::new(BasisKind::Constant, 1, domain)
    }

    pub fn monomial(domain: (f64, f64), n_basis: usize) -> Result<Self> {
        Self::new(BasisKind::Monomial, n_basis, domain)
    }

    /// Cubic B-splines with uniformly spaced knots.
    pub fn bspline(domain: (f64, f64), n_basis: usize) -> Result<Self> {
        Self::bspline_with_order(domain, n_basis, 4)
    }

    pub fn bspline_with_order(domain: (f64, f64), n_basis: usize, order: usize) -> Result<Self> {
        if order == 0 || n_basis < order {
            return Err(FdaError::InvalidBasis(format!(
                "B-spline basis needs n_basis >= order >= 1 (got n_basis={n_basis}, order={order})"
            )));
        }
        let knots = super::grid::linspace(domain.0, domain.1, n_basis - order + 2);
        Self::new(BasisKind::BSpline { order, knots }, n_basis, domain)
    }

    pub fn bspline_with_knots(domain: (f64, f64), order: usize, knots: Vec<f64>) -> Result<Self> {
        let n_basis = (knots.len() + order).saturating_sub(2);
        Self::new(BasisKind::BSpline { order, knots }, n_basis, domain)
    }

    pub fn fourier(domain: (f64, f64), n_basis: usize) -> Result<Self> {
        Self::fourier_with_period(domain, n_basis, domain.1 - domain.0)
    }

    pub fn fourier_with_period(domain: (f64, f64), n_basis: usize, period: f64) -> Result<Self> {
        Self::new(BasisKind::Fourier { period }, n_basis, domain)
    }

    /// Validating constructor shared by the convenience builders.
    pub fn new(kind: BasisKind, n_basis: usize, domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(FdaError::InvalidBasis(format!("invalid domain [{a}, {b}]")));
        }
        if n_basis == 0 {
            return Err(FdaError::InvalidBasis("n_basis must be positive".into()));
        }
        match &kind {
            BasisKind::Constant if n_basis != 1 => {
                return Err(FdaError::InvalidBasis(
                    "constant basis has exactly one element".into(),
                ));
            }
            BasisKind::BSpline { order, knots } => {
                if *order == 0 || n_basis < *order {
                    return Err(FdaError::InvalidBasis(format!(
                        "B-spline basis needs n_basis >= order >= 1 (got n_basis={n_basis}, order={order})"
                    )));
                }
                if knots.len() != n_basis + 2 - order {
                    return Err(FdaError::InvalidBasis(format!(
                        "expected {} knots for n_basis={n_basis}, order={order}, got {}",
                        n_basis + 2 - order,
                        knots.len()
                    )));
                }
                if knots[0] != a || knots[knots.len() - 1] != b {
                    return Err(FdaError::InvalidBasis(
                        "first and last knots must equal the domain bounds".into(),
                    ));
                }
                if knots.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(FdaError::InvalidBasis(
                        "knots must be strictly increasing".into(),
                    ));
                }
            }
            BasisKind::Fourier { period } if !(period.is_finite() && *period > 0.0) => {
                return Err(FdaError::InvalidBasis(format!(
                    "Fourier period must be positive, got {period}"
                )));
            }
            _ => {}
        }
        Ok(Self {
            kind,
            n_basis,
            domain,
        })
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn domain_range(&self) -> (f64, f64) {
        self.domain
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BasisKind::Constant => "constant",
            BasisKind::Monomial => "monomial",
            BasisKind::BSpline { .. } => "bspline",
            BasisKind::Fourier { .. } => "fourier",
        }
    }

    /// `K x m` matrix whose row `k` holds basis function `k` at each query
    /// point. No domain checks: points outside the domain get the natural
    /// extension of each formula.
    pub fn evaluate(&self, points: &[f64]) -> DMatrix<f64> {
        let k = self.n_basis;
        let mut out = DMatrix::zeros(k, points.len());
        match &self.kind {
            BasisKind::Constant => out.fill(1.0),
            BasisKind::Monomial => {
                for (j, &t) in points.iter().enumerate() {
                    let mut power = 1.0;
                    for row in 0..k {
                        out[(row, j)] = power;
                        power *= t;
                    }
                }
            }
            BasisKind::BSpline { order, knots } => {
                let full = bspline::clamped_knot_vector(knots, *order);
                for (j, &t) in points.iter().enumerate() {
                    for (row, v) in bspline::basis_values(&full, *order, t).into_iter().enumerate() {
                        out[(row, j)] = v;
                    }
                }
            }
            BasisKind::Fourier { period } => {
                let a = self.domain.0;
                let omega = 2.0 * PI / period;
                let c0 = 1.0 / period.sqrt();
                let c1 = (2.0 / period).sqrt();
                for (j, &t) in points.iter().enumerate() {
                    out[(0, j)] = c0;
                    for row in 1..k {
                        let harmonic = row.div_ceil(2) as f64;
                        let arg = harmonic * omega * (t - a);
                        out[(row, j)] = if row % 2 == 1 {
                            c1 * arg.sin()
                        } else {
                            c1 * arg.cos()
                        };
                    }
                }
            }
        }
        out
    }

    /// Basis holding the derivative of every expansion in `self`, and the
    /// `K x K'` map taking coefficient rows in `self` to coefficient rows in
    /// that basis (`derived = coefficients * map`).
    pub fn derivative_map(&self) -> (BasisSpec, DMatrix<f64>) {
        let k = self.n_basis;
        match &self.kind {
            BasisKind::Constant => (self.clone(), DMatrix::zeros(1, 1)),
            BasisKind::Monomial => {
                if k == 1 {
                    return (self.clone(), DMatrix::zeros(1, 1));
                }
                let mut map = DMatrix::zeros(k, k - 1);
                for power in 1..k {
                    map[(power, power - 1)] = power as f64;
                }
                let derived = BasisSpec {
                    kind: BasisKind::Monomial,
                    n_basis: k - 1,
                    domain: self.domain,
                };
                (derived, map)
            }
            BasisKind::Fourier { period } => {
                // an unpaired trailing sine differentiates into a cosine that
                // needs one extra slot
                let k_out = if k.is_multiple_of(2) { k + 1 } else { k };
                let omega = 2.0 * PI / period;
                let mut map = DMatrix::zeros(k, k_out);
                for row in 1..k {
                    let harmonic = row.div_ceil(2) as f64;
                    if row % 2 == 1 {
                        map[(row, row + 1)] = harmonic * omega;
                    } else {
                        map[(row, row - 1)] = -harmonic * omega;
                    }
                }
                let derived = BasisSpec {
                    kind: self.kind.clone(),
                    n_basis: k_out,
                    domain: self.domain,
                };
                (derived, map)
            }
            BasisKind::BSpline { order, knots } => {
                let order = *order;
                if order == 1 {
                    return (self.clone(), DMatrix::zeros(k, k));
                }
                let full = bspline::clamped_knot_vector(knots, order);
                let mut map = DMatrix::zeros(k, k - 1);
                let scale = (order - 1) as f64;
                for j in 0..k - 1 {
                    let width = full[j + order] - full[j + 1];
                    let factor = scale / width;
                    map[(j + 1, j)] = factor;
                    map[(j, j)] = -factor;
                }
                let derived = BasisSpec {
                    kind: BasisKind::BSpline {
                        order: order - 1,
                        knots: knots.clone(),
                    },
                    n_basis: k - 1,
                    domain: self.domain,
                };
                (derived, map)
            }
        }
    }

    /// `K x m` matrix of the `order`-th derivatives of each basis function.
    pub fn evaluate_derivative(&self, order: usize, points: &[f64]) -> DMatrix<f64> {
        let mut basis = self.clone();
        let mut transform = DMatrix::<f64>::identity(self.n_basis, self.n_basis);
        for _ in 0..order {
            let (next, map) = basis.derivative_map();
            transform *= map;
            basis = next;
        }
        transform * basis.evaluate(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::{linspace, trapezoid_weights};

    #[test]
    fn monomial_powers() {
        let b = BasisSpec::monomial((0.0, 3.0), 3).unwrap();
        let m = b.evaluate(&[2.0]);
        assert_eq!(m.column(0).as_slice(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn bspline_rows_sum_to_one() {
        let b = BasisSpec::bspline((0.0, 1.0), 6).unwrap();
        let pts = linspace(0.0, 1.0, 257);
        let m = b.evaluate(&pts);
        for j in 0..pts.len() {
            let col = m.column(j);
            assert!(col.iter().all(|v| *v >= 0.0));
            assert!((col.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_is_orthonormal() {
        let b = BasisSpec::fourier((0.0, 1.0), 3).unwrap();
        let pts = linspace(0.0, 1.0, 1001);
        let w = trapezoid_weights(&pts);
        let phi = b.evaluate(&pts);
        for i in 0..3 {
            for j in 0..3 {
                let ip: f64 = (0..pts.len()).map(|m| w[m] * phi[(i, m)] * phi[(j, m)]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "({i},{j}) -> {ip}");
            }
        }
    }

    #[test]
    fn constant_must_have_one_element() {
        assert!(BasisSpec::new(BasisKind::Constant, 2, (0.0, 1.0)).is_err());
    }

    #[test]
    fn bspline_knot_count_is_checked() {
        let err = BasisSpec::new(
            BasisKind::BSpline {
                order: 4,
                knots: vec![0.0, 0.5, 1.0],
            },
            6,
            (0.0, 1.0),
        );
        assert!(matches!(err, Err(FdaError::InvalidBasis(_))));
    }

    #[test]
    fn bspline_derivative_matches_finite_difference() {
        let b = BasisSpec::bspline((0.0, 1.0), 7).unwrap();
        let h = 1e-6;
        for &t in &[0.13, 0.5, 0.77] {
            let d = b.evaluate_derivative(1, &[t]);
            let plus = b.evaluate(&[t + h]);
            let minus = b.evaluate(&[t - h]);
            for k in 0..7 {
                let fd = (plus[(k, 0)] - minus[(k, 0)]) / (2.0 * h);
                assert!((d[(k, 0)] - fd).abs() < 1e-6, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn fourier_derivative_rotates() {
        let b = BasisSpec::fourier((0.0, 2.0), 4).unwrap();
        let (derived, _) = b.derivative_map();
        assert_eq!(derived.n_basis(), 5);
        let h = 1e-6;
        let t = 0.3;
        let exact = b.evaluate_derivative(1, &[t]);
        let fd = (b.evaluate(&[t + h]) - b.evaluate(&[t - h])) / (2.0 * h);
        for k in 0..4 {
            assert!((exact[(k, 0)] - fd[(k, 0)]).abs() < 1e-6);
        }
    }
}
