use nalgebra::DMatrix;

use super::basis::BasisSpec;
use crate::error::{FdaError, Result};

/// Constant-coefficient linear differential operator `L = sum_k w_k D^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDifferentialOperator {
    weights: Vec<f64>,
}

impl LinearDifferentialOperator {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().all(|w| *w == 0.0) {
            return Err(FdaError::InvalidParameter(
                "differential operator needs at least one nonzero weight".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(FdaError::InvalidParameter(
                "differential operator weights must be finite".into(),
            ));
        }
        Ok(Self { weights })
    }

    /// The pure derivative `D^order`.
    pub fn derivative(order: usize) -> Self {
        let mut weights = vec![0.0; order + 1];
        weights[order] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    /// `K x m` matrix of `L phi_k` at the query points.
    pub fn apply_to_basis(&self, basis: &BasisSpec, points: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(basis.n_basis(), points.len());
        for (k, &w) in self.weights.iter().enumerate() {
            if w != 0.0 {
                out += basis.evaluate_derivative(k, points) * w;
            }
        }
        out
    }
}

impl Default for LinearDifferentialOperator {
    /// Second derivative, the usual curvature penalty.
    fn default() -> Self {
        Self::derivative(2)
    }
}
