use nalgebra::DMatrix;

use crate::error::Result;
use crate::repr::{BasisSample, GridSample};

/// Values of every curve at `points`, as an `n x m` feature matrix.
pub fn evaluation_features(sample: &GridSample, points: &[f64]) -> Result<DMatrix<f64>> {
    sample.evaluate(points)
}

/// Basis coefficients as an `n x K` feature matrix.
pub fn coefficient_features(sample: &BasisSample) -> DMatrix<f64> {
    sample.coefficients().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::BasisSpec;

    #[test]
    fn toy_sample_endpoints() {
        let s = GridSample::new(
            vec![0.0, 0.1, 0.3, 0.4, 0.7, 1.0],
            vec![
                vec![109.5, 115.8, 121.9, 130.0, 138.2, 141.1],
                vec![104.6, 112.3, 118.9, 125.0, 130.1, 133.0],
                vec![100.4, 111.1, 112.7, 113.8, 118.1, 126.5],
            ],
        )
        .unwrap();
        let f = evaluation_features(&s, &[0.0, 1.0]).unwrap();
        assert_eq!(f.column(0).as_slice(), &[109.5, 104.6, 100.4]);
        assert_eq!(f.column(1).as_slice(), &[141.1, 133.0, 126.5]);
        assert_eq!(evaluation_features(&s, s.points()).unwrap(), *s.values());
    }

    #[test]
    fn constant_basis_coefficients() {
        let basis = BasisSpec::constant((0.0, 1.0)).unwrap();
        let s = BasisSample::new(basis, DMatrix::from_column_slice(2, 1, &[3.0, -1.0])).unwrap();
        assert_eq!(coefficient_features(&s).column(0).as_slice(), &[3.0, -1.0]);
    }
}
