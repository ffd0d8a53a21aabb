use nalgebra::DMatrix;

use crate::error::{FdaError, Result};
use crate::linalg::{cholesky_with_jitter, symmetrize};
use crate::repr::grid::{linspace, trapezoid_weights};
use crate::repr::sample::differentiate;
use crate::repr::{BasisSample, BasisSpec, Grid, GridSample, LinearDifferentialOperator};

/// Refinement factor of the quadrature grid used for roughness penalties.
const PENALTY_REFINEMENT: usize = 10;

/// `R[j][k] = ∫ (L phi_j)(L phi_k)` by trapezoid on a uniform grid with ten
/// times as many intervals as a grid of `sample_points` points.
pub fn penalty_matrix(
    basis: &BasisSpec,
    operator: &LinearDifferentialOperator,
    sample_points: usize,
) -> DMatrix<f64> {
    let (a, b) = basis.domain_range();
    let m = PENALTY_REFINEMENT * (sample_points.max(2) - 1) + 1;
    let points = linspace(a, b, m);
    let weights = trapezoid_weights(&points);
    let applied = operator.apply_to_basis(basis, &points);
    let mut weighted = applied.clone();
    for (j, w) in weights.iter().enumerate() {
        weighted.column_mut(j).scale_mut(*w);
    }
    let mut gram = &weighted * applied.transpose();
    symmetrize(&mut gram);
    gram
}

/// `M x M` matrix of `L` acting on discretized curves through the grid
/// finite-difference stencils.
pub fn grid_operator_matrix(grid: &Grid, operator: &LinearDifferentialOperator) -> DMatrix<f64> {
    let m = grid.len();
    let pts = grid.points();
    let mut first = DMatrix::zeros(m, m);
    let mut unit = vec![0.0; m];
    for j in 0..m {
        unit[j] = 1.0;
        for (i, d) in differentiate(pts, &unit).into_iter().enumerate() {
            first[(i, j)] = d;
        }
        unit[j] = 0.0;
    }
    let mut out = DMatrix::zeros(m, m);
    let mut power = DMatrix::<f64>::identity(m, m);
    for (k, &w) in operator.weights().iter().enumerate() {
        if k > 0 {
            power = &first * power;
        }
        if w != 0.0 {
            out += &power * w;
        }
    }
    out
}

/// Roughness Gram matrix `L^T W L` for discretized curves.
pub fn grid_penalty_matrix(grid: &Grid, operator: &LinearDifferentialOperator) -> DMatrix<f64> {
    let op = grid_operator_matrix(grid, operator);
    let mut weighted = op.clone();
    for (i, w) in grid.trapezoid_weights().iter().enumerate() {
        weighted.row_mut(i).scale_mut(*w);
    }
    let mut gram = op.transpose() * weighted;
    symmetrize(&mut gram);
    gram
}

fn design(basis: &BasisSpec, points: &[f64]) -> DMatrix<f64> {
    basis.evaluate(points).transpose()
}

fn normal_matrix(design: &DMatrix<f64>, lambda: f64, penalty: &DMatrix<f64>) -> DMatrix<f64> {
    let mut normal = design.transpose() * design;
    if lambda > 0.0 {
        normal += penalty * lambda;
    }
    symmetrize(&mut normal);
    normal
}

/// Solves `(Phi^T Phi + lambda R) C = rhs`.
fn solve_normal(normal: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (chol, _) = cholesky_with_jitter(normal, 1e-10, 1e-6).ok_or(FdaError::SingularSystem)?;
    let solved = chol.solve(rhs);
    if solved.iter().all(|v| v.is_finite()) {
        Ok(solved)
    } else {
        Err(FdaError::SingularSystem)
    }
}

/// Hat matrix `Phi_out (Phi^T Phi + lambda R)^{-1} Phi^T` of a penalized
/// basis smoother.
pub fn basis_smoother_matrix(
    basis: &BasisSpec,
    lambda: f64,
    penalty: &DMatrix<f64>,
    input: &[f64],
    output: &[f64],
) -> Result<DMatrix<f64>> {
    let phi = design(basis, input);
    let normal = normal_matrix(&phi, lambda, penalty);
    let projected = solve_normal(&normal, &phi.transpose())?;
    Ok(design(basis, output) * projected)
}

/// Penalized least-squares coefficients of every curve in `basis`.
pub fn penalized_basis_fit(
    sample: &GridSample,
    basis: &BasisSpec,
    lambda: f64,
    operator: &LinearDifferentialOperator,
) -> Result<BasisSample> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(FdaError::InvalidParameter(format!(
            "penalty weight must be nonnegative, got {lambda}"
        )));
    }
    let phi = design(basis, sample.points());
    let penalty = if lambda > 0.0 {
        penalty_matrix(basis, operator, sample.n_points())
    } else {
        DMatrix::zeros(basis.n_basis(), basis.n_basis())
    };
    let normal = normal_matrix(&phi, lambda, &penalty);
    let rhs = phi.transpose() * sample.values().transpose();
    let coefficients = solve_normal(&normal, &rhs)?.transpose();
    BasisSample::new(basis.clone(), coefficients)?.with_names(sample.names().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let pts = linspace(0.0, 1.0, 5);
        let row: Vec<f64> = pts.iter().map(|t| 1.0 + t).collect();
        let sample = GridSample::new(pts, vec![row]).unwrap();
        let basis = BasisSpec::monomial((0.0, 1.0), 2).unwrap();
        let fit = penalized_basis_fit(&sample, &basis, 0.0, &LinearDifferentialOperator::default()).unwrap();
        let c = fit.coefficients();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-10);
        assert!((c[(0, 1)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_basis_has_no_slope_penalty() {
        let basis = BasisSpec::constant((0.0, 1.0)).unwrap();
        let r = penalty_matrix(&basis, &LinearDifferentialOperator::derivative(1), 11);
        assert_eq!(r, DMatrix::zeros(1, 1));
    }

    #[test]
    fn monomial_curvature_penalty_by_hand() {
        // L = D^2 on {1, t, t^2}: only t^2 has curvature 2, so R[2][2] = 4
        let basis = BasisSpec::monomial((0.0, 1.0), 3).unwrap();
        let r = penalty_matrix(&basis, &LinearDifferentialOperator::derivative(2), 11);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == 2 && j == 2 { 4.0 } else { 0.0 };
                assert!((r[(i, j)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let sample = GridSample::new(vec![0.0, 1.0], vec![vec![0.0, 1.0]]).unwrap();
        let basis = BasisSpec::monomial((0.0, 1.0), 2).unwrap();
        assert!(penalized_basis_fit(&sample, &basis, -1.0, &LinearDifferentialOperator::default()).is_err());
    }

    #[test]
    fn grid_operator_differentiates_quadratics() {
        let grid = Grid::new(vec![0.0, 0.1, 0.3, 0.4, 0.7, 1.0]).unwrap();
        let op = grid_operator_matrix(&grid, &LinearDifferentialOperator::new(vec![1.0, 1.0]).unwrap());
        let v = nalgebra::DVector::from_iterator(6, grid.points().iter().map(|t| t * t));
        let out = op * v;
        for (i, t) in grid.points().iter().enumerate() {
            assert!((out[i] - (t * t + 2.0 * t)).abs() < 1e-12);
        }
    }
}
