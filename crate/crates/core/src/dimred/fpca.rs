use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{FdaError, Result};
use crate::exploratory::{sample_covariance, sample_mean};
use crate::linalg::symmetrize;
use crate::repr::{Grid, GridSample, LinearDifferentialOperator};
use crate::smoothing::grid_penalty_matrix;

/// Fitted functional principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct FpcaModel {
    grid: Grid,
    mean: Vec<f64>,
    /// `J x M`, one component per row.
    components: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
    total_variance: f64,
}

impl FpcaModel {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.components.row(j).iter().copied().collect()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_components(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Integrated pointwise sample variance.
    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Share of the total variance carried by each component.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        if self.total_variance <= 0.0 {
            return vec![0.0; self.eigenvalues.len()];
        }
        self.eigenvalues.iter().map(|e| e / self.total_variance).collect()
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigenpairs sorted by decreasing eigenvalue.
fn sorted_eigen(matrix: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eigen = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eigen.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eigen.eigenvectors.nrows(), order.len(), |i, j| eigen.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Functional PCA of a grid sample. With `lambda > 0` the components are
/// penalized by the roughness of `operator` (default: second derivative).
pub fn fpca_fit(
    sample: &GridSample,
    n_components: usize,
    lambda: f64,
    operator: Option<&LinearDifferentialOperator>,
) -> Result<FpcaModel> {
    let n = sample.n_samples();
    let m = sample.n_points();
    let max = (n.saturating_sub(1)).min(m);
    if n_components == 0 || n_components > max {
        return Err(FdaError::TooManyComponents {
            requested: n_components,
            max,
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(FdaError::InvalidParameter(format!(
            "penalty weight must be nonnegative, got {lambda}"
        )));
    }
    let grid = sample.grid().clone();
    let weights = grid.trapezoid_weights();
    let root: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mean = sample_mean(sample)?;
    let covariance = sample_covariance(sample)?;
    let mut scaled = DMatrix::from_fn(m, m, |i, j| root[i] * covariance[(i, j)] * root[j]);
    symmetrize(&mut scaled);
    let total_variance = scaled.trace();

    let (eigenvalues, vectors) = if lambda > 0.0 {
        let default_operator = LinearDifferentialOperator::default();
        let penalty = grid_penalty_matrix(&grid, operator.unwrap_or(&default_operator));
        let mut b = DMatrix::from_fn(m, m, |i, j| lambda * penalty[(i, j)] / (root[i] * root[j]));
        for i in 0..m {
            b[(i, i)] += 1.0;
        }
        symmetrize(&mut b);
        let chol = b.cholesky().ok_or(FdaError::SingularSystem)?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(m, m))
            .ok_or(FdaError::SingularSystem)?;
        let mut reduced = &l_inv * &scaled * l_inv.transpose();
        symmetrize(&mut reduced);
        let (values, v) = sorted_eigen(reduced);
        let u = l_inv.transpose() * v;
        (values, u)
    } else {
        sorted_eigen(scaled)
    };

    let mut components = DMatrix::zeros(n_components, m);
    for j in 0..n_components {
        let mut phi: Vec<f64> = (0..m).map(|i| vectors[(i, j)] / root[i]).collect();
        let norm = phi
            .iter()
            .zip(&weights)
            .map(|(p, w)| w * p * p)
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            phi.iter_mut().for_each(|p| *p /= norm);
        }
        fix_sign(&mut phi);
        for (i, p) in phi.into_iter().enumerate() {
            components[(j, i)] = p;
        }
    }
    let eigenvalues = eigenvalues[..n_components].iter().map(|e| e.max(0.0)).collect();

    Ok(FpcaModel {
        grid,
        mean,
        components,
        eigenvalues,
        weights,
        total_variance,
    })
}

/// Scores `xi_ij = ∫ (x_i - mu) phi_j`, as an `n x J` matrix.
pub fn fpca_transform(model: &FpcaModel, sample: &GridSample) -> Result<DMatrix<f64>> {
    if !sample.grid().same_as(&model.grid) {
        return Err(FdaError::GridMismatch);
    }
    let m = sample.n_points();
    let centered = DMatrix::from_fn(sample.n_samples(), m, |i, j| {
        (sample.values()[(i, j)] - model.mean[j]) * model.weights[j]
    });
    Ok(centered * model.components.transpose())
}

/// Curves `mu + sum_j xi_j phi_j` from an `n x J'` score matrix, `J' <= J`.
pub fn fpca_inverse(model: &FpcaModel, scores: &DMatrix<f64>) -> Result<GridSample> {
    let used = scores.ncols();
    if used > model.n_components() {
        return Err(FdaError::ShapeMismatch(format!(
            "{used} score columns for {} components",
            model.n_components()
        )));
    }
    let mut values = scores * model.components.rows(0, used);
    for mut row in values.row_iter_mut() {
        for (v, mu) in row.iter_mut().zip(&model.mean) {
            *v += mu;
        }
    }
    GridSample::from_matrix(model.grid.clone(), values)
}

/// Mean curve and `mu ± factor * sqrt(lambda_j) * phi_j` as a three-curve
/// sample, in that order.
pub fn fpca_perturbation(model: &FpcaModel, component: usize, factor: f64) -> Result<GridSample> {
    if component >= model.n_components() {
        return Err(FdaError::TooManyComponents {
            requested: component + 1,
            max: model.n_components(),
        });
    }
    let scale = factor * model.eigenvalues[component].sqrt();
    let phi = model.components.row(component);
    let shifted = |sign: f64| -> Vec<f64> {
        model.mean.iter().zip(phi.iter()).map(|(mu, p)| mu + sign * scale * p).collect()
    };
    let rows = [model.mean.clone(), shifted(1.0), shifted(-1.0)];
    let values = DMatrix::from_fn(3, model.mean.len(), |i, j| rows[i][j]);
    GridSample::from_matrix(model.grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::linspace;

    #[test]
    fn zero_variance_gives_zero_eigenvalues() {
        let s = GridSample::new(vec![0.0, 0.5, 1.0], vec![vec![1.0, 2.0, 3.0]; 3]).unwrap();
        let model = fpca_fit(&s, 2, 0.0, None).unwrap();
        assert!(model.eigenvalues().iter().all(|e| *e == 0.0));
        let scores = fpca_transform(&model, &s).unwrap();
        assert!(scores.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_curves_closed_form() {
        // eigenvalue = ||x1 - x2||^2 / 2 = sum_i ||x_i - mu||^2 / (n - 1)
        let pts = vec![0.0, 0.1, 0.3, 0.4, 0.7, 1.0];
        let s = GridSample::new(
            pts.clone(),
            vec![
                vec![109.5, 115.8, 121.9, 130.0, 138.2, 141.1],
                vec![104.6, 112.3, 118.9, 125.0, 130.1, 133.0],
            ],
        )
        .unwrap();
        let model = fpca_fit(&s, 1, 0.0, None).unwrap();
        let diff = [4.9, 3.5, 3.0, 5.0, 8.1, 8.1];
        // trapezoid weights on the grid, by hand
        let w = [0.05, 0.15, 0.15, 0.2, 0.3, 0.15];
        let expected: f64 = diff.iter().zip(w).map(|(d, w)| w * d * d).sum::<f64>() / 2.0;
        assert!((model.eigenvalues()[0] - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn too_many_components() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            fpca_fit(&s, 2, 0.0, None).unwrap_err(),
            FdaError::TooManyComponents { requested: 2, max: 1 }
        );
    }

    #[test]
    fn rank_one_is_recovered() {
        let pts = linspace(0.0, 1.0, 51);
        let phi: Vec<f64> = pts.iter().map(|t| (std::f64::consts::PI * t).sin()).collect();
        let s_values = [-2.0, -1.0, 0.5, 1.5, 3.0, -0.7];
        let rows = s_values.iter().map(|s| phi.iter().map(|p| s * p).collect()).collect();
        let sample = GridSample::new(pts, rows).unwrap();
        let model = fpca_fit(&sample, 2, 0.0, None).unwrap();
        let first = model.component(0);
        let w = model.quadrature_weights();
        let dot: f64 = first.iter().zip(&phi).zip(w).map(|((a, b), w)| w * a * b).sum();
        let norm_phi: f64 = phi.iter().zip(w).map(|(a, w)| w * a * a).sum::<f64>().sqrt();
        assert!(dot / norm_phi >= 0.999);
        assert!(model.eigenvalues()[1] <= 1e-8 * model.eigenvalues()[0]);
    }

    #[test]
    fn mean_has_zero_scores_and_zero_scores_give_mean() {
        let pts = linspace(0.0, 1.0, 11);
        let rows = (0..5)
            .map(|i| pts.iter().map(|t| (t * (i as f64 + 1.0)).sin()).collect())
            .collect();
        let sample = GridSample::new(pts.clone(), rows).unwrap();
        let model = fpca_fit(&sample, 3, 0.0, None).unwrap();
        let mean = GridSample::new(pts, vec![model.mean().to_vec()]).unwrap();
        let scores = fpca_transform(&model, &mean).unwrap();
        assert!(scores.iter().all(|v| v.abs() < 1e-12));
        let back = fpca_inverse(&model, &DMatrix::zeros(1, 3)).unwrap();
        assert_eq!(back.curve(0), model.mean());
    }

    #[test]
    fn perturbation_is_mean_plus_component() {
        let pts = linspace(0.0, 1.0, 21);
        let rows = (0..6)
            .map(|i| pts.iter().map(|t| (t + i as f64 * 0.3).cos() * (1.0 + i as f64)).collect())
            .collect();
        let sample = GridSample::new(pts, rows).unwrap();
        let model = fpca_fit(&sample, 2, 0.0, None).unwrap();
        let c = 0.8;
        let out = fpca_inverse(&model, &DMatrix::from_row_slice(2, 2, &[c, 0.0, -c, 0.0])).unwrap();
        for j in 0..21 {
            assert_eq!(out.values()[(0, j)], model.mean()[j] + c * model.components()[(0, j)]);
            assert_eq!(out.values()[(1, j)], model.mean()[j] + -c * model.components()[(0, j)]);
        }
    }

    #[test]
    fn smoothing_makes_components_smoother() {
        let pts = linspace(0.0, 1.0, 41);
        let rows = (0..8)
            .map(|i| {
                pts.iter()
                    .enumerate()
                    .map(|(j, t)| (2.0 * t).sin() * (i as f64 - 3.5) + if (i + j) % 2 == 0 { 0.05 } else { -0.05 })
                    .collect()
            })
            .collect();
        let sample = GridSample::new(pts, rows).unwrap();
        let rough = fpca_fit(&sample, 1, 0.0, None).unwrap();
        let smooth = fpca_fit(&sample, 1, 1e-3, None).unwrap();
        let roughness = |phi: Vec<f64>| phi.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).powi(2)).sum::<f64>();
        assert!(roughness(smooth.component(0)) < roughness(rough.component(0)));
    }
}
