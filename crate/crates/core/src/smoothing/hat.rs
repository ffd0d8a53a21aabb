use nalgebra::DMatrix;

use super::basis_fit::{basis_smoother_matrix, penalty_matrix};
use super::kernel::Kernel;
use crate::error::{FdaError, Result};
use crate::repr::{BasisSpec, Grid, GridSample, LinearDifferentialOperator};

/// A linear smoother and its smoothing parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum SmootherSpec {
    NadarayaWatson { bandwidth: f64, kernel: Kernel },
    LocalLinear { bandwidth: f64, kernel: Kernel },
    KNeighbors { k: usize },
    Basis {
        basis: BasisSpec,
        lambda: f64,
        operator: LinearDifferentialOperator,
    },
}

impl SmootherSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SmootherSpec::NadarayaWatson { .. } => "nadaraya-watson",
            SmootherSpec::LocalLinear { .. } => "local-linear",
            SmootherSpec::KNeighbors { .. } => "k-neighbors",
            SmootherSpec::Basis { .. } => "basis",
        }
    }

    /// The tunable parameter: bandwidth, neighbour count or penalty weight.
    pub fn parameter(&self) -> f64 {
        match self {
            SmootherSpec::NadarayaWatson { bandwidth, .. }
            | SmootherSpec::LocalLinear { bandwidth, .. } => *bandwidth,
            SmootherSpec::KNeighbors { k } => *k as f64,
            SmootherSpec::Basis { lambda, .. } => *lambda,
        }
    }

    /// Copy of `self` with the tunable parameter replaced.
    pub fn with_parameter(&self, value: f64) -> Result<Self> {
        let spec = match self {
            SmootherSpec::NadarayaWatson { kernel, .. } => SmootherSpec::NadarayaWatson {
                bandwidth: value,
                kernel: *kernel,
            },
            SmootherSpec::LocalLinear { kernel, .. } => SmootherSpec::LocalLinear {
                bandwidth: value,
                kernel: *kernel,
            },
            SmootherSpec::KNeighbors { .. } => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(FdaError::InvalidParameter(format!(
                        "neighbour count must be a positive integer, got {value}"
                    )));
                }
                SmootherSpec::KNeighbors { k: value as usize }
            }
            SmootherSpec::Basis {
                basis, operator, ..
            } => SmootherSpec::Basis {
                basis: basis.clone(),
                lambda: value,
                operator: operator.clone(),
            },
        };
        spec.validate(None)?;
        Ok(spec)
    }

    fn validate(&self, n_points: Option<usize>) -> Result<()> {
        match self {
            SmootherSpec::NadarayaWatson { bandwidth, .. }
            | SmootherSpec::LocalLinear { bandwidth, .. } => {
                if !(bandwidth.is_finite() && *bandwidth > 0.0) {
                    return Err(FdaError::InvalidParameter(format!(
                        "bandwidth must be positive, got {bandwidth}"
                    )));
                }
            }
            SmootherSpec::KNeighbors { k } => {
                if *k == 0 || n_points.is_some_and(|m| *k > m) {
                    return Err(FdaError::InvalidParameter(format!(
                        "neighbour count {k} outside 1..=M"
                    )));
                }
            }
            SmootherSpec::Basis { lambda, .. } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return Err(FdaError::InvalidParameter(format!(
                        "penalty weight must be nonnegative, got {lambda}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Matrix `S` mapping values on the input grid to smoothed values on the
/// output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HatMatrix {
    entries: DMatrix<f64>,
    input_grid: Grid,
    output_grid: Grid,
}

impl HatMatrix {
    pub fn new(entries: DMatrix<f64>, input_grid: Grid, output_grid: Grid) -> Result<Self> {
        if entries.nrows() != output_grid.len() || entries.ncols() != input_grid.len() {
            return Err(FdaError::ShapeMismatch(format!(
                "hat matrix is {}x{} but grids have {} output and {} input points",
                entries.nrows(),
                entries.ncols(),
                output_grid.len(),
                input_grid.len()
            )));
        }
        Ok(Self {
            entries,
            input_grid,
            output_grid,
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn input_grid(&self) -> &Grid {
        &self.input_grid
    }

    pub fn output_grid(&self) -> &Grid {
        &self.output_grid
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().copied().collect()
    }

    pub fn is_square_on_same_grid(&self) -> bool {
        self.input_grid.same_as(&self.output_grid)
    }

    /// Smoothed values `x S^T` for an `n x M_in` value matrix.
    pub fn apply(&self, values: &DMatrix<f64>) -> DMatrix<f64> {
        values * self.entries.transpose()
    }
}

/// Hat matrix of a smoother between two grids.
pub fn hat_matrix(spec: &SmootherSpec, input_grid: &Grid, output_grid: &Grid) -> Result<HatMatrix> {
    spec.validate(Some(input_grid.len()))?;
    let input = input_grid.points();
    let output = output_grid.points();
    let entries = match spec {
        SmootherSpec::NadarayaWatson { bandwidth, kernel } => {
            let mut s = DMatrix::zeros(output.len(), input.len());
            for (i, &ti) in output.iter().enumerate() {
                for (j, &tj) in input.iter().enumerate() {
                    s[(i, j)] = kernel.weight((ti - tj) / bandwidth);
                }
                normalize_row(&mut s, i)?;
            }
            s
        }
        SmootherSpec::LocalLinear { bandwidth, kernel } => {
            let mut s = DMatrix::zeros(output.len(), input.len());
            for (i, &ti) in output.iter().enumerate() {
                let weights: Vec<f64> = input
                    .iter()
                    .map(|&tj| kernel.weight((ti - tj) / bandwidth))
                    .collect();
                let s1: f64 = weights.iter().zip(input).map(|(w, &tj)| w * (ti - tj)).sum();
                let s2: f64 = weights
                    .iter()
                    .zip(input)
                    .map(|(w, &tj)| w * (ti - tj) * (ti - tj))
                    .sum();
                for (j, &tj) in input.iter().enumerate() {
                    s[(i, j)] = weights[j] * (s2 - (ti - tj) * s1);
                }
                // a single point inside the window leaves no slope to fit:
                // fall back to the local-constant weights
                if s.row(i).iter().all(|v| *v == 0.0) {
                    for (j, w) in weights.iter().enumerate() {
                        s[(i, j)] = *w;
                    }
                }
                normalize_row(&mut s, i)?;
            }
            s
        }
        SmootherSpec::KNeighbors { k } => {
            let mut s = DMatrix::zeros(output.len(), input.len());
            for (i, &ti) in output.iter().enumerate() {
                let distances: Vec<f64> = input.iter().map(|&tj| (ti - tj).abs()).collect();
                let mut sorted = distances.clone();
                sorted.sort_by(f64::total_cmp);
                let cutoff = sorted[k - 1];
                let members: Vec<usize> = (0..input.len()).filter(|&j| distances[j] <= cutoff).collect();
                let w = 1.0 / members.len() as f64;
                for j in members {
                    s[(i, j)] = w;
                }
            }
            s
        }
        SmootherSpec::Basis {
            basis,
            lambda,
            operator,
        } => {
            let penalty = penalty_matrix(basis, operator, input_grid.len());
            basis_smoother_matrix(basis, *lambda, &penalty, input, output)?
        }
    };
    HatMatrix::new(entries, input_grid.clone(), output_grid.clone())
}

fn normalize_row(s: &mut DMatrix<f64>, i: usize) -> Result<()> {
    let total: f64 = s.row(i).sum();
    if !(total.is_finite() && total.abs() > 0.0) {
        return Err(FdaError::DegenerateRow { row: i });
    }
    s.row_mut(i).apply(|v| *v /= total);
    Ok(())
}

/// Replaces every curve by its smoothed version on the sample's own grid.
pub fn smooth(spec: &SmootherSpec, sample: &GridSample) -> Result<GridSample> {
    let hat = hat_matrix(spec, sample.grid(), sample.grid())?;
    sample.with_values(hat.apply(sample.values()))
}

/// Smooths onto a different output grid.
pub fn smooth_onto(spec: &SmootherSpec, sample: &GridSample, output: &Grid) -> Result<GridSample> {
    let hat = hat_matrix(spec, sample.grid(), output)?;
    let values = hat.apply(sample.values());
    let out = GridSample::from_matrix(output.clone(), values)?
        .with_names(sample.names().clone())?
        .with_extrapolation(sample.extrapolation())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: &[f64]) -> Grid {
        Grid::new(points.to_vec()).unwrap()
    }

    #[test]
    fn one_neighbour_is_identity() {
        let g = grid(&[0.0, 0.1, 0.3, 0.4, 0.7, 1.0]);
        let hat = hat_matrix(&SmootherSpec::KNeighbors { k: 1 }, &g, &g).unwrap();
        assert_eq!(hat.entries(), &DMatrix::identity(6, 6));
    }

    #[test]
    fn wide_uniform_window_averages_everything() {
        let g = grid(&[0.0, 0.1, 0.3, 0.4, 0.7, 1.0]);
        let spec = SmootherSpec::NadarayaWatson {
            bandwidth: 5.0,
            kernel: Kernel::Uniform,
        };
        let hat = hat_matrix(&spec, &g, &g).unwrap();
        assert!(hat.entries().iter().all(|v| (*v - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn gaussian_entry_by_hand() {
        let g = grid(&[0.0, 0.5, 1.0]);
        let spec = SmootherSpec::NadarayaWatson {
            bandwidth: 0.1,
            kernel: Kernel::Gaussian,
        };
        let hat = hat_matrix(&spec, &g, &g).unwrap();
        // kappa(0) / (kappa(0) + kappa(-5) + kappa(-10)), constants cancel
        let expected = 1.0 / (1.0 + (-12.5f64).exp() + (-50.0f64).exp());
        assert!((hat.entries()[(0, 0)] - expected).abs() < 1e-15);
        for i in 0..3 {
            assert!((hat.entries().row(i).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbour_ties_are_shared() {
        let g = grid(&[0.0, 1.0, 2.0]);
        let hat = hat_matrix(&SmootherSpec::KNeighbors { k: 2 }, &g, &g).unwrap();
        // middle point: itself plus both equidistant neighbours
        assert_eq!(hat.entries().row(1).iter().copied().collect::<Vec<_>>(), vec![1.0 / 3.0; 3]);
        assert_eq!(hat.entries()[(0, 2)], 0.0);
    }

    #[test]
    fn local_linear_reproduces_lines() {
        let g = grid(&[0.0, 0.1, 0.3, 0.4, 0.7, 1.0]);
        let spec = SmootherSpec::LocalLinear {
            bandwidth: 0.35,
            kernel: Kernel::Epanechnikov,
        };
        let sample = GridSample::new(g.points().to_vec(), vec![g.points().iter().map(|t| 2.0 * t - 1.0).collect()]).unwrap();
        let out = smooth(&spec, &sample).unwrap();
        for (a, b) in out.values().iter().zip(sample.values().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn local_linear_with_lone_point_uses_local_constant() {
        let g = grid(&[0.0, 0.1, 0.3, 0.4, 0.7, 1.0]);
        let spec = SmootherSpec::LocalLinear {
            bandwidth: 0.3,
            kernel: Kernel::Epanechnikov,
        };
        let hat = hat_matrix(&spec, &g, &g).unwrap();
        assert_eq!(hat.entries()[(5, 5)], 1.0);
    }

    #[test]
    fn degenerate_rows_are_reported() {
        let input = grid(&[0.0, 0.1]);
        let output = grid(&[0.0, 5.0]);
        let spec = SmootherSpec::NadarayaWatson {
            bandwidth: 0.01,
            kernel: Kernel::Uniform,
        };
        assert_eq!(
            hat_matrix(&spec, &input, &output),
            Err(FdaError::DegenerateRow { row: 1 })
        );
    }

    #[test]
    fn invalid_parameters() {
        let g = grid(&[0.0, 1.0]);
        assert!(hat_matrix(&SmootherSpec::KNeighbors { k: 3 }, &g, &g).is_err());
        let spec = SmootherSpec::NadarayaWatson {
            bandwidth: 0.0,
            kernel: Kernel::Gaussian,
        };
        assert!(hat_matrix(&spec, &g, &g).is_err());
    }

    #[test]
    fn smoothing_toy_row_with_huge_window_gives_its_mean() {
        let sample = GridSample::new(
            vec![0.0, 0.1, 0.3, 0.4, 0.7, 1.0],
            vec![vec![109.5, 115.8, 121.9, 130.0, 138.2, 141.1]],
        )
        .unwrap();
        let spec = SmootherSpec::NadarayaWatson {
            bandwidth: 1e3,
            kernel: Kernel::Uniform,
        };
        let out = smooth(&spec, &sample).unwrap();
        for v in out.values().iter() {
            assert!((v - 126.083_333_333_333_33).abs() < 1e-10);
        }
    }
}
