use nalgebra::DMatrix;

use crate::error::{FdaError, Result};
use crate::repr::{Grid, GridSample};

/// Smallest admissible finite-difference slope of a warping.
pub const MIN_WARP_SLOPE: f64 = 1e-8;

/// Per-curve time shifts, in domain units.
#[derive(Debug, Clone, PartialEq)]
pub struct Shifts {
    deltas: Vec<f64>,
}

impl Shifts {
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if let Some(d) = deltas.iter().find(|d| !d.is_finite()) {
            return Err(FdaError::InvalidParameter(format!("shift {d} is not finite")));
        }
        Ok(Self { deltas })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            deltas: vec![0.0; n],
        }
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub(crate) fn check_within(&self, length: f64) -> Result<()> {
        match self.deltas.iter().find(|d| d.abs() >= length) {
            Some(d) => Err(FdaError::InvalidParameter(format!(
                "shift {d} is not smaller than the domain length {length}"
            ))),
            None => Ok(()),
        }
    }
}

/// Warping functions `gamma_i` sampled on a grid: endpoints pinned,
/// strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Warping {
    sample: GridSample,
}

impl Warping {
    pub fn new(sample: GridSample) -> Result<Self> {
        let pts = sample.points();
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        for i in 0..sample.n_samples() {
            let row = sample.values().row(i);
            if row[0] != first || row[pts.len() - 1] != last {
                return Err(FdaError::InvalidParameter(format!(
                    "warping {i} does not fix the domain endpoints"
                )));
            }
            for j in 1..pts.len() {
                let slope = (row[j] - row[j - 1]) / (pts[j] - pts[j - 1]);
                if !(slope >= MIN_WARP_SLOPE) {
                    return Err(FdaError::InvalidParameter(format!(
                        "warping {i} is not strictly increasing near grid index {j}"
                    )));
                }
            }
        }
        Ok(Self { sample })
    }

    pub fn identity(grid: &Grid, n: usize) -> Self {
        let mut values = DMatrix::zeros(n, grid.len());
        for mut row in values.row_iter_mut() {
            for (v, t) in row.iter_mut().zip(grid.points()) {
                *v = *t;
            }
        }
        let sample = GridSample::from_matrix(grid.clone(), values).expect("grid values are finite");
        Self { sample }
    }

    /// Builds a warping from rows of values on `grid`, forcing the endpoint
    /// values to match exactly.
    pub(crate) fn from_rows(grid: &Grid, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = grid.len();
        let pinned: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|mut r| {
                r[0] = grid.first();
                r[m - 1] = grid.last();
                r
            })
            .collect();
        let values = DMatrix::from_fn(pinned.len(), m, |i, j| pinned[i][j]);
        Self::new(GridSample::from_matrix(grid.clone(), values)?)
    }

    pub fn sample(&self) -> &GridSample {
        &self.sample
    }

    pub fn into_sample(self) -> GridSample {
        self.sample
    }

    pub fn n_samples(&self) -> usize {
        self.sample.n_samples()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.sample.curve(i)
    }

    /// Largest deviation from the identity, in grid steps of the largest
    /// grid spacing.
    pub fn max_deviation(&self, i: usize) -> f64 {
        self.sample
            .points()
            .iter()
            .zip(self.sample.values().row(i).iter())
            .map(|(t, g)| (g - t).abs())
            .fold(0.0, f64::max)
    }
}

/// Composes each curve with its warping: `x_i(gamma_i(t))` on the grid.
pub fn apply_warping(sample: &GridSample, warping: &Warping) -> Result<GridSample> {
    if !sample.grid().same_as(warping.sample().grid()) {
        return Err(FdaError::GridMismatch);
    }
    if sample.n_samples() != warping.n_samples() {
        return Err(FdaError::ShapeMismatch(format!(
            "{} warpings for {} curves",
            warping.n_samples(),
            sample.n_samples()
        )));
    }
    let queries: Vec<Vec<f64>> = (0..sample.n_samples()).map(|i| warping.row(i)).collect();
    let values = sample.evaluate_per_curve(&queries, sample.extrapolation())?;
    sample.with_values(values)
}
