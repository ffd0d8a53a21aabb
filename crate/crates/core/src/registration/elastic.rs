use rayon::prelude::*;

use super::srvf::{dp_align_values, srvf_transform};
use super::warping::{apply_warping, Warping};
use crate::error::{FdaError, Result};
use crate::repr::{Grid, GridSample};

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticOptions {
    /// Fixed template curve on the sample grid. Without one, the template is
    /// the Karcher mean of the SRVFs.
    pub template: Option<Vec<f64>>,
    pub max_iter: usize,
    /// Relative L2 change of the template SRVF below which iteration stops.
    pub tol: f64,
}

impl Default for ElasticOptions {
    fn default() -> Self {
        Self {
            template: None,
            max_iter: 20,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticRegistration {
    pub registered: GridSample,
    pub warping: Warping,
    /// SRVF of the final template.
    pub template_srvf: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn mean_rows(sample: &GridSample) -> Vec<f64> {
    let n = sample.n_samples() as f64;
    sample.values().column_iter().map(|c| c.sum() / n).collect()
}

fn l2_norm(grid: &Grid, values: &[f64]) -> f64 {
    let squared: Vec<f64> = values.iter().map(|v| v * v).collect();
    grid.integrate(&squared).max(0.0).sqrt()
}

fn align_all(sample: &GridSample, q: &GridSample, template: &[f64]) -> Result<(GridSample, Warping)> {
    let grid = sample.grid();
    let rows: Vec<Vec<f64>> = (0..sample.n_samples())
        .into_par_iter()
        .map(|i| dp_align_values(grid, &q.curve(i), template))
        .collect::<Result<_>>()?;
    let warping = Warping::from_rows(grid, rows)?;
    let registered = apply_warping(sample, &warping)?;
    Ok((registered, warping))
}

/// Elastic (SRVF) registration to a fixed template or to the iteratively
/// refined Karcher mean.
pub fn elastic_register(sample: &GridSample, options: &ElasticOptions) -> Result<ElasticRegistration> {
    let grid = sample.grid();
    let q = srvf_transform(sample)?;
    let mut template = match &options.template {
        Some(t) => {
            if t.len() != sample.n_points() {
                return Err(FdaError::ShapeMismatch(format!(
                    "template has {} values but the grid has {} points",
                    t.len(),
                    sample.n_points()
                )));
            }
            let single = GridSample::from_matrix(grid.clone(), nalgebra::DMatrix::from_row_slice(1, t.len(), t))?;
            srvf_transform(&single)?.curve(0)
        }
        None => {
            if sample.n_samples() == 1 {
                return Ok(ElasticRegistration {
                    registered: sample.clone(),
                    warping: Warping::identity(grid, 1),
                    template_srvf: q.curve(0),
                    converged: true,
                    iterations: 0,
                });
            }
            mean_rows(&q)
        }
    };

    let (mut registered, mut warping) = align_all(sample, &q, &template)?;
    let mut iterations = 1;
    let mut converged = options.template.is_some();
    while !converged && iterations < options.max_iter {
        let updated = mean_rows(&srvf_transform(&registered)?);
        let difference: Vec<f64> = updated.iter().zip(&template).map(|(a, b)| a - b).collect();
        let scale = l2_norm(grid, &template);
        let change = l2_norm(grid, &difference);
        template = updated;
        if change <= options.tol * scale {
            converged = true;
            break;
        }
        let (r, w) = align_all(sample, &q, &template)?;
        registered = r;
        warping = w;
        iterations += 1;
    }

    Ok(ElasticRegistration {
        registered,
        warping,
        template_srvf: template,
        converged,
        iterations,
    })
}

/// Mean pairwise L2 distance between the curves of a sample.
pub fn mean_pairwise_distance(sample: &GridSample) -> f64 {
    let n = sample.n_samples();
    if n < 2 {
        return 0.0;
    }
    let grid = sample.grid();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let diff: Vec<f64> = sample
                .values()
                .row(i)
                .iter()
                .zip(sample.values().row(j).iter())
                .map(|(a, b)| a - b)
                .collect();
            total += l2_norm(grid, &diff);
        }
    }
    total / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::linspace;

    fn bumps(centers: &[f64]) -> GridSample {
        let pts = linspace(0.0, 1.0, 101);
        let rows = centers
            .iter()
            .map(|c| pts.iter().map(|t| (-(t - c) * (t - c) / (2.0 * 0.07 * 0.07)).exp()).collect())
            .collect();
        GridSample::new(pts, rows).unwrap()
    }

    #[test]
    fn single_curve_is_left_alone() {
        let s = bumps(&[0.4]);
        let r = elastic_register(&s, &Default::default()).unwrap();
        assert_eq!(r.registered, s);
        assert_eq!(r.warping.max_deviation(0), 0.0);
    }

    #[test]
    fn shifted_bumps_get_closer() {
        let s = bumps(&[0.4, 0.5, 0.6]);
        let r = elastic_register(&s, &Default::default()).unwrap();
        let before = mean_pairwise_distance(&s);
        let after = mean_pairwise_distance(&r.registered);
        assert!(after < 0.3 * before, "before {before} after {after}");
    }

    #[test]
    fn fixed_template_runs_once() {
        let s = bumps(&[0.45, 0.55]);
        let template = bumps(&[0.5]).curve(0);
        let r = elastic_register(
            &s,
            &ElasticOptions {
                template: Some(template),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn pairwise_distance_by_hand() {
        // constant curves 0 and 2 on [0, 1]: distance 2
        let s = GridSample::new(vec![0.0, 0.5, 1.0], vec![vec![0.0; 3], vec![2.0; 3]]).unwrap();
        assert!((mean_pairwise_distance(&s) - 2.0).abs() < 1e-15);
    }
}
