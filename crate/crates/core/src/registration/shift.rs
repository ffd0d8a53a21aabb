use nalgebra::DMatrix;

use super::warping::Shifts;
use crate::error::{FdaError, Result};
use crate::repr::sample::{check_grid_extrapolation, Interpolator};
use crate::repr::{Extrapolation, GridSample};

/// Shifts that move each landmark `tau_i` onto the common target
/// (default: the mean landmark location).
pub fn landmark_shift_deltas(landmarks: &[f64], target: Option<f64>) -> Result<Shifts> {
    if landmarks.is_empty() {
        return Err(FdaError::InvalidParameter("no landmarks given".into()));
    }
    let target = target.unwrap_or_else(|| landmarks.iter().sum::<f64>() / landmarks.len() as f64);
    Shifts::new(landmarks.iter().map(|tau| tau - target).collect())
}

/// `x_i(t + delta_i)` on the original grid; arguments leaving the domain are
/// handled by `extrapolation` (the sample's own rule when `None`).
pub fn shift(sample: &GridSample, shifts: &Shifts, extrapolation: Option<Extrapolation>) -> Result<GridSample> {
    if shifts.len() != sample.n_samples() {
        return Err(FdaError::ShapeMismatch(format!(
            "{} shifts for {} curves",
            shifts.len(),
            sample.n_samples()
        )));
    }
    let (a, b) = sample.domain_range();
    shifts.check_within(b - a)?;
    let queries: Vec<Vec<f64>> = shifts
        .deltas()
        .iter()
        .map(|d| sample.points().iter().map(|t| t + d).collect())
        .collect();
    let extrapolation = extrapolation.unwrap_or(sample.extrapolation());
    let values = sample.evaluate_per_curve(&queries, extrapolation)?;
    sample.with_values(values)
}

/// Landmark shift registration: shifts every landmark onto the target.
pub fn landmark_shift_register(
    sample: &GridSample,
    landmarks: &[f64],
    target: Option<f64>,
    extrapolation: Option<Extrapolation>,
) -> Result<(GridSample, Shifts)> {
    if landmarks.len() != sample.n_samples() {
        return Err(FdaError::ShapeMismatch(format!(
            "{} landmarks for {} curves",
            landmarks.len(),
            sample.n_samples()
        )));
    }
    let shifts = landmark_shift_deltas(landmarks, target)?;
    let registered = shift(sample, &shifts, extrapolation)?;
    Ok((registered, shifts))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresShiftOptions {
    /// Fixed template on the sample grid; the running mean is used otherwise.
    pub template: Option<Vec<f64>>,
    pub max_iter: usize,
    /// Stop once REGSSE decreases by less than `tol * initial REGSSE`.
    pub tol: f64,
    pub extrapolation: Option<Extrapolation>,
}

impl Default for LeastSquaresShiftOptions {
    fn default() -> Self {
        Self {
            template: None,
            max_iter: 20,
            tol: 1e-8,
            extrapolation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRegistration {
    pub registered: GridSample,
    pub shifts: Shifts,
    pub converged: bool,
    pub iterations: usize,
    /// REGSSE before the first update and after every iteration.
    pub regsse_history: Vec<f64>,
}

struct ShiftProblem<'a> {
    interpolator: Interpolator<'a>,
    points: &'a [f64],
    domain: (f64, f64),
    extrapolation: Extrapolation,
    weights: Vec<f64>,
}

impl ShiftProblem<'_> {
    fn shifted_curve(&self, i: usize, delta: f64) -> Result<Vec<f64>> {
        let queries: Vec<f64> = self.points.iter().map(|t| t + delta).collect();
        self.interpolator.curve_at(i, &queries, self.extrapolation, self.domain)
    }

    fn cost(&self, i: usize, delta: f64, template: &[f64]) -> Result<f64> {
        let curve = self.shifted_curve(i, delta)?;
        Ok(self
            .weights
            .iter()
            .zip(curve.iter().zip(template))
            .map(|(w, (x, mu))| w * (x - mu) * (x - mu))
            .sum())
    }

    fn regsse(&self, values: &DMatrix<f64>, template: &[f64]) -> f64 {
        (0..values.nrows())
            .map(|i| {
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| {
                        let r = values[(i, j)] - template[j];
                        w * r * r
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

fn column_mean(values: &DMatrix<f64>) -> Vec<f64> {
    let n = values.nrows() as f64;
    values.column_iter().map(|c| c.sum() / n).collect()
}

/// Golden-section minimization of a unimodal-ish function over `[lo, hi]`.
fn golden_section<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Shift registration minimizing the integrated squared distance to the mean
/// (or to a fixed template).
pub fn least_squares_shift_register(
    sample: &GridSample,
    options: &LeastSquaresShiftOptions,
) -> Result<ShiftRegistration> {
    let n = sample.n_samples();
    let m = sample.n_points();
    if let Some(template) = &options.template {
        if template.len() != m {
            return Err(FdaError::ShapeMismatch(format!(
                "template has {} values but the grid has {m} points",
                template.len()
            )));
        }
    } else if n < 2 {
        return Err(FdaError::InsufficientSample {
            required: 2,
            available: n,
        });
    }
    let extrapolation = options.extrapolation.unwrap_or(sample.extrapolation());
    check_grid_extrapolation(extrapolation)?;
    let problem = ShiftProblem {
        interpolator: sample.interpolator()?,
        points: sample.points(),
        domain: sample.domain_range(),
        extrapolation,
        weights: sample.grid().trapezoid_weights(),
    };
    let (a, b) = sample.domain_range();
    let half_width = (b - a) / 4.0;
    let search_tol = 1e-10 * (b - a);

    let mut deltas = vec![0.0; n];
    let mut registered = sample.clone();
    let mut template = options
        .template
        .clone()
        .unwrap_or_else(|| column_mean(sample.values()));
    let initial = problem.regsse(registered.values(), &template);
    let mut history = vec![initial];
    let threshold = options.tol * initial;
    let mut converged = initial == 0.0;
    let mut iterations = 0;

    while !converged && iterations < options.max_iter {
        iterations += 1;
        for (i, delta) in deltas.iter_mut().enumerate() {
            let current = problem.cost(i, *delta, &template)?;
            let (candidate, cost) =
                golden_section(|d| problem.cost(i, d, &template), -half_width, half_width, search_tol)?;
            if cost < current {
                *delta = candidate;
            }
        }
        registered = shift(sample, &Shifts::new(deltas.clone())?, Some(problem.extrapolation))?;
        if options.template.is_none() {
            template = column_mean(registered.values());
        }
        let regsse = problem.regsse(registered.values(), &template);
        let previous = *history.last().expect("history starts non-empty");
        history.push(regsse);
        if previous - regsse < threshold || regsse == 0.0 {
            converged = true;
        }
    }

    Ok(ShiftRegistration {
        registered,
        shifts: Shifts::new(deltas)?,
        converged,
        iterations,
        regsse_history: history,
    })
}
