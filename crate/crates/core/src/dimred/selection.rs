use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::dcor::CenteredDistances;
use crate::error::{FdaError, Result};
use crate::repr::GridSample;

/// Selected design points, in selection order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub selected_points: Vec<f64>,
    pub selected_indices: Vec<usize>,
    /// Criterion value of each selected point when it was picked.
    pub scores: Vec<f64>,
}

impl SelectionResult {
    fn from_picks(sample: &GridSample, picks: Vec<(usize, f64)>) -> Self {
        Self {
            selected_points: picks.iter().map(|(j, _)| sample.points()[*j]).collect(),
            selected_indices: picks.iter().map(|(j, _)| *j).collect(),
            scores: picks.iter().map(|(_, s)| *s).collect(),
        }
    }
}

fn check_labels(sample: &GridSample, labels: &[usize]) -> Result<BTreeMap<usize, usize>> {
    if labels.len() != sample.n_samples() {
        return Err(FdaError::ShapeMismatch(format!(
            "{} labels for {} curves",
            labels.len(),
            sample.n_samples()
        )));
    }
    let mut counts = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    if counts.len() < 2 {
        return Err(FdaError::InvalidParameter("at least two classes are required".into()));
    }
    Ok(counts)
}

fn column(values: &DMatrix<f64>, j: usize) -> Vec<f64> {
    values.column(j).iter().copied().collect()
}

/// Distance correlation of every grid column with the labels.
fn relevance(values: &DMatrix<f64>, labels: &CenteredDistances) -> Vec<f64> {
    (0..values.ncols())
        .into_par_iter()
        .map(|j| CenteredDistances::real(&column(values, j)).dependence(labels))
        .collect()
}

/// Index of the largest value; ties go to the smallest index.
fn argmax(values: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    values
        .into_iter()
        .fold(None, |best: Option<(usize, f64)>, (j, v)| match best {
            Some((_, b)) if v <= b => best,
            _ => Some((j, v)),
        })
}

/// Greedy minimum-redundancy maximum-relevance selection, scoring each
/// candidate by relevance minus mean redundancy with the points already chosen.
pub fn mrmr_select(sample: &GridSample, labels: &[usize], n_features: usize) -> Result<SelectionResult> {
    check_labels(sample, labels)?;
    let m = sample.n_points();
    if n_features == 0 || n_features > m {
        return Err(FdaError::InvalidParameter(format!(
            "cannot select {n_features} of {m} points"
        )));
    }
    let values = sample.values();
    let columns: Vec<CenteredDistances> = (0..m)
        .into_par_iter()
        .map(|j| CenteredDistances::real(&column(values, j)))
        .collect();
    let y = CenteredDistances::labels(labels);
    let relevance: Vec<f64> = columns.par_iter().map(|c| c.dependence(&y)).collect();

    let mut picks: Vec<(usize, f64)> = Vec::with_capacity(n_features);
    let mut redundancy_sum = vec![0.0; m];
    let mut chosen = vec![false; m];
    while picks.len() < n_features {
        let k = picks.len() as f64;
        let best = argmax((0..m).filter(|&j| !chosen[j]).map(|j| {
            let penalty = if k > 0.0 { redundancy_sum[j] / k } else { 0.0 };
            (j, relevance[j] - penalty)
        }))
        .expect("n_features <= M leaves a candidate");
        chosen[best.0] = true;
        picks.push(best);
        let added = &columns[best.0];
        let updates: Vec<(usize, f64)> = (0..m)
            .into_par_iter()
            .filter(|&j| !chosen[j])
            .map(|j| (j, columns[j].dependence(added)))
            .collect();
        for (j, r) in updates {
            redundancy_sum[j] += r;
        }
    }
    Ok(SelectionResult::from_picks(sample, picks))
}

/// Covariance used by the RKHS criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RkhsCovariance {
    /// Within-class covariances pooled with weights `n_c - 1`.
    #[default]
    PooledWithinClass,
    /// Covariance of the whole sample, ignoring labels.
    Marginal,
}

fn covariance_of(values: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    let m = values.ncols();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..m).map(|j| rows.iter().map(|&i| values[(i, j)]).sum::<f64>() / n).collect();
    let mut cov = DMatrix::zeros(m, m);
    for &i in rows {
        let d = DVector::from_iterator(m, (0..m).map(|j| values[(i, j)] - mean[j]));
        cov += &d * d.transpose();
    }
    cov
}

/// Mahalanobis distance between the class means at the chosen points, with
/// a relative diagonal jitter.
fn rkhs_criterion(delta: &[f64], covariance: &DMatrix<f64>, points: &[usize]) -> Option<f64> {
    let k = points.len();
    let mut sub = DMatrix::from_fn(k, k, |a, b| covariance[(points[a], points[b])]);
    let jitter = 1e-10 * sub.trace() / k as f64;
    for a in 0..k {
        sub[(a, a)] += jitter;
    }
    let d = DVector::from_iterator(k, points.iter().map(|&j| delta[j]));
    let chol = sub.cholesky()?;
    let value = d.dot(&chol.solve(&d));
    value.is_finite().then_some(value)
}

/// Greedy RKHS variable selection for two classes: adds the point that
/// maximizes the Mahalanobis distance between class means.
pub fn rkhs_variable_selection(
    sample: &GridSample,
    labels: &[usize],
    n_features: usize,
    covariance: RkhsCovariance,
) -> Result<SelectionResult> {
    let counts = check_labels(sample, labels)?;
    if counts.len() != 2 {
        return Err(FdaError::InvalidParameter("exactly two classes are required".into()));
    }
    if counts.values().any(|&c| c < 2) {
        return Err(FdaError::InvalidParameter("each class needs at least two curves".into()));
    }
    let m = sample.n_points();
    if n_features == 0 || n_features > m {
        return Err(FdaError::InvalidParameter(format!(
            "cannot select {n_features} of {m} points"
        )));
    }
    let classes: Vec<usize> = counts.keys().copied().collect();
    let values = sample.values();
    let members = |c: usize| -> Vec<usize> { (0..labels.len()).filter(|&i| labels[i] == c).collect() };
    let (rows0, rows1) = (members(classes[0]), members(classes[1]));
    let class_mean = |rows: &[usize], j: usize| rows.iter().map(|&i| values[(i, j)]).sum::<f64>() / rows.len() as f64;
    let delta: Vec<f64> = (0..m).map(|j| class_mean(&rows1, j) - class_mean(&rows0, j)).collect();
    let cov = match covariance {
        RkhsCovariance::PooledWithinClass => {
            (covariance_of(values, &rows0) + covariance_of(values, &rows1)) / (labels.len() - 2) as f64
        }
        RkhsCovariance::Marginal => {
            let all: Vec<usize> = (0..labels.len()).collect();
            covariance_of(values, &all) / (labels.len() - 1) as f64
        }
    };

    let mut chosen: Vec<usize> = Vec::new();
    let mut picks = Vec::new();
    while picks.len() < n_features {
        let scores: Vec<(usize, Option<f64>)> = (0..m)
            .into_par_iter()
            .filter(|j| !chosen.contains(j))
            .map(|j| {
                let mut trial = chosen.clone();
                trial.push(j);
                (j, rkhs_criterion(&delta, &cov, &trial))
            })
            .collect();
        let best = argmax(scores.into_iter().filter_map(|(j, s)| s.map(|s| (j, s))))
            .ok_or(FdaError::SingularCovariance)?;
        chosen.push(best.0);
        picks.push(best);
    }
    Ok(SelectionResult::from_picks(sample, picks))
}

/// Default half-width, in grid indices, of the maxima-hunting neighbourhood.
pub const DEFAULT_MH_WINDOW: usize = 1;

/// Default dependence level below which recursive maxima hunting stops.
pub const DEFAULT_RMH_THRESHOLD: f64 = 0.1;

/// Local maxima of `r`: strictly above the neighbours on the left and at least
/// as large as those on the right within `window` indices.
pub(crate) fn local_maxima(r: &[f64], window: usize) -> Vec<usize> {
    let m = r.len();
    (0..m)
        .filter(|&j| {
            let left = j.saturating_sub(window);
            let right = (j + window).min(m - 1);
            (left..j).all(|k| r[j] > r[k]) && (j + 1..=right).all(|k| r[j] >= r[k])
        })
        .collect()
}

/// Maxima hunting: local maxima of the distance correlation between `X(t)`
/// and the labels, strongest first.
pub fn maxima_hunting(
    sample: &GridSample,
    labels: &[usize],
    n_features: Option<usize>,
    window: usize,
) -> Result<SelectionResult> {
    check_labels(sample, labels)?;
    if window == 0 {
        return Err(FdaError::InvalidParameter("window must be at least 1".into()));
    }
    let r = relevance(sample.values(), &CenteredDistances::labels(labels));
    let mut maxima = local_maxima(&r, window);
    if maxima.is_empty() {
        return Err(FdaError::NoMaximaFound);
    }
    maxima.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
    if let Some(limit) = n_features {
        maxima.truncate(limit);
    }
    let picks = maxima.into_iter().map(|j| (j, r[j])).collect();
    Ok(SelectionResult::from_picks(sample, picks))
}

/// Recursive maxima hunting: picks the most dependent point, removes the
/// linear prediction of every `X(t)` from `X(t*)`, and repeats until the
/// dependence drops below `threshold` or `max_features` points are chosen.
pub fn recursive_maxima_hunting(
    sample: &GridSample,
    labels: &[usize],
    max_features: usize,
    threshold: f64,
) -> Result<SelectionResult> {
    check_labels(sample, labels)?;
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(FdaError::InvalidParameter(format!("dependence threshold must be nonnegative, got {threshold}")));
    }
    let mut values = sample.values().clone();
    let y = CenteredDistances::labels(labels);
    let mut picks = Vec::new();
    while picks.len() < max_features {
        let r = relevance(&values, &y);
        let (star, score) = argmax(r.into_iter().enumerate()).expect("grid is non-empty");
        if score < threshold {
            break;
        }
        picks.push((star, score));
        rmh_correct(&mut values, star)?;
    }
    Ok(SelectionResult::from_picks(sample, picks))
}

/// One recursive-maxima-hunting correction step applied to `sample` at grid
/// index `star`.
pub fn rmh_residuals(sample: &GridSample, star: usize) -> Result<GridSample> {
    if star >= sample.n_points() {
        return Err(FdaError::InvalidParameter(format!("grid index {star} out of range")));
    }
    let mut values = sample.values().clone();
    rmh_correct(&mut values, star)?;
    sample.with_values(values)
}

/// Removes from every column its linear prediction from column `star`, using
/// the covariance of the current values.
pub(crate) fn rmh_correct(values: &mut DMatrix<f64>, star: usize) -> Result<()> {
    let (n, m) = (values.nrows(), values.ncols());
    let means: Vec<f64> = (0..m).map(|j| values.column(j).sum() / n as f64).collect();
    let cov_with_star = |j: usize, v: &DMatrix<f64>| {
        (0..n)
            .map(|i| (v[(i, j)] - means[j]) * (v[(i, star)] - means[star]))
            .sum::<f64>()
            / (n as f64 - 1.0)
    };
    let k_star = cov_with_star(star, values);
    if !(k_star > 0.0) {
        return Err(FdaError::DegenerateVariance { index: star });
    }
    let ratios: Vec<f64> = (0..m).map(|j| cov_with_star(j, values) / k_star).collect();
    let anchor: Vec<f64> = values.column(star).iter().copied().collect();
    for j in 0..m {
        if j == star {
            values.column_mut(j).fill(0.0);
            continue;
        }
        for i in 0..n {
            values[(i, j)] -= ratios[j] * anchor[i];
        }
    }
    Ok(())
}
