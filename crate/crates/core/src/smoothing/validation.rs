use rayon::prelude::*;

use super::hat::{hat_matrix, HatMatrix, SmootherSpec};
use crate::error::{FdaError, Result};
use crate::repr::GridSample;

/// Penalty `Xi(S)` inflating the mean squared residual in GCV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyFunction {
    /// `1 / (1 - tr(S)/M)^2`
    #[default]
    Gcv,
    /// `exp(2 tr(S)/M)`
    Akaike,
    /// `1 + 2 tr(S)/M`
    Shibata,
}

impl PenaltyFunction {
    pub fn value(&self, hat: &HatMatrix) -> Result<f64> {
        let ratio = hat.trace() / hat.output_grid().len() as f64;
        match self {
            PenaltyFunction::Gcv => {
                if ratio >= 1.0 {
                    return Err(FdaError::PenaltyUndefined { ratio });
                }
                Ok(1.0 / ((1.0 - ratio) * (1.0 - ratio)))
            }
            PenaltyFunction::Akaike => Ok((2.0 * ratio).exp()),
            PenaltyFunction::Shibata => Ok(1.0 + 2.0 * ratio),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PenaltyFunction::Gcv => "default",
            PenaltyFunction::Akaike => "akaike",
            PenaltyFunction::Shibata => "shibata",
        }
    }
}

fn check_hat_for(hat: &HatMatrix, sample: &GridSample) -> Result<()> {
    if !hat.is_square_on_same_grid() || !hat.input_grid().same_as(sample.grid()) {
        return Err(FdaError::GridMismatch);
    }
    Ok(())
}

/// Leave-one-out score, averaged over curves. Lower is better.
pub fn loo_cv_score(hat: &HatMatrix, sample: &GridSample) -> Result<f64> {
    check_hat_for(hat, sample)?;
    let diagonal = hat.diagonal();
    if let Some(index) = diagonal.iter().position(|s| (1.0 - s).abs() <= 1e-12) {
        return Err(FdaError::LeverageOne { index });
    }
    let fitted = hat.apply(sample.values());
    let m = sample.n_points() as f64;
    let n = sample.n_samples();
    let total: f64 = (0..n)
        .map(|i| {
            diagonal
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let r = (sample.values()[(i, j)] - fitted[(i, j)]) / (1.0 - s);
                    r * r
                })
                .sum::<f64>()
                / m
        })
        .sum();
    Ok(total / n as f64)
}

/// `xi` times the mean squared residual, averaged over curves.
pub fn penalized_mean_squared_residual(hat: &HatMatrix, sample: &GridSample, xi: f64) -> Result<f64> {
    check_hat_for(hat, sample)?;
    let fitted = hat.apply(sample.values());
    let m = sample.n_points() as f64;
    let n = sample.n_samples();
    let total: f64 = (0..n)
        .map(|i| {
            (0..sample.n_points())
                .map(|j| {
                    let r = sample.values()[(i, j)] - fitted[(i, j)];
                    r * r
                })
                .sum::<f64>()
                / m
        })
        .sum();
    Ok(xi * total / n as f64)
}

/// Generalized cross-validation score. Lower is better.
pub fn gcv_score(hat: &HatMatrix, sample: &GridSample, penalty: PenaltyFunction) -> Result<f64> {
    check_hat_for(hat, sample)?;
    let xi = penalty.value(hat)?;
    penalized_mean_squared_residual(hat, sample, xi)
}

/// Validation criterion minimized by [`parameter_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scorer {
    LeaveOneOut,
    Gcv(PenaltyFunction),
}

impl Scorer {
    pub fn score(&self, hat: &HatMatrix, sample: &GridSample) -> Result<f64> {
        match self {
            Scorer::LeaveOneOut => loo_cv_score(hat, sample),
            Scorer::Gcv(penalty) => gcv_score(hat, sample, *penalty),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub parameter: f64,
    pub score: Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_parameter: f64,
    pub best_score: f64,
    pub best_spec: SmootherSpec,
    pub hat: HatMatrix,
    /// One entry per distinct candidate, in increasing parameter order.
    pub scores: Vec<ScoreEntry>,
}

type Scored = (f64, SmootherSpec, HatMatrix);

/// Scores every candidate parameter of `template` on `sample` and keeps the
/// minimizer; ties go to the smaller parameter.
pub fn parameter_search(
    template: &SmootherSpec,
    candidates: &[f64],
    scorer: Scorer,
    sample: &GridSample,
) -> Result<SearchResult> {
    if candidates.is_empty() {
        return Err(FdaError::InvalidParameter("no candidate parameters".into()));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let evaluated: Vec<(f64, Result<Scored>)> = sorted
        .par_iter()
        .map(|&p| {
            let outcome = template.with_parameter(p).and_then(|spec| {
                let hat = hat_matrix(&spec, sample.grid(), sample.grid())?;
                let score = scorer.score(&hat, sample)?;
                Ok((score, spec, hat))
            });
            (p, outcome)
        })
        .collect();

    let mut best: Option<(f64, f64, SmootherSpec, HatMatrix)> = None;
    let mut scores = Vec::with_capacity(evaluated.len());
    let mut failures = Vec::new();
    for (parameter, outcome) in evaluated {
        match outcome {
            Ok((score, spec, hat)) => {
                scores.push(ScoreEntry {
                    parameter,
                    score: Ok(score),
                });
                if best.as_ref().is_none_or(|(_, s, _, _)| score < *s) {
                    best = Some((parameter, score, spec, hat));
                }
            }
            Err(err) => {
                failures.push(format!("{parameter}: {}", err.name()));
                scores.push(ScoreEntry {
                    parameter,
                    score: Err(err),
                });
            }
        }
    }
    let (best_parameter, best_score, best_spec, hat) =
        best.ok_or_else(|| FdaError::AllCandidatesFailed(failures.join(", ")))?;
    Ok(SearchResult {
        best_parameter,
        best_score,
        best_spec,
        hat,
        scores,
    })
}
