use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FdaError, Result};
use crate::repr::GridSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DepthMethod {
    #[serde(rename = "fm")]
    FraimanMuniz,
    #[serde(rename = "bd")]
    BandDepth,
    #[default]
    #[serde(rename = "mbd")]
    ModifiedBandDepth,
}

impl DepthMethod {
    pub fn name(&self) -> &'static str {
        match self {
            DepthMethod::FraimanMuniz => "fm",
            DepthMethod::BandDepth => "bd",
            DepthMethod::ModifiedBandDepth => "mbd",
        }
    }
}

impl fmt::Display for DepthMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DepthMethod {
    type Err = FdaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fm" => Ok(DepthMethod::FraimanMuniz),
            "bd" => Ok(DepthMethod::BandDepth),
            "mbd" => Ok(DepthMethod::ModifiedBandDepth),
            other => Err(FdaError::InvalidParameter(format!("unknown depth method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthReport {
    pub method: DepthMethod,
    pub values: Vec<f64>,
}

/// Per grid point, the number of curves strictly below and strictly above
/// each curve: `counts[j][i] = (below, above)`.
fn rank_counts(sample: &GridSample) -> Vec<Vec<(u64, u64)>> {
    let n = sample.n_samples();
    (0..sample.n_points())
        .into_par_iter()
        .map(|j| {
            let mut sorted: Vec<f64> = sample.values().column(j).iter().copied().collect();
            sorted.sort_by(f64::total_cmp);
            (0..n)
                .map(|i| {
                    let v = sample.values()[(i, j)];
                    let below = sorted.partition_point(|x| *x < v) as u64;
                    let above = (n - sorted.partition_point(|x| *x <= v)) as u64;
                    (below, above)
                })
                .collect()
        })
        .collect()
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Length-normalized trapezoid integral of per-point values `f(j, i)` for
/// every curve `i`.
fn normalized_integral(sample: &GridSample, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let weights = sample.grid().trapezoid_weights();
    let span = sample.grid().span();
    (0..sample.n_samples())
        .map(|i| weights.iter().enumerate().map(|(j, w)| w * f(j, i)).sum::<f64>() / span)
        .collect()
}

/// Number of pairs `j < k` whose closed band contains each curve at each grid
/// point: `band_counts[j][i]`.
pub fn band_counts(sample: &GridSample) -> Vec<Vec<u64>> {
    let n = sample.n_samples() as u64;
    rank_counts(sample)
        .into_iter()
        .map(|col| {
            col.into_iter()
                .map(|(below, above)| pairs(n) - pairs(below) - pairs(above))
                .collect()
        })
        .collect()
}

/// Modified band depth computed from per-point band counts.
pub fn modified_band_depth_from_counts(sample: &GridSample, counts: &[Vec<u64>]) -> Vec<f64> {
    let total = pairs(sample.n_samples() as u64) as f64;
    normalized_integral(sample, |j, i| counts[j][i] as f64)
        .into_iter()
        .map(|v| v / total)
        .collect()
}

pub fn fraiman_muniz_depth(sample: &GridSample) -> Result<DepthReport> {
    let n = sample.n_samples() as f64;
    if sample.n_samples() == 0 {
        return Err(FdaError::InsufficientSample { required: 1, available: 0 });
    }
    let ranks = rank_counts(sample);
    let values = normalized_integral(sample, |j, i| {
        let cdf = (n - ranks[j][i].1 as f64) / n;
        1.0 - (0.5 - cdf).abs()
    });
    Ok(DepthReport {
        method: DepthMethod::FraimanMuniz,
        values,
    })
}

fn require_two(sample: &GridSample) -> Result<()> {
    if sample.n_samples() < 2 {
        return Err(FdaError::InsufficientSample {
            required: 2,
            available: sample.n_samples(),
        });
    }
    Ok(())
}

pub fn band_depth(sample: &GridSample) -> Result<DepthReport> {
    require_two(sample)?;
    let n = sample.n_samples();
    let m = sample.n_points();
    let values = sample.values();
    let counts: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut inside = 0u64;
            for a in 0..n {
                for b in a + 1..n {
                    let contained = (0..m).all(|j| {
                        let (x, y) = (values[(a, j)], values[(b, j)]);
                        let v = values[(i, j)];
                        x.min(y) <= v && v <= x.max(y)
                    });
                    inside += contained as u64;
                }
            }
            inside
        })
        .collect();
    let total = pairs(n as u64) as f64;
    Ok(DepthReport {
        method: DepthMethod::BandDepth,
        values: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

pub fn modified_band_depth(sample: &GridSample) -> Result<DepthReport> {
    require_two(sample)?;
    let counts = band_counts(sample);
    Ok(DepthReport {
        method: DepthMethod::ModifiedBandDepth,
        values: modified_band_depth_from_counts(sample, &counts),
    })
}

pub fn depth(sample: &GridSample, method: DepthMethod) -> Result<DepthReport> {
    match method {
        DepthMethod::FraimanMuniz => fraiman_muniz_depth(sample),
        DepthMethod::BandDepth => band_depth(sample),
        DepthMethod::ModifiedBandDepth => modified_band_depth(sample),
    }
}

/// Mean epigraph index: time-averaged share of curves lying on or above each
/// curve.
pub fn mean_epigraph_index(sample: &GridSample) -> Result<Vec<f64>> {
    let n = sample.n_samples();
    if n == 0 {
        return Err(FdaError::InsufficientSample { required: 1, available: 0 });
    }
    let ranks = rank_counts(sample);
    Ok(normalized_integral(sample, |j, i| (n as u64 - ranks[j][i].0) as f64 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constants(levels: &[f64]) -> GridSample {
        GridSample::new(vec![0.0, 0.5, 1.0], levels.iter().map(|l| vec![*l; 3]).collect()).unwrap()
    }

    #[test]
    fn fm_single_curve() {
        assert_eq!(fraiman_muniz_depth(&constants(&[3.0])).unwrap().values, vec![0.5]);
    }

    #[test]
    fn fm_four_levels_by_hand() {
        // F = (1/4, 1/2, 3/4, 1) -> D = (3/4, 1, 3/4, 1/2)
        let d = fraiman_muniz_depth(&constants(&[0.0, 1.0, 2.0, 3.0])).unwrap().values;
        assert_eq!(d, vec![0.75, 1.0, 0.75, 0.5]);
    }

    #[test]
    fn two_curves_have_unit_band_depths() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(band_depth(&s).unwrap().values, vec![1.0, 1.0]);
        assert_eq!(modified_band_depth(&s).unwrap().values, vec![1.0, 1.0]);
    }

    #[test]
    fn three_parallel_curves() {
        let s = constants(&[0.0, 1.0, 2.0]);
        assert_eq!(band_depth(&s).unwrap().values, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        let mei = mean_epigraph_index(&s).unwrap();
        for (a, b) in mei.iter().zip([1.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [DepthMethod::FraimanMuniz, DepthMethod::BandDepth, DepthMethod::ModifiedBandDepth] {
            assert_eq!(m.name().parse::<DepthMethod>().unwrap(), m);
        }
    }
}
