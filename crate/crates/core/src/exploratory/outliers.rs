use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::depth::{depth, mean_epigraph_index, modified_band_depth, DepthMethod};
use super::summary::depth_order;
use crate::error::{FdaError, Result};
use crate::repr::GridSample;

/// Pointwise lower and upper curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Envelope {
    fn of(sample: &GridSample, indices: &[usize]) -> Self {
        let m = sample.n_points();
        let mut lower = vec![f64::INFINITY; m];
        let mut upper = vec![f64::NEG_INFINITY; m];
        for &i in indices {
            for j in 0..m {
                let v = sample.values()[(i, j)];
                lower[j] = lower[j].min(v);
                upper[j] = upper[j].max(v);
            }
        }
        Self { lower, upper }
    }

    pub fn contains(&self, other: &Envelope) -> bool {
        self.lower.iter().zip(&other.lower).all(|(a, b)| a <= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a >= b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbEnvelope {
    pub prob: f64,
    pub envelope: Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub depth_method: DepthMethod,
    pub depths: Vec<f64>,
    pub median_index: usize,
    pub central_envelope: Envelope,
    /// Central envelope inflated by `factor` times its range.
    pub fences: Envelope,
    pub non_outlying_envelope: Envelope,
    pub factor: f64,
    pub prob_envelopes: Vec<ProbEnvelope>,
    pub outlier_flags: Vec<bool>,
}

/// Functional boxplot.
pub fn boxplot_stats(
    sample: &GridSample,
    depth_method: DepthMethod,
    factor: f64,
    prob: &[f64],
) -> Result<BoxplotStats> {
    let n = sample.n_samples();
    if n < 2 {
        return Err(FdaError::InsufficientSample { required: 2, available: n });
    }
    if !(factor.is_finite() && factor > 0.0) {
        return Err(FdaError::InvalidParameter(format!("factor must be positive, got {factor}")));
    }
    if let Some(p) = prob.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(FdaError::InvalidParameter(format!("envelope probability {p} is outside (0, 1]")));
    }
    let depths = depth(sample, depth_method)?.values;
    let order = depth_order(&depths);
    let deepest = |count: usize| &order[..count.clamp(1, n)];
    let central_envelope = Envelope::of(sample, deepest(n.div_ceil(2)));
    let fences = Envelope {
        lower: central_envelope
            .lower
            .iter()
            .zip(&central_envelope.upper)
            .map(|(lo, hi)| lo - factor * (hi - lo))
            .collect(),
        upper: central_envelope
            .lower
            .iter()
            .zip(&central_envelope.upper)
            .map(|(lo, hi)| hi + factor * (hi - lo))
            .collect(),
    };
    let outlier_flags: Vec<bool> = (0..n)
        .map(|i| {
            sample
                .values()
                .row(i)
                .iter()
                .enumerate()
                .any(|(j, v)| *v < fences.lower[j] || *v > fences.upper[j])
        })
        .collect();
    let kept: Vec<usize> = (0..n).filter(|&i| !outlier_flags[i]).collect();
    let non_outlying_envelope = Envelope::of(sample, &kept);
    let prob_envelopes = prob
        .iter()
        .map(|&p| ProbEnvelope {
            prob: p,
            envelope: Envelope::of(sample, deepest((p * n as f64).ceil() as usize)),
        })
        .collect();
    Ok(BoxplotStats {
        depth_method,
        depths,
        median_index: order[0],
        central_envelope,
        fences,
        non_outlying_envelope,
        factor,
        prob_envelopes,
        outlier_flags,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Type-7 sample quantile.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Squared-distance cutoff: the 0.993 quantile of the chi-square law with two
/// degrees of freedom.
pub fn msplot_cutoff() -> f64 {
    -2.0 * 0.007f64.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub scatter: [[f64; 2]; 2],
    /// Squared Mahalanobis radius of the contour.
    pub cutoff: f64,
}

impl Ellipse {
    /// `vertices` points on the contour `(p - c)^T S^{-1} (p - c) = cutoff`,
    /// the first repeated at the end.
    pub fn polyline(&self, vertices: usize) -> Vec<[f64; 2]> {
        let s = Matrix2::new(self.scatter[0][0], self.scatter[0][1], self.scatter[1][0], self.scatter[1][1]);
        let eig = s.symmetric_eigen();
        let radius = self.cutoff.sqrt();
        let axes: Vec<Vector2<f64>> = (0..2)
            .map(|k| eig.eigenvectors.column(k) * (eig.eigenvalues[k].max(0.0).sqrt() * radius))
            .collect();
        (0..=vertices)
            .map(|v| {
                let theta = 2.0 * std::f64::consts::PI * (v % vertices.max(1)) as f64 / vertices.max(1) as f64;
                let p = axes[0] * theta.cos() + axes[1] * theta.sin();
                [self.center[0] + p[0], self.center[1] + p[1]]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsplotStats {
    pub mo: Vec<f64>,
    pub vo: Vec<f64>,
    /// Squared robust Mahalanobis distances of `(MO, VO)`.
    pub distances: Vec<f64>,
    pub outlier_flags: Vec<bool>,
    pub ellipse: Ellipse,
}

fn mean_and_scatter(points: &[Vector2<f64>], rows: &[usize]) -> (Vector2<f64>, Matrix2<f64>) {
    let h = rows.len() as f64;
    let center = rows.iter().fold(Vector2::zeros(), |acc, &i| acc + points[i]) / h;
    let scatter = rows.iter().fold(Matrix2::zeros(), |acc, &i| {
        let d = points[i] - center;
        acc + d * d.transpose()
    }) / (h - 1.0);
    (center, scatter)
}

/// Inverse of a 2x2 scatter, with a growing ridge when it is singular.
fn robust_inverse(scatter: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let scale = (scatter.trace() / 2.0).abs().max(f64::MIN_POSITIVE);
    let mut ridge = 0.0;
    let mut eps = 1e-10;
    loop {
        let shifted = scatter + Matrix2::identity() * ridge;
        if let Some(chol) = shifted.cholesky() {
            return Ok(chol.inverse());
        }
        if eps > 1e-6 {
            return Err(FdaError::SingularCovariance);
        }
        ridge = eps * scale;
        eps *= 10.0;
    }
}

fn squared_distances(points: &[Vector2<f64>], center: &Vector2<f64>, inverse: &Matrix2<f64>) -> Vec<f64> {
    points
        .iter()
        .map(|p| {
            let d = p - center;
            (d.transpose() * inverse * d)[(0, 0)]
        })
        .collect()
}

/// Magnitude-shape plot statistics.
pub fn msplot_stats(sample: &GridSample) -> Result<MsplotStats> {
    let n = sample.n_samples();
    if n < 3 {
        return Err(FdaError::InsufficientSample { required: 3, available: n });
    }
    let m = sample.n_points();
    let mut outlyingness = vec![vec![0.0; m]; n];
    for j in 0..m {
        let mut column: Vec<f64> = sample.values().column(j).iter().copied().collect();
        let med = median(&mut column);
        let mut deviations: Vec<f64> = column.iter().map(|v| (v - med).abs()).collect();
        let mad = median(&mut deviations);
        if mad == 0.0 {
            return Err(FdaError::DegenerateScale { index: j });
        }
        for (i, row) in outlyingness.iter_mut().enumerate() {
            row[j] = (sample.values()[(i, j)] - med) / (1.4826 * mad);
        }
    }
    let grid = sample.grid();
    let mo: Vec<f64> = outlyingness.iter().map(|o| grid.mean_value(o)).collect();
    let vo: Vec<f64> = outlyingness
        .iter()
        .zip(&mo)
        .map(|(o, mo)| {
            let squared: Vec<f64> = o.iter().map(|v| (v - mo) * (v - mo)).collect();
            grid.mean_value(&squared).max(0.0)
        })
        .collect();

    let points: Vec<Vector2<f64>> = mo.iter().zip(&vo).map(|(a, b)| Vector2::new(*a, *b)).collect();
    let all: Vec<usize> = (0..n).collect();
    let (center, scatter) = mean_and_scatter(&points, &all);
    let classical = squared_distances(&points, &center, &robust_inverse(&scatter)?);
    let h = n.div_ceil(2).max(3);
    let mut order = all;
    order.sort_by(|&a, &b| classical[a].total_cmp(&classical[b]).then(a.cmp(&b)));
    let (center, scatter) = mean_and_scatter(&points, &order[..h]);
    let inverse = robust_inverse(&scatter)?;
    let distances = squared_distances(&points, &center, &inverse);
    let cutoff = msplot_cutoff();
    let outlier_flags = distances.iter().map(|d| *d > cutoff).collect();
    Ok(MsplotStats {
        mo,
        vo,
        distances,
        outlier_flags,
        ellipse: Ellipse {
            center: [center[0], center[1]],
            scatter: [[scatter[(0, 0)], scatter[(0, 1)]], [scatter[(1, 0)], scatter[(1, 1)]]],
            cutoff,
        },
    })
}

/// Coefficients `(c0, c1, c2)` of the parabola `c0 + c1 x + c2 x^2` on which
/// `(MEI, MBD)` lies for samples of mutually non-crossing curves.
pub fn outliergram_parabola(n: usize) -> [f64; 3] {
    let nf = n as f64;
    let a0 = -2.0 / (nf * (nf - 1.0));
    let a1 = 2.0 * (nf + 1.0) / (nf - 1.0);
    [a0, a1, a0 * nf * nf]
}

/// The parabola sampled at `vertices + 1` equally spaced MEI values in [0, 1].
pub fn parabola_polyline(parabola: &[f64; 3], vertices: usize) -> Vec<[f64; 2]> {
    let vertices = vertices.max(1);
    (0..=vertices)
        .map(|k| {
            let x = k as f64 / vertices as f64;
            [x, parabola[0] + parabola[1] * x + parabola[2] * x * x]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutliergramStats {
    pub mei: Vec<f64>,
    pub mbd: Vec<f64>,
    pub parabola: [f64; 3],
    /// `P(MEI_i) - MBD_i`.
    pub distances: Vec<f64>,
    pub threshold: f64,
    pub outlier_flags: Vec<bool>,
}

/// Outliergram: vertical distance of `(MEI, MBD)` to the non-crossing
/// parabola, flagged by the Tukey rule.
pub fn outliergram_stats(sample: &GridSample) -> Result<OutliergramStats> {
    let n = sample.n_samples();
    if n < 2 {
        return Err(FdaError::InsufficientSample { required: 2, available: n });
    }
    let mei = mean_epigraph_index(sample)?;
    let mbd = modified_band_depth(sample)?.values;
    let parabola = outliergram_parabola(n);
    let distances: Vec<f64> = mei
        .iter()
        .zip(&mbd)
        .map(|(x, d)| parabola[0] + parabola[1] * x + parabola[2] * x * x - d)
        .collect();
    let q1 = quantile(&distances, 0.25);
    let q3 = quantile(&distances, 0.75);
    let threshold = q3 + 1.5 * (q3 - q1);
    let outlier_flags = distances.iter().map(|d| *d > threshold).collect();
    Ok(OutliergramStats {
        mei,
        mbd,
        parabola,
        distances,
        threshold,
        outlier_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::grid::linspace;

    #[test]
    fn type7_quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(quantile(&v, 0.5), 2.5);
    }

    #[test]
    fn cutoff_is_the_chi_square_quantile() {
        // chi-square(2) cdf: 1 - exp(-x/2)
        let x = msplot_cutoff();
        assert!((1.0 - (-x / 2.0).exp() - 0.993).abs() < 1e-12);
    }

    #[test]
    fn identical_curves_have_flat_boxplot() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![1.0, 2.0]; 4]).unwrap();
        let b = boxplot_stats(&s, DepthMethod::ModifiedBandDepth, 1.5, &[]).unwrap();
        assert_eq!(b.central_envelope.lower, b.central_envelope.upper);
        assert!(b.outlier_flags.iter().all(|f| !f));
    }

    #[test]
    fn parabola_at_two_curves() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let o = outliergram_stats(&s).unwrap();
        assert!(o.distances.iter().all(|d| d.abs() <= 1e-12));
    }

    #[test]
    fn non_crossing_curves_lie_on_parabola() {
        let pts = linspace(0.0, 1.0, 30);
        for n in 2..9 {
            let rows = (0..n)
                .map(|i| pts.iter().map(|t| (5.0 * t).sin() + i as f64 * 0.3).collect())
                .collect();
            let s = GridSample::new(pts.clone(), rows).unwrap();
            let o = outliergram_stats(&s).unwrap();
            assert!(o.distances.iter().all(|d| d.abs() <= 1e-12), "n={n}: {:?}", o.distances);
        }
    }

    #[test]
    fn msplot_rejects_zero_mad() {
        let s = GridSample::new(vec![0.0, 1.0], vec![vec![0.0, 1.0], vec![0.0, 2.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(msplot_stats(&s).unwrap_err(), FdaError::DegenerateScale { index: 0 });
    }

    #[test]
    fn ellipse_polyline_lies_on_the_contour() {
        let e = Ellipse {
            center: [1.0, -2.0],
            scatter: [[2.0, 0.6], [0.6, 0.5]],
            cutoff: msplot_cutoff(),
        };
        let inv = Matrix2::new(2.0, 0.6, 0.6, 0.5).try_inverse().unwrap();
        let line = e.polyline(64);
        assert_eq!(line.len(), 65);
        assert_eq!(line[0], line[64]);
        for p in line {
            let d = Vector2::new(p[0] - 1.0, p[1] + 2.0);
            assert!(((d.transpose() * inv * d)[(0, 0)] - e.cutoff).abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_polyline_endpoints() {
        let c = outliergram_parabola(5);
        let line = parabola_polyline(&c, 10);
        assert_eq!(line[0], [0.0, c[0]]);
        assert_eq!(line[10][0], 1.0);
    }
}
