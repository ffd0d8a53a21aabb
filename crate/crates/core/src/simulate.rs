//! Synthetic samples: Gaussian processes and multimodal bump curves.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{FdaError, Result};
use crate::linalg::cholesky_with_jitter;
use crate::repr::grid::linspace;
use crate::repr::{Grid, GridSample};

/// Covariance functions `k(s, t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceKernel {
    Brownian { variance: f64 },
    Exponential { variance: f64, length_scale: f64 },
    Gaussian { variance: f64, length_scale: f64 },
    /// `nu` is one of 0.5, 1.5, 2.5.
    Matern { variance: f64, length_scale: f64, nu: f64 },
    Polynomial { variance: f64, bias: f64, slope: f64, degree: u32 },
}

impl CovarianceKernel {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FdaError::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            CovarianceKernel::Brownian { variance } => positive("variance", variance),
            CovarianceKernel::Exponential { variance, length_scale }
            | CovarianceKernel::Gaussian { variance, length_scale } => {
                positive("variance", variance)?;
                positive("length scale", length_scale)
            }
            CovarianceKernel::Matern { variance, length_scale, nu } => {
                positive("variance", variance)?;
                positive("length scale", length_scale)?;
                if [0.5, 1.5, 2.5].contains(&nu) {
                    Ok(())
                } else {
                    Err(FdaError::InvalidParameter(format!("Matern nu must be 0.5, 1.5 or 2.5, got {nu}")))
                }
            }
            CovarianceKernel::Polynomial { variance, bias, slope, .. } => {
                positive("variance", variance)?;
                if !(bias.is_finite() && bias >= 0.0) {
                    return Err(FdaError::InvalidParameter(format!("bias must be nonnegative, got {bias}")));
                }
                if !slope.is_finite() {
                    return Err(FdaError::InvalidParameter("slope must be finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, s: f64, t: f64) -> f64 {
        match *self {
            CovarianceKernel::Brownian { variance } => variance * s.min(t),
            CovarianceKernel::Exponential { variance, length_scale } => {
                variance * (-(s - t).abs() / length_scale).exp()
            }
            CovarianceKernel::Gaussian { variance, length_scale } => {
                variance * (-(s - t) * (s - t) / (2.0 * length_scale * length_scale)).exp()
            }
            CovarianceKernel::Matern { variance, length_scale, nu } => {
                let r = (s - t).abs() / length_scale;
                if nu == 0.5 {
                    variance * (-r).exp()
                } else if nu == 1.5 {
                    let a = 3f64.sqrt() * r;
                    variance * (1.0 + a) * (-a).exp()
                } else {
                    let a = 5f64.sqrt() * r;
                    variance * (1.0 + a + a * a / 3.0) * (-a).exp()
                }
            }
            CovarianceKernel::Polynomial { variance, bias, slope, degree } => {
                variance * (slope * s * t + bias).powi(degree as i32)
            }
        }
    }
}

/// Kernel matrix `K[a][b] = k(s_a, t_b)`.
pub fn kernel_matrix(kernel: &CovarianceKernel, s: &[f64], t: &[f64]) -> Result<DMatrix<f64>> {
    kernel.validate()?;
    Ok(DMatrix::from_fn(s.len(), t.len(), |a, b| kernel.value(s[a], t[b])))
}

/// Mean function of a simulated process.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessMean {
    Constant(f64),
    Curve(Vec<f64>),
}

impl Default for ProcessMean {
    fn default() -> Self {
        ProcessMean::Constant(0.0)
    }
}

/// `n` Gaussian-process trajectories on `m` equally spaced points of
/// `[0, 1]`, drawn through a jittered Cholesky factor.
pub fn make_gaussian_process(
    n: usize,
    m: usize,
    mean: &ProcessMean,
    kernel: &CovarianceKernel,
    seed: u64,
) -> Result<GridSample> {
    if n == 0 || m == 0 {
        return Err(FdaError::InvalidParameter("n and m must be positive".into()));
    }
    let points = linspace(0.0, 1.0, m);
    let mean: Vec<f64> = match mean {
        ProcessMean::Constant(c) => vec![*c; m],
        ProcessMean::Curve(curve) if curve.len() == m => curve.clone(),
        ProcessMean::Curve(curve) => {
            return Err(FdaError::ShapeMismatch(format!(
                "mean curve has {} values for {m} points",
                curve.len()
            )))
        }
    };
    let k = kernel_matrix(kernel, &points, &points)?;
    let (chol, _) = cholesky_with_jitter(&k, 1e-10, 1e-6).ok_or(FdaError::NotPositiveDefinite)?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DMatrix::from_fn(n, m, |_, _| 0.0);
    let mut z = z;
    for i in 0..n {
        for j in 0..m {
            z[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let mut values = z * l.transpose();
    for mut row in values.row_iter_mut() {
        for (v, mu) in row.iter_mut().zip(&mean) {
            *v += mu;
        }
    }
    GridSample::from_matrix(Grid::new(points)?, values)
}

/// Settings of the multimodal generator. Positions and widths are in units
/// of the domain length.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodalSpec {
    pub n: usize,
    pub n_modes: usize,
    pub noise_sd: f64,
    pub seed: u64,
    pub n_points: usize,
    pub center_jitter_sd: f64,
    pub bump_width: f64,
}

impl MultimodalSpec {
    pub fn new(n: usize, n_modes: usize, noise_sd: f64, seed: u64) -> Self {
        Self {
            n,
            n_modes,
            noise_sd,
            seed,
            n_points: 100,
            center_jitter_sd: 0.05,
            bump_width: 0.05,
        }
    }
}

/// Curves made of `n_modes` unit-height Gaussian bumps around equispaced
/// anchors `(k + 1/2) / n_modes`, plus white noise.
pub fn make_multimodal(spec: &MultimodalSpec) -> Result<GridSample> {
    if spec.n == 0 || spec.n_modes == 0 || spec.n_points < 2 {
        return Err(FdaError::InvalidParameter(
            "n, n_modes must be positive and the grid needs two points".into(),
        ));
    }
    for (name, v) in [
        ("noise sd", spec.noise_sd),
        ("center jitter sd", spec.center_jitter_sd),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(FdaError::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
        }
    }
    if !(spec.bump_width.is_finite() && spec.bump_width > 0.0) {
        return Err(FdaError::InvalidParameter("bump width must be positive".into()));
    }
    let points = linspace(0.0, 1.0, spec.n_points);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = || rng.sample::<f64, _>(StandardNormal);
    let width2 = 2.0 * spec.bump_width * spec.bump_width;
    let mut values = DMatrix::zeros(spec.n, spec.n_points);
    for i in 0..spec.n {
        let centers: Vec<f64> = (0..spec.n_modes)
            .map(|k| (k as f64 + 0.5) / spec.n_modes as f64 + spec.center_jitter_sd * normal())
            .collect();
        for (j, t) in points.iter().enumerate() {
            let signal: f64 = centers.iter().map(|c| (-(t - c) * (t - c) / width2).exp()).sum();
            values[(i, j)] = signal + spec.noise_sd * normal();
        }
    }
    GridSample::from_matrix(Grid::new(points)?, values)
}

/// Multimodal sample with the default 100-point grid and bump settings.
pub fn make_multimodal_samples(n: usize, n_modes: usize, noise_sd: f64, seed: u64) -> Result<GridSample> {
    make_multimodal(&MultimodalSpec::new(n, n_modes, noise_sd, seed))
}
