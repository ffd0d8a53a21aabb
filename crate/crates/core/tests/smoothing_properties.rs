use fdakit::smoothing::{
    hat_matrix, parameter_search, penalized_basis_fit, penalized_mean_squared_residual, penalty_matrix, smooth,
    Kernel, PenaltyFunction, Scorer, SmootherSpec,
};
use fdakit::{BasisSpec, Grid, GridSample, LinearDifferentialOperator};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::Gaussian), Just(Kernel::Uniform), Just(Kernel::Epanechnikov)]
}

fn grid_strategy() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, 4..30).prop_map(|gaps| {
        let mut t = 0.0;
        std::iter::once(0.0)
            .chain(gaps.into_iter().map(|g| {
                t += g;
                t
            }))
            .collect()
    })
}

fn kernel_spec(local_linear: bool, bandwidth: f64, kernel: Kernel) -> SmootherSpec {
    if local_linear {
        SmootherSpec::LocalLinear { bandwidth, kernel }
    } else {
        SmootherSpec::NadarayaWatson { bandwidth, kernel }
    }
}

fn rss(design: &DMatrix<f64>, y: &[f64], c: &[f64]) -> f64 {
    (0..y.len())
        .map(|j| {
            let fit: f64 = (0..c.len()).map(|k| design[(k, j)] * c[k]).sum();
            (y[j] - fit).powi(2)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_weights_are_symmetric_and_nonnegative(kernel in kernel_strategy(), u in -4.0f64..4.0) {
        prop_assert!(kernel.weight(u) >= 0.0);
        prop_assert_eq!(kernel.weight(u), kernel.weight(-u));
    }

    #[test]
    fn kernel_smoothers_preserve_constants(
        points in grid_strategy(),
        level in -100.0f64..100.0,
        scale in 1.5f64..6.0,
        kernel in kernel_strategy(),
        local_linear in any::<bool>(),
    ) {
        let grid = Grid::new(points.clone()).unwrap();
        let spec = kernel_spec(local_linear, scale * grid.span() / grid.len() as f64, kernel);
        let hat = hat_matrix(&spec, &grid, &grid).unwrap();
        for row in hat.entries().row_iter() {
            prop_assert!((row.sum() - 1.0).abs() <= 1e-10);
        }
        let constant = GridSample::new(points.clone(), vec![vec![level; points.len()]]).unwrap();
        for v in smooth(&spec, &constant).unwrap().values().iter() {
            prop_assert!((v - level).abs() <= 1e-10 * (1.0 + level.abs()));
        }
    }

    #[test]
    fn roughness_is_monotone_in_lambda(values in proptest::collection::vec(-3.0f64..3.0, 30)) {
        let points: Vec<f64> = (0..30).map(|j| j as f64 / 29.0).collect();
        let sample = GridSample::new(points.clone(), vec![values]).unwrap();
        let basis = BasisSpec::bspline((0.0, 1.0), 12).unwrap();
        let d2 = LinearDifferentialOperator::derivative(2);
        let penalty = penalty_matrix(&basis, &d2, sample.n_points());
        let mut previous = f64::INFINITY;
        for lambda in [0.0, 0.1, 1.0, 10.0] {
            let fit = penalized_basis_fit(&sample, &basis, lambda, &d2).unwrap();
            let c = fit.coefficients().row(0).transpose();
            let rough = (c.transpose() * &penalty * &c)[(0, 0)];
            prop_assert!(rough <= previous * (1.0 + 1e-9) + 1e-12, "lambda {}: {} after {}", lambda, rough, previous);
            previous = rough;
        }
    }

    #[test]
    fn unpenalized_fit_is_a_local_minimum(
        values in proptest::collection::vec(-3.0f64..3.0, 25),
        direction in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let points: Vec<f64> = (0..25).map(|j| j as f64 / 24.0).collect();
        let sample = GridSample::new(points.clone(), vec![values.clone()]).unwrap();
        let basis = BasisSpec::bspline((0.0, 1.0), 8).unwrap();
        let fit = penalized_basis_fit(&sample, &basis, 0.0, &LinearDifferentialOperator::default()).unwrap();
        let c: Vec<f64> = fit.coefficients().row(0).iter().copied().collect();
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let design = basis.evaluate(&points);
        let base = rss(&design, &values, &c);
        for sign in [1.0, -1.0] {
            let moved: Vec<f64> = c.iter().zip(&direction).map(|(c, d)| c + sign * 1e-3 * d / norm).collect();
            prop_assert!(rss(&design, &values, &moved) >= base - 1e-12);
        }
    }

    #[test]
    fn unit_penalty_is_the_mean_squared_residual(points in grid_strategy(), seed in 0u64..1000, kernel in kernel_strategy()) {
        let m = points.len();
        let values: Vec<f64> = (0..m).map(|j| ((j as u64 * 7919 + seed) % 97) as f64 / 10.0).collect();
        let sample = GridSample::new(points.clone(), vec![values.clone()]).unwrap();
        let grid = sample.grid().clone();
        let hat = hat_matrix(&kernel_spec(false, 2.0 * grid.span() / m as f64, kernel), &grid, &grid).unwrap();
        let fitted = hat.entries() * nalgebra::DVector::from_vec(values.clone());
        let msr = values.iter().zip(fitted.iter()).map(|(y, f)| (y - f).powi(2)).sum::<f64>() / m as f64;
        let got = penalized_mean_squared_residual(&hat, &sample, 1.0).unwrap();
        prop_assert!((got - msr).abs() <= 1e-12 * (1.0 + msr));
    }

    #[test]
    fn search_ignores_candidate_order(
        candidates in proptest::collection::vec(0.08f64..1.0, 2..6),
        rotation in 0usize..6,
        gcv in any::<bool>(),
    ) {
        let points: Vec<f64> = (0..20).map(|j| j as f64 / 19.0).collect();
        let rows = (0..3)
            .map(|i| points.iter().map(|t| (6.0 * t + i as f64).sin() + 0.1 * ((t * 37.0 + i as f64).sin())).collect())
            .collect();
        let sample = GridSample::new(points, rows).unwrap();
        let template = SmootherSpec::NadarayaWatson { bandwidth: 0.1, kernel: Kernel::Gaussian };
        let scorer = if gcv { Scorer::Gcv(PenaltyFunction::Shibata) } else { Scorer::LeaveOneOut };
        let mut permuted = candidates.clone();
        permuted.rotate_left(rotation % candidates.len());
        permuted.reverse();
        let a = parameter_search(&template, &candidates, scorer, &sample).unwrap();
        let b = parameter_search(&template, &permuted, scorer, &sample).unwrap();
        prop_assert_eq!(a.best_parameter, b.best_parameter);
        prop_assert_eq!(a.best_score, b.best_score);
    }
}
