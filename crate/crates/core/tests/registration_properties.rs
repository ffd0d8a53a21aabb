use std::f64::consts::PI;

use fdakit::registration::{
    alignment_cost, dp_align_values, elastic_register, least_squares_shift_register, shift, srvf_transform,
    ElasticOptions, LeastSquaresShiftOptions, Shifts, Warping, MIN_WARP_SLOPE,
};
use fdakit::{Extrapolation, Grid, GridSample, Interpolation};
use proptest::prelude::*;

fn uniform(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / (m - 1) as f64).collect()
}

/// A smooth curve from a few random harmonics.
fn harmonics(coefficients: &[f64], points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|t| {
            coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * PI * t + k as f64).sin())
                .sum()
        })
        .collect()
}

fn assert_valid(warping: &Warping, points: &[f64]) -> Result<(), TestCaseError> {
    for i in 0..warping.n_samples() {
        let row = warping.row(i);
        prop_assert_eq!(row[0], points[0]);
        prop_assert_eq!(row[row.len() - 1], points[points.len() - 1]);
        for j in 1..row.len() {
            prop_assert!((row[j] - row[j - 1]) / (points[j] - points[j - 1]) >= MIN_WARP_SLOPE);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alignment_never_costs_more_than_identity(
        a in proptest::collection::vec(-2.0f64..2.0, 3),
        b in proptest::collection::vec(-2.0f64..2.0, 3),
    ) {
        let points = uniform(40);
        let grid = Grid::new(points.clone()).unwrap();
        let sample = GridSample::new(points.clone(), vec![harmonics(&a, &points), harmonics(&b, &points)]).unwrap();
        let q = srvf_transform(&sample).unwrap();
        let gamma = dp_align_values(&grid, &q.curve(0), &q.curve(1)).unwrap();
        let aligned = alignment_cost(&grid, &q.curve(0), &q.curve(1), &gamma);
        let identity = alignment_cost(&grid, &q.curve(0), &q.curve(1), &points);
        prop_assert!(aligned <= identity + 1e-12);
    }

    #[test]
    fn elastic_warpings_are_valid(rows in proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 3), 2..5)) {
        let points = uniform(30);
        let curves = rows.iter().map(|c| harmonics(c, &points)).collect();
        let sample = GridSample::new(points.clone(), curves).unwrap();
        let options = ElasticOptions { max_iter: 3, ..ElasticOptions::default() };
        let result = elastic_register(&sample, &options).unwrap();
        assert_valid(&result.warping, &points)?;
    }

    #[test]
    fn aligned_curves_keep_identity_warps(scales in proptest::collection::vec(0.5f64..3.0, 2..5)) {
        let points = uniform(50);
        let base = harmonics(&[1.0, 0.6, -0.3], &points);
        let curves = scales.iter().map(|s| base.iter().map(|v| s * v).collect()).collect();
        let sample = GridSample::new(points.clone(), curves).unwrap();
        let result = elastic_register(&sample, &ElasticOptions::default()).unwrap();
        let step = points[1] - points[0];
        for i in 0..scales.len() {
            prop_assert!(result.warping.max_deviation(i) <= 2.0 * step + 1e-12);
        }
    }

    #[test]
    fn periodic_shifts_compose(d1 in -0.45f64..0.45, d2 in -0.45f64..0.45, phase in 0.0f64..6.3) {
        let points = uniform(401);
        let curve: Vec<f64> = points.iter().map(|t| (2.0 * PI * t + phase).sin()).collect();
        let sample = GridSample::new(points, vec![curve])
            .unwrap()
            .with_interpolation(Interpolation::Spline { degree: 5 })
            .unwrap()
            .with_extrapolation(Extrapolation::Periodic)
            .unwrap();
        let once = shift(&sample, &Shifts::new(vec![d1]).unwrap(), None).unwrap();
        let twice = shift(&once, &Shifts::new(vec![d2]).unwrap(), None).unwrap();
        let direct = shift(&sample, &Shifts::new(vec![d1 + d2]).unwrap(), None).unwrap();
        for (a, b) in twice.values().iter().zip(direct.values().iter()) {
            prop_assert!((a - b).abs() <= 1e-8, "{} against {}", a, b);
        }
    }

    #[test]
    fn regsse_never_increases(offsets in proptest::collection::vec(-0.1f64..0.1, 3..6)) {
        let points: Vec<f64> = (0..80).map(|j| j as f64 / 79.0).collect();
        let curves = offsets
            .iter()
            .map(|d| points.iter().map(|t| (-(t - 0.5 - d).powi(2) / 0.02).exp()).collect())
            .collect();
        let sample = GridSample::new(points, curves).unwrap();
        let result = least_squares_shift_register(&sample, &LeastSquaresShiftOptions::default()).unwrap();
        for pair in result.regsse_history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-15, "{:?}", result.regsse_history);
        }
    }
}
