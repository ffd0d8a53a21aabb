use fdakit::smoothing::penalized_basis_fit;
use fdakit::repr::linear_combine;
use fdakit::{BasisSample, BasisSpec, Extrapolation, GridSample, Interpolation, LinearDifferentialOperator};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn uniform(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / (m - 1) as f64).collect()
}

fn sample_strategy(max_n: usize, min_m: usize, max_m: usize) -> impl Strategy<Value = GridSample> {
    (1..=max_n, min_m..=max_m).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(0.01f64..1.0, m - 1),
            proptest::collection::vec(-50.0f64..50.0, n * m),
        )
            .prop_map(move |(gaps, values)| {
                let mut t = -0.3;
                let mut points = vec![t];
                for g in gaps {
                    t += g;
                    points.push(t);
                }
                let rows = values.chunks(m).map(|c| c.to_vec()).collect();
                GridSample::new(points, rows).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_at_the_grid_is_exact(sample in sample_strategy(4, 6, 20), degree in 1usize..=5) {
        let sample = if degree == 1 {
            sample
        } else {
            sample.with_interpolation(Interpolation::Spline { degree }).unwrap()
        };
        let at_grid = sample.evaluate(sample.points()).unwrap();
        for (a, b) in at_grid.iter().zip(sample.values().iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn periodic_extrapolation_repeats_exactly(sample in sample_strategy(3, 3, 12), i in 0u32..64, k in -6i32..=6) {
        // on [0, 1] with dyadic t, t + k is exact
        let rows = (0..sample.n_samples()).map(|r| sample.curve(r)).collect();
        let s = GridSample::new(uniform(sample.n_points()), rows).unwrap();
        let t = i as f64 / 64.0;
        let shifted = t + k as f64;
        let a = s.evaluate_with(&[t], Extrapolation::Periodic).unwrap();
        let b = s.evaluate_with(&[shifted], Extrapolation::Periodic).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bspline_design_is_a_partition_of_unity(k in 4usize..30, order in 2usize..=6, points in proptest::collection::vec(0.0f64..=1.0, 1..40)) {
        prop_assume!(k >= order);
        let basis = BasisSpec::bspline_with_order((0.0, 1.0), k, order).unwrap();
        let mut points = points;
        points.extend([0.0, 1.0]);
        // one column per point
        let design = basis.evaluate(&points);
        for column in design.column_iter() {
            prop_assert!(column.iter().all(|v| *v >= 0.0));
            prop_assert!((column.sum() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn grid_derivative_is_linear(
        f in proptest::collection::vec(-5.0f64..5.0, 12),
        g in proptest::collection::vec(-5.0f64..5.0, 12),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let points = uniform(12);
        let f = GridSample::new(points.clone(), vec![f]).unwrap();
        let g = GridSample::new(points, vec![g]).unwrap();
        let left = linear_combine(a, &f, b, &g).unwrap().derivative(1).unwrap();
        let right = linear_combine(a, &f.derivative(1).unwrap(), b, &g.derivative(1).unwrap()).unwrap();
        for (x, y) in left.values().iter().zip(right.values().iter()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn basis_derivative_is_linear(
        f in proptest::collection::vec(-5.0f64..5.0, 9),
        g in proptest::collection::vec(-5.0f64..5.0, 9),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let basis = BasisSpec::bspline((0.0, 2.0), 9).unwrap();
        let f = BasisSample::new(basis.clone(), DMatrix::from_row_slice(1, 9, &f)).unwrap();
        let g = BasisSample::new(basis, DMatrix::from_row_slice(1, 9, &g)).unwrap();
        let left = linear_combine(a, &f, b, &g).unwrap().derivative(2).unwrap();
        let right = linear_combine(a, &f.derivative(2).unwrap(), b, &g.derivative(2).unwrap()).unwrap();
        let points = [0.0, 0.3, 0.9, 1.4, 2.0];
        let (l, r) = (left.evaluate(&points).unwrap(), right.evaluate(&points).unwrap());
        for (x, y) in l.iter().zip(r.iter()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn fourier_derivative_stays_in_the_span(half in 1usize..6, coefficients in proptest::collection::vec(-2.0f64..2.0, 11)) {
        let k = 2 * half + 1;
        let basis = BasisSpec::fourier((0.0, 3.0), k).unwrap();
        let f = BasisSample::new(basis.clone(), DMatrix::from_row_slice(1, k, &coefficients[..k])).unwrap();
        let derivative = f.derivative(1).unwrap();
        let points: Vec<f64> = (0..200).map(|j| 3.0 * j as f64 / 199.0).collect();
        let on_grid = derivative.to_grid(&points).unwrap();
        let refit = penalized_basis_fit(&on_grid, &basis, 0.0, &LinearDifferentialOperator::derivative(2)).unwrap();
        let (a, b) = (refit.evaluate(&points).unwrap(), on_grid.values().clone());
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }
}
