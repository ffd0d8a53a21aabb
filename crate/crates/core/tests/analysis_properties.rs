use fdakit::dimred::{
    distance_correlation, maxima_hunting, mrmr_select, recursive_maxima_hunting, rkhs_variable_selection,
    RkhsCovariance, DEFAULT_MH_WINDOW,
};
use fdakit::exploratory::{
    boxplot_stats, depth, geometric_median, msplot_stats, outliergram_stats, DepthMethod,
};
use fdakit::GridSample;
use proptest::prelude::*;

fn uniform(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / (m - 1) as f64).collect()
}

/// `n` curves on `m` points with values on a 1/8 lattice, so ties occur and
/// affine maps with dyadic coefficients stay exact.
fn lattice_sample(n: std::ops::RangeInclusive<usize>, m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = GridSample> {
    (n, m).prop_flat_map(|(n, m)| {
        proptest::collection::vec(-40i32..40, n * m).prop_map(move |v| {
            let rows = v.chunks(m).map(|c| c.iter().map(|x| *x as f64 / 8.0).collect()).collect();
            GridSample::new(uniform(m), rows).unwrap()
        })
    })
}

fn smooth_sample(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = GridSample> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.5f64..1.5, -0.3f64..0.3), n).prop_map(|params| {
        let points = uniform(30);
        let rows = params
            .iter()
            .map(|(level, slope, amp, phase)| {
                points
                    .iter()
                    .map(|t| level + slope * t + amp * (6.0 * t + phase).sin() + 0.05 * (41.0 * t * level).sin())
                    .collect()
            })
            .collect();
        GridSample::new(points, rows).unwrap()
    })
}

fn affine(sample: &GridSample, a: f64, b: f64) -> GridSample {
    sample.with_values(sample.values().map(|v| a * v + b)).unwrap()
}

fn two_class(values: Vec<f64>, n: usize, m: usize) -> (GridSample, Vec<usize>) {
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let rows = values
        .chunks(m)
        .zip(&labels)
        .map(|(c, &l)| {
            let mut walk = 0.0;
            c.iter()
                .enumerate()
                .map(|(j, x)| {
                    walk += x;
                    walk + if l == 1 && (2..5).contains(&j) { 0.8 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    (GridSample::new(uniform(m), rows).unwrap(), labels)
}

fn two_class_strategy() -> impl Strategy<Value = (GridSample, Vec<usize>)> {
    proptest::collection::vec(-1.0f64..1.0, 16 * 8).prop_map(|v| two_class(v, 16, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn depths_ignore_increasing_affine_maps(sample in lattice_sample(2..=7, 2..=9), a in 1u32..8, b in -16i32..16) {
        let (a, b) = (a as f64 / 2.0, b as f64 / 4.0);
        let moved = affine(&sample, a, b);
        for method in [DepthMethod::FraimanMuniz, DepthMethod::BandDepth, DepthMethod::ModifiedBandDepth] {
            let d0 = depth(&sample, method).unwrap().values;
            let d1 = depth(&moved, method).unwrap().values;
            for (x, y) in d0.iter().zip(&d1) {
                prop_assert!((x - y).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(x));
            }
            if method == DepthMethod::ModifiedBandDepth {
                prop_assert!(d0.iter().all(|v| *v > 0.0));
            }
        }
    }

    #[test]
    fn boxplot_envelopes_nest(sample in smooth_sample(3..=12)) {
        let stats = boxplot_stats(&sample, DepthMethod::ModifiedBandDepth, 1.5, &[0.25]).unwrap();
        let median = sample.curve(stats.median_index);
        for (j, m) in median.iter().enumerate() {
            let (c, o) = (&stats.central_envelope, &stats.non_outlying_envelope);
            prop_assert!(c.lower[j] <= *m && *m <= c.upper[j]);
            prop_assert!(c.lower[j] <= c.upper[j]);
            prop_assert!(o.lower[j] <= c.lower[j] && c.upper[j] <= o.upper[j]);
        }
    }

    #[test]
    fn msplot_ignores_increasing_affine_maps(sample in smooth_sample(5..=12), a in 0.1f64..20.0, b in -50.0f64..50.0) {
        let s0 = msplot_stats(&sample).unwrap();
        let s1 = msplot_stats(&affine(&sample, a, b)).unwrap();
        for (x, y) in s0.mo.iter().zip(&s1.mo).chain(s0.vo.iter().zip(&s1.vo)) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()), "{} against {}", x, y);
        }
        prop_assert!(s0.vo.iter().all(|v| *v >= 0.0));
        let scatter = s0.ellipse.scatter;
        prop_assert_eq!(scatter[0][1], scatter[1][0]);
        for (d, flag) in s0.distances.iter().zip(&s0.outlier_flags) {
            prop_assert_eq!(*flag, *d > s0.ellipse.cutoff);
        }
    }

    #[test]
    fn outliergram_points_stay_under_the_parabola(sample in smooth_sample(2..=12)) {
        let stats = outliergram_stats(&sample).unwrap();
        prop_assert!(stats.distances.iter().all(|d| *d >= -1e-8), "{:?}", stats.distances);
    }

    #[test]
    fn weiszfeld_objective_never_increases(sample in smooth_sample(2..=10)) {
        let median = geometric_median(&sample, 1e-10, 100).unwrap();
        for pair in median.objective_history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{:?}", median.objective_history);
        }
    }

    #[test]
    fn dcor_ignores_separate_affine_maps(
        xy in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..25),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
        c in 0.01f64..100.0,
        d in -100.0f64..100.0,
    ) {
        let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
        let y: Vec<f64> = xy.iter().map(|p| p.1 + 0.5 * p.0 * p.0).collect();
        let r0 = distance_correlation(&x, &y).unwrap();
        let xa: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let yc: Vec<f64> = y.iter().map(|v| c * v + d).collect();
        let r1 = distance_correlation(&xa, &yc).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-10, "{} against {}", r0, r1);
    }

    #[test]
    fn selections_are_unique_and_rkhs_criterion_grows((sample, labels) in two_class_strategy()) {
        let rkhs = rkhs_variable_selection(&sample, &labels, 5, RkhsCovariance::PooledWithinClass).unwrap();
        let mrmr = mrmr_select(&sample, &labels, 5).unwrap();
        for result in [&rkhs, &mrmr] {
            let mut idx = result.selected_indices.clone();
            idx.sort();
            idx.dedup();
            prop_assert_eq!(idx.len(), result.selected_indices.len());
            prop_assert!(result.scores.iter().all(|s| s.is_finite()));
        }
        for pair in rkhs.scores.windows(2) {
            prop_assert!(pair[1] >= pair[0] * (1.0 - 1e-9), "{:?}", rkhs.scores);
        }
    }

    #[test]
    fn swapping_class_names_changes_nothing((sample, labels) in two_class_strategy()) {
        let swapped: Vec<usize> = labels.iter().map(|l| 1 - l).collect();
        prop_assert_eq!(mrmr_select(&sample, &labels, 3).unwrap(), mrmr_select(&sample, &swapped, 3).unwrap());
        prop_assert_eq!(
            maxima_hunting(&sample, &labels, None, DEFAULT_MH_WINDOW).ok(),
            maxima_hunting(&sample, &swapped, None, DEFAULT_MH_WINDOW).ok()
        );
        prop_assert_eq!(
            recursive_maxima_hunting(&sample, &labels, 4, 0.05).ok(),
            recursive_maxima_hunting(&sample, &swapped, 4, 0.05).ok()
        );
    }
}
