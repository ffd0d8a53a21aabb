//! Cox–de Boor evaluation of B-splines on clamped knot vectors.

/// Knot vector with both end breakpoints repeated `order` times.
pub fn clamped_knot_vector(breaks: &[f64], order: usize) -> Vec<f64> {
    let first = breaks[0];
    let last = breaks[breaks.len() - 1];
    let mut knots = Vec::with_capacity(breaks.len() + 2 * (order - 1));
    knots.extend(std::iter::repeat_n(first, order - 1));
    knots.extend_from_slice(breaks);
    knots.extend(std::iter::repeat_n(last, order - 1));
    knots
}

/// Knot vector for interpolating `points` with a spline of the given order,
/// interior knots placed by averaging consecutive abscissae.
pub fn interpolation_knot_vector(points: &[f64], order: usize) -> Vec<f64> {
    let m = points.len();
    let mut knots = Vec::with_capacity(m + order);
    knots.extend(std::iter::repeat_n(points[0], order));
    for j in 0..m.saturating_sub(order) {
        let window = &points[j + 1..j + order];
        knots.push(window.iter().sum::<f64>() / (order - 1) as f64);
    }
    knots.extend(std::iter::repeat_n(points[m - 1], order));
    knots
}

/// Index `i` with `knots[i] <= t < knots[i + 1]`, restricted to the valid
/// polynomial pieces so points beyond the ends use the boundary piece.
fn find_span(knots: &[f64], order: usize, t: f64) -> usize {
    let degree = order - 1;
    let n_basis = knots.len() - order;
    if t >= knots[n_basis] {
        return n_basis - 1;
    }
    if t <= knots[degree] {
        return degree;
    }
    // last index with knots[i] <= t
    let upper = knots.partition_point(|k| *k <= t);
    (upper - 1).clamp(degree, n_basis - 1)
}

/// Values of all `knots.len() - order` basis functions at `t`.
pub fn basis_values(knots: &[f64], order: usize, t: f64) -> Vec<f64> {
    let n_basis = knots.len() - order;
    let mut out = vec![0.0; n_basis];
    let (span, local) = local_values(knots, order, t);
    let degree = order - 1;
    for (r, v) in local.into_iter().enumerate() {
        out[span - degree + r] = v;
    }
    out
}

/// The `order` possibly-nonzero basis values at `t`, starting at index
/// `span - (order - 1)`.
fn local_values(knots: &[f64], order: usize, t: f64) -> (usize, Vec<f64>) {
    let degree = order - 1;
    let span = find_span(knots, order, t);
    let mut values = vec![0.0; order];
    let mut left = vec![0.0; order];
    let mut right = vec![0.0; order];
    values[0] = 1.0;
    for j in 1..=degree {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    (span, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity_and_nonnegative() {
        let knots = clamped_knot_vector(&[0.0, 0.2, 0.5, 1.0], 4);
        assert_eq!(knots.len(), 10);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let v = basis_values(&knots, 4, t);
            assert_eq!(v.len(), 6);
            assert!(v.iter().all(|x| *x >= 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_ends_interpolate_first_and_last() {
        let knots = clamped_knot_vector(&[0.0, 0.5, 1.0], 3);
        let v0 = basis_values(&knots, 3, 0.0);
        let v1 = basis_values(&knots, 3, 1.0);
        assert_eq!(v0[0], 1.0);
        assert_eq!(v1[v1.len() - 1], 1.0);
    }

    #[test]
    fn order_one_is_indicator() {
        let knots = vec![0.0, 0.5, 1.0];
        assert_eq!(basis_values(&knots, 1, 0.25), vec![1.0, 0.0]);
        assert_eq!(basis_values(&knots, 1, 0.75), vec![0.0, 1.0]);
        assert_eq!(basis_values(&knots, 1, 1.0), vec![0.0, 1.0]);
    }

    #[test]
    fn interpolation_knots_have_expected_length() {
        let pts = [0.0, 0.1, 0.3, 0.4, 0.7, 1.0];
        let k = interpolation_knot_vector(&pts, 4);
        assert_eq!(k.len(), pts.len() + 4);
        assert!(k.windows(2).all(|w| w[0] <= w[1]));
    }
}
