//! Small dense linear-algebra helpers shared by the fitting routines.

use nalgebra::{Cholesky, DMatrix, Dyn};

/// Cholesky factor of `matrix`, retrying with a growing diagonal jitter
/// `eps * mean(diag)` for `eps` in `first, 10 * first, ..., last` when the
/// plain factorization fails. Returns the factor and the jitter added.
pub fn cholesky_with_jitter(
    matrix: &DMatrix<f64>,
    first: f64,
    last: f64,
) -> Option<(Cholesky<f64, Dyn>, f64)> {
    if let Some(chol) = Cholesky::new(matrix.clone()) {
        return Some((chol, 0.0));
    }
    let n = matrix.nrows();
    let mean_diag = (matrix.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut eps = first;
    while eps <= last * (1.0 + 1e-9) {
        let jitter = eps * mean_diag;
        let mut shifted = matrix.clone();
        for i in 0..n {
            shifted[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(shifted) {
            return Some((chol, jitter));
        }
        eps *= 10.0;
    }
    None
}

/// Symmetrizes in place, removing round-off asymmetry.
pub fn symmetrize(matrix: &mut DMatrix<f64>) {
    let n = matrix.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_factorization_has_no_jitter() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (_, jitter) = cholesky_with_jitter(&m, 1e-10, 1e-6).unwrap();
        assert_eq!(jitter, 0.0);
    }

    #[test]
    fn singular_psd_gets_jitter() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (_, jitter) = cholesky_with_jitter(&m, 1e-10, 1e-6).unwrap();
        assert!(jitter > 0.0 && jitter <= 1e-6);
    }

    #[test]
    fn indefinite_fails() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(cholesky_with_jitter(&m, 1e-10, 1e-6).is_none());
    }
}
