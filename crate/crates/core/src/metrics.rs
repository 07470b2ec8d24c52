//! Error metrics between an estimated and a true probability matrix.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-trial benchmark record. `runtime_seconds` and `trial_seed` are
/// filled by the campaign driver; `compute_metrics` leaves them zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    /// `‖P̂ − P‖_F² / n²`, summed over all entries (both conventions keep
    /// the diagonal zero, so it contributes nothing).
    pub mse: f64,
    /// `max_{i≠j} |p̂_ij − p_ij|`.
    pub max_error: f64,
    pub runtime_seconds: f64,
    pub trial_seed: u64,
}

pub fn compute_metrics(p_hat: &Matrix, p_true: &Matrix) -> Result<TrialMetrics> {
    let n = p_hat.n();
    if n != p_true.n() {
        return Err(Error::invalid("matrix shapes differ"));
    }
    let mut frob = 0.0;
    let mut max_error: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = p_hat.get(i, j) - p_true.get(i, j);
            frob += d * d;
            if i != j {
                max_error = max_error.max(d.abs());
            }
        }
    }
    Ok(TrialMetrics {
        mse: frob / (n * n) as f64,
        max_error,
        runtime_seconds: 0.0,
        trial_seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identical_matrices_score_zero() {
        let p = Matrix::from_rows(3, vec![0.0, 0.4, 0.2, 0.4, 0.0, 0.9, 0.2, 0.9, 0.0]);
        let m = compute_metrics(&p, &p).unwrap();
        assert_eq!(m.mse, 0.0);
        assert_eq!(m.max_error, 0.0);
    }

    #[test]
    fn single_symmetric_difference() {
        let a = Matrix::from_rows(2, vec![0.0, 0.5, 0.5, 0.0]);
        let b = Matrix::from_rows(2, vec![0.0, 0.6, 0.6, 0.0]);
        let m = compute_metrics(&a, &b).unwrap();
        assert!((m.mse - 0.005).abs() < 1e-15); // 2 * 0.1^2 / 4
        assert!((m.max_error - 0.1).abs() < 1e-15);
    }

    #[test]
    fn max_error_attains_one() {
        let a = Matrix::from_rows(2, vec![0.0, 1.0, 1.0, 0.0]);
        let b = Matrix::zeros(2);
        let m = compute_metrics(&a, &b).unwrap();
        assert_eq!(m.max_error, 1.0);
    }

    #[test]
    fn diagonal_excluded_from_max_but_counted_in_frobenius() {
        let mut a = Matrix::zeros(2);
        a.set(0, 0, 0.8);
        let b = Matrix::zeros(2);
        let m = compute_metrics(&a, &b).unwrap();
        assert_eq!(m.max_error, 0.0);
        assert!((m.mse - 0.64 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(compute_metrics(&Matrix::zeros(2), &Matrix::zeros(3)).is_err());
    }

    #[test]
    fn agrees_with_double_loop_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 20;
            let mut a = Matrix::zeros(n);
            let mut b = Matrix::zeros(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let (x, y) = (rng.gen::<f64>(), rng.gen::<f64>());
                    a.set(i, j, x);
                    a.set(j, i, x);
                    b.set(i, j, y);
                    b.set(j, i, y);
                }
            }
            let m = compute_metrics(&a, &b).unwrap();
            let mut frob = 0.0;
            let mut max = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let d = (a.get(i, j) - b.get(i, j)).abs();
                    frob += d * d;
                    if i != j && d > max {
                        max = d;
                    }
                }
            }
            assert!((m.mse - frob / (n * n) as f64).abs() < 1e-12);
            assert!((m.max_error - max).abs() < 1e-12);
        }
    }
}
