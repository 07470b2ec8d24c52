//! Small dense solvers used by the moment pipeline: partial-pivoted LU
//! for the r-by-r systems, a Jacobi eigensolver for tiny symmetric
//! matrices, and modified Gram-Schmidt for range finding. System sizes
//! here are the model rank (single digits), not the network size.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a small square matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    /// 1-norm condition number estimate (exact inverse, cheap at this size).
    pub cond: f64,
}

pub fn lu_factor(n: usize, a: &[f64]) -> Result<LuFactors> {
    assert_eq!(a.len(), n * n);
    let mut lu = a.to_vec();
    let mut piv: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut p = col;
        let mut best = lu[col * n + col].abs();
        for r in (col + 1)..n {
            let v = lu[r * n + col].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return Err(Error::IllConditioned { cond: f64::INFINITY });
        }
        if p != col {
            for j in 0..n {
                lu.swap(col * n + j, p * n + j);
            }
            piv.swap(col, p);
        }
        let pivot = lu[col * n + col];
        for r in (col + 1)..n {
            let m = lu[r * n + col] / pivot;
            lu[r * n + col] = m;
            for j in (col + 1)..n {
                lu[r * n + j] -= m * lu[col * n + j];
            }
        }
    }
    let mut f = LuFactors { n, lu, piv, cond: 0.0 };
    f.cond = one_norm(n, a) * inverse_one_norm(&f);
    Ok(f)
}

fn one_norm(n: usize, a: &[f64]) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn inverse_one_norm(f: &LuFactors) -> f64 {
    let n = f.n;
    let mut norm: f64 = 0.0;
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let col = f.solve(&e);
        norm = norm.max(col.iter().map(|v| v.abs()).sum());
    }
    norm
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for k in 0..i {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[i * n + k] * x[k];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

/// Solve `a x = b` once, gated on the condition number.
pub fn solve_gated(n: usize, a: &[f64], b: &[f64], max_cond: f64) -> Result<Vec<f64>> {
    let f = lu_factor(n, a)?;
    if !f.cond.is_finite() || f.cond > max_cond {
        return Err(Error::IllConditioned { cond: f.cond });
    }
    Ok(f.solve(b))
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns `(values, vectors)` with `vectors[k]` the
/// eigenvector for `values[k]`, sorted by descending |value|.
pub fn symmetric_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j * n + j].abs().partial_cmp(&m[i * n + i].abs()).unwrap()
    });
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    (values, vectors)
}

/// In-place modified Gram-Schmidt on a set of length-`len` columns.
/// Columns that become numerically zero are dropped.
pub fn orthonormalize(cols: &mut Vec<Vec<f64>>, len: usize) {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    for mut c in cols.drain(..) {
        assert_eq!(c.len(), len);
        for _ in 0..2 {
            for q in &kept {
                let dot: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                for (ci, qi) in c.iter_mut().zip(q) {
                    *ci -= dot * qi;
                }
            }
        }
        let norm: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for ci in c.iter_mut() {
                *ci /= norm;
            }
            kept.push(c);
        }
    }
    *cols = kept;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_vandermonde() {
        // rows lambda^a for lambda = (0.6, 0.3), a = 1, 2
        let a = [0.6, 0.3, 0.36, 0.09];
        let b = [0.162, 0.0936];
        let x = solve_gated(2, &a, &b, 1e12).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-12);
        assert!((x[1] - 0.04).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(matches!(
            solve_gated(2, &a, &[1.0, 1.0], 1e12),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // symmetric with eigenvalues 3 and 1, eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
        let a = [2.0, 1.0, 1.0, 2.0];
        let (vals, vecs) = symmetric_eigen(2, &a);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let v = &vecs[0];
        assert!((v[0].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let mut cols = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        orthonormalize(&mut cols, 3);
        assert_eq!(cols.len(), 2);
        let dot: f64 = cols[0].iter().zip(&cols[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
    }
}
