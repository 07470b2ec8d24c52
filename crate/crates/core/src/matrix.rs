use alloc::vec;
use alloc::vec::Vec;

/// Dense square matrix, row-major `f64`.
///
/// Sized for the benchmark regime (n up to a few thousand); no sparse
/// storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Matrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Plain cubic multiply, blocked over the inner index so rows of `rhs`
    /// are reused from cache.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        const KB: usize = 64;
        for k0 in (0..n).step_by(KB) {
            let k1 = (k0 + KB).min(n);
            for i in 0..n {
                let a_row = &self.data[i * n..(i + 1) * n];
                let c_row = &mut out.data[i * n..(i + 1) * n];
                for k in k0..k1 {
                    let aik = a_row[k];
                    if aik == 0.0 {
                        continue;
                    }
                    let b_row = &rhs.data[k * n..(k + 1) * n];
                    for (c, b) in c_row.iter_mut().zip(b_row) {
                        *c += aik * b;
                    }
                }
            }
        }
        out
    }

    /// Rank-one downdate `self - s * v v^T`.
    pub fn rank_one_sub(&mut self, s: f64, v: &[f64]) {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        for i in 0..n {
            let vi = s * v[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for (r, vj) in row.iter_mut().zip(v) {
                *r -= vi * vj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_naive() {
        let n = 37;
        let mut a = Matrix::zeros(n);
        let mut b = Matrix::zeros(n);
        let mut s = 1u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, next());
                b.set(i, j, next());
            }
        }
        let c = a.matmul(&b);
        for i in 0..n {
            for j in 0..n {
                let mut want = 0.0;
                for k in 0..n {
                    want += a.get(i, k) * b.get(k, j);
                }
                assert!((c.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matvec_and_rank_one() {
        let mut a = Matrix::from_rows(2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0]);
        a.rank_one_sub(2.0, &[1.0, 0.0]);
        assert_eq!(a.get(0, 0), -1.0);
        assert_eq!(a.get(1, 1), 4.0);
    }
}
