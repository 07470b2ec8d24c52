//! Degree-based estimation for the rank-1 model: the connection
//! probabilities are `1 ∧ (c1 d_i d_j)`, and the graphon itself is
//! recovered by sorting degrees and interpolating. A monotone
//! rearrangement oracle is included for convergence tests only.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphon::AdjacencyMatrix;
use crate::matrix::Matrix;

/// Degree statistics for the rank-1 estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Fit {
    pub degrees: Vec<f64>,
    pub c1: f64,
    /// Permutation putting degrees in nondecreasing order, ties broken by
    /// node index.
    pub sorted_order: Vec<usize>,
}

pub fn fit_rank1(adj: &AdjacencyMatrix) -> Result<Rank1Fit> {
    let n = adj.n();
    let degrees: Vec<f64> = (0..n).map(|i| adj.degree(i) as f64).collect();
    let sum_edges = 2.0 * adj.edge_count() as f64; // ordered pairs
    if sum_edges == 0.0 {
        return Err(Error::DegenerateGraph);
    }
    let total: f64 = degrees.iter().sum();
    let sum_sq: f64 = degrees.iter().map(|d| d * d).sum();
    let cross = total * total - sum_sq; // sum over i != j of d_i d_j
    let c1 = sum_edges / cross;
    let mut sorted_order: Vec<usize> = (0..n).collect();
    sorted_order.sort_by(|&i, &j| degrees[i].partial_cmp(&degrees[j]).unwrap().then(i.cmp(&j)));
    Ok(Rank1Fit { degrees, c1, sorted_order })
}

/// `p_ij = 1 ∧ (c1 d_i d_j)` off the diagonal, zero on it.
pub fn estimate_p_rank1(fit: &Rank1Fit) -> Matrix {
    let n = fit.degrees.len();
    let mut p = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p.set(i, j, (fit.c1 * fit.degrees[i] * fit.degrees[j]).min(1.0));
            }
        }
    }
    p
}

/// Sorted degree with 1-based index, extended by repeating the endpoints.
fn sorted_degree(fit: &Rank1Fit, m: isize) -> f64 {
    let n = fit.degrees.len() as isize;
    let m = m.clamp(1, n);
    fit.degrees[fit.sorted_order[(m - 1) as usize]]
}

/// Linear interpolation of the sorted degrees at `s = v (n + 1)`.
pub fn degree_interpolant(fit: &Rank1Fit, v: f64) -> f64 {
    let n = fit.degrees.len();
    let s = v * (n + 1) as f64;
    let k = s.floor() as isize;
    let frac = s - k as f64;
    sorted_degree(fit, k) * (1.0 - frac) + sorted_degree(fit, k + 1) * frac
}

/// Graphon estimate `1 ∧ (c1 h(u) h(v))` with `h` the degree interpolant.
pub fn reconstruct_graphon_rank1(fit: &Rank1Fit, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid("graphon arguments must lie in [0, 1]"));
    }
    Ok((fit.c1 * degree_interpolant(fit, u) * degree_interpolant(fit, v)).min(1.0))
}

/// Nondecreasing function with (approximately) the same value
/// distribution as `g`: sample on a uniform grid and sort. Test oracle
/// only; the estimators never call this.
pub struct MonotoneRearrangement {
    values: Vec<f64>, // sorted ascending, value at grid midpoint (j + 0.5) / m
}

pub fn monotone_rearrangement_oracle<F: Fn(f64) -> f64>(
    g: F,
    grid_size: usize,
) -> MonotoneRearrangement {
    assert!(grid_size >= 100);
    let m = grid_size;
    let mut values: Vec<f64> = (0..m).map(|j| g((j as f64 + 0.5) / m as f64)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    MonotoneRearrangement { values }
}

impl MonotoneRearrangement {
    pub fn eval(&self, u: f64) -> f64 {
        let m = self.values.len();
        let s = u * m as f64 - 0.5;
        if s <= 0.0 {
            return self.values[0];
        }
        if s >= (m - 1) as f64 {
            return self.values[m - 1];
        }
        let k = s.floor() as usize;
        let frac = s - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }
}
