//! Power-iteration baseline: dominant eigenpairs by repeated
//! multiplication with deflation, then a clipped low-rank
//! reconstruction of the probability matrix.
//!
//! The convergence test compares successive normalized iterates. For a
//! dominant *negative* eigenvalue the iterate flips sign every step, so
//! the distance oscillates near 2 and the loop runs to `max_iters`; the
//! eigenvalue estimate (a Rayleigh quotient) is still accurate. That
//! non-convergence is reported, not repaired.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::graphon::AdjacencyMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationConfig {
    pub rank: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl PowerIterationConfig {
    pub fn new(rank: usize) -> Self {
        PowerIterationConfig { rank, max_iters: 500, tol: 1e-6 }
    }
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        PowerIterationConfig::new(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairEstimate {
    pub value: f64,
    /// Unit 2-norm.
    pub vector: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Estimate the top `config.rank` eigenpairs of the adjacency matrix and
/// return the clipped reconstruction `min(1, max(0, Σ λ_k v_k v_kᵀ))`
/// together with the pairs. The reconstruction's diagonal is left as
/// computed (not zeroed).
pub fn power_iteration_estimate(
    adj: &AdjacencyMatrix,
    config: &PowerIterationConfig,
) -> (Matrix, Vec<EigenPairEstimate>) {
    assert!(config.rank >= 1 && config.max_iters >= 1 && config.tol > 0.0);
    let n = adj.n();
    let mut a = adj.to_dense();
    let mut pairs = Vec::with_capacity(config.rank);
    for _ in 0..config.rank {
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut converged = false;
        let mut iters = 0;
        for i in 1..=config.max_iters {
            iters = i;
            let mut next = a.matvec(&x);
            let norm = norm2(&next);
            if norm == 0.0 {
                // x is in the null space; the Rayleigh quotient below is 0
                converged = true;
                break;
            }
            for v in next.iter_mut() {
                *v /= norm;
            }
            let dist = x.iter().zip(&next).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            x = next;
            if dist < config.tol {
                converged = true;
                break;
            }
        }
        let ax = a.matvec(&x);
        let value: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
        a.rank_one_sub(value, &x);
        pairs.push(EigenPairEstimate { value, vector: x, iterations_used: iters, converged });
    }
    let mut p = Matrix::zeros(n);
    for pair in &pairs {
        p.rank_one_sub(-pair.value, &pair.vector);
    }
    for i in 0..n {
        for j in 0..n {
            p.set(i, j, p.get(i, j).clamp(0.0, 1.0));
        }
    }
    (p, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigen;

    fn complete(n: usize) -> AdjacencyMatrix {
        let mut adj = AdjacencyMatrix::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                adj.set_edge(i, j);
            }
        }
        adj
    }

    #[test]
    fn complete_graph_dominant_pair() {
        let (p, pairs) = power_iteration_estimate(&complete(4), &PowerIterationConfig::new(1));
        assert!((pairs[0].value - 3.0).abs() < 1e-9);
        assert!(pairs[0].converged);
        assert!(pairs[0].iterations_used <= 2);
        for v in &pairs[0].vector {
            assert!((v - 0.5).abs() < 1e-9);
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!((p.get(i, j) - 0.75).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn second_component_of_rank_one_input_vanishes() {
        // star-free rank-1 check is easiest on the complete graph's
        // deflated remainder: K4 minus its top component has spectrum
        // {-1, -1, -1, 0}; the second value is negative so its iterate
        // oscillates, but the Rayleigh quotient lands near -1
        let (_, pairs) = power_iteration_estimate(&complete(4), &PowerIterationConfig::new(2));
        assert!((pairs[1].value + 1.0).abs() < 1e-6 || pairs[1].value.abs() < 1e-6);
    }

    #[test]
    fn empty_graph_yields_zero() {
        let (p, pairs) =
            power_iteration_estimate(&AdjacencyMatrix::empty(3), &PowerIterationConfig::new(2));
        for pair in &pairs {
            assert_eq!(pair.value, 0.0);
            assert!(pair.converged);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn dominant_value_matches_dense_oracle() {
        use rand::{Rng, SeedableRng};
        for seed in 0..10u64 {
            let n = 10 + (seed as usize % 5) * 8;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut adj = AdjacencyMatrix::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < 0.4 {
                        adj.set_edge(i, j);
                    }
                }
            }
            if adj.edge_count() == 0 {
                continue;
            }
            let (_, pairs) = power_iteration_estimate(&adj, &PowerIterationConfig::new(1));
            let dense = adj.to_dense();
            let (vals, _) = symmetric_eigen(n, dense.as_slice());
            assert!(
                (pairs[0].value - vals[0]).abs() < 1e-4,
                "seed {seed}: {} vs {}",
                pairs[0].value,
                vals[0]
            );
        }
    }

    #[test]
    fn output_is_clipped_and_symmetric() {
        let adj = AdjacencyMatrix::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let (p, _) = power_iteration_estimate(&adj, &PowerIterationConfig::new(2));
        assert!(p.is_symmetric(1e-12));
        for i in 0..5 {
            for j in 0..5 {
                let v = p.get(i, j);
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
