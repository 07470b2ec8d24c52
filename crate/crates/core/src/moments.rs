//! Inversion of the moment system: recover eigenvalues from cycle
//! moments (Newton on the power-sum map), component integrals from line
//! moments (linear in the squared integrals), and per-node component
//! values (one shared factorization across all nodes), followed by
//! standardization to unit empirical second moment.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, lu_factor};

/// Strict-ordering gap below which recovered eigenvalues are rejected.
pub const EIGENVALUE_GAP: f64 = 1e-8;
/// Component integrals at or below this are unidentifiable.
pub const INTEGRAL_FLOOR: f64 = 1e-10;
/// Condition-number acceptance gate for the linear solves.
pub const MAX_CONDITION: f64 = 1e12;

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_ITERS: usize = 80;
const RESTARTS: usize = 20;

/// Normalized subgraph-count moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub rank: usize,
    pub n: usize,
    /// Orders `3..=rank + 2`.
    pub cycle_moments: Vec<f64>,
    /// Orders `1..=rank`.
    pub line_moments: Vec<f64>,
    /// `node_lines[i * rank + (a - 1)]`: per-node line count of order `a`
    /// divided by the falling factorial `(n-1)...(n-a)`.
    pub node_lines: Vec<f64>,
    /// Number of negative corrected counts clamped during aggregation.
    pub clamped_negative: usize,
}

impl MomentVector {
    pub fn cycle_moment(&self, order: usize) -> f64 {
        self.cycle_moments[order - 3]
    }

    pub fn line_moment(&self, order: usize) -> f64 {
        self.line_moments[order - 1]
    }

    pub fn node_line(&self, i: usize, order: usize) -> f64 {
        self.node_lines[i * self.rank + (order - 1)]
    }
}

/// Solver diagnostics carried alongside a spectral estimate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverDiagnostics {
    pub newton_iterations: usize,
    pub restarts_used: usize,
    pub residual: f64,
    /// True when some squared integral came out negative and was clamped.
    pub integrals_clamped: bool,
    pub node_system_condition: f64,
}

/// Recovered spectrum: eigenvalues, component integrals, and per-node
/// component values (raw and standardized).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub rank: usize,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub integrals: Vec<f64>,
    /// `n x rank`, row-major.
    pub node_values_raw: Vec<f64>,
    /// `n x rank`, row-major; columns have unit empirical second moment.
    pub node_values_std: Vec<f64>,
    pub diagnostics: SolverDiagnostics,
}

impl SpectralEstimate {
    pub fn raw(&self, i: usize, k: usize) -> f64 {
        self.node_values_raw[i * self.rank + k]
    }

    pub fn standardized(&self, i: usize, k: usize) -> f64 {
        self.node_values_std[i * self.rank + k]
    }
}

/// Power sums `sum_k lambda_k^a` for orders `3..=r + 2` (the forward
/// direction of the cycle equations).
pub fn cycle_moments_of(eigenvalues: &[f64]) -> Vec<f64> {
    let r = eigenvalues.len();
    (3..=r + 2)
        .map(|a| eigenvalues.iter().map(|l| l.powi(a as i32)).sum())
        .collect()
}

/// Weighted power sums `sum_k lambda_k^a y_k^2` for orders `1..=r`.
pub fn line_moments_of(eigenvalues: &[f64], integrals: &[f64]) -> Vec<f64> {
    let r = eigenvalues.len();
    (1..=r)
        .map(|a| {
            eigenvalues
                .iter()
                .zip(integrals)
                .map(|(l, y)| l.powi(a as i32) * y * y)
                .sum()
        })
        .collect()
}

/// One Newton run from `start`, iterated to stagnation (not merely to
/// the acceptance tolerance: near a double root the residual dips below
/// tolerance long before the iterate reaches the root, and a tie must be
/// detected from the converged point, not a loose neighbor of it).
/// Returns the best iterate and its residual.
fn newton_attempt(moments: &[f64], start: &[f64]) -> (Vec<f64>, f64) {
    let r = moments.len();
    let mut lambda = start.to_vec();
    let mut best = (lambda.clone(), f64::INFINITY);
    for _ in 0..NEWTON_ITERS {
        let mut f = vec![0.0; r];
        let mut jac = vec![0.0; r * r];
        for (t, m) in moments.iter().enumerate() {
            let a = (t + 3) as i32;
            f[t] = lambda.iter().map(|l| l.powi(a)).sum::<f64>() - m;
            for (k, l) in lambda.iter().enumerate() {
                jac[t * r + k] = a as f64 * l.powi(a - 1);
            }
        }
        let res = f.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if res < best.1 {
            best = (lambda.clone(), res);
        }
        let Ok(lu) = lu_factor(r, &jac) else { break };
        if !lu.cond.is_finite() {
            break;
        }
        let delta = lu.solve(&f);
        // backtracking keeps the iteration from overshooting when the
        // start is far from a root (power-sum basins are narrow)
        let residual_at = |cand: &[f64]| -> f64 {
            moments
                .iter()
                .enumerate()
                .map(|(t, m)| {
                    (cand.iter().map(|l| l.powi((t + 3) as i32)).sum::<f64>() - m).abs()
                })
                .fold(0.0, f64::max)
        };
        let mut t = 1.0f64;
        let mut next = lambda.clone();
        for _ in 0..8 {
            for ((x, l), d) in next.iter_mut().zip(&lambda).zip(&delta) {
                // graphon eigenvalues are bounded; keep iterates sane
                *x = (l - t * d).clamp(-4.0, 4.0);
            }
            if residual_at(&next) < res || t <= 1.0 / 128.0 {
                break;
            }
            t *= 0.5;
        }
        let step = t * delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        lambda = next;
        if !step.is_finite() || step < 1e-15 * (1.0 + lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()))) {
            // recheck the final point before stopping
            let res: f64 = moments
                .iter()
                .enumerate()
                .map(|(t, m)| (lambda.iter().map(|l| l.powi((t + 3) as i32)).sum::<f64>() - m).abs())
                .fold(0.0, f64::max);
            if res < best.1 {
                best = (lambda, res);
            }
            break;
        }
    }
    best
}

/// Solve the cycle equations `sum_k lambda_k^a = c_a`, `a = 3..=r + 2`,
/// for eigenvalues sorted by descending magnitude. `initial_guess`
/// (typically the dominant adjacency eigenvalues) seeds Newton; on
/// failure, restarts are taken from deterministically perturbed guesses.
pub fn solve_eigenvalues(
    cycle_moments: &[f64],
    rank: usize,
    initial_guess: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if rank < 2 {
        return Err(Error::invalid("rank must be at least 2 (rank 1 uses the degree estimator)"));
    }
    if cycle_moments.len() != rank || cycle_moments.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("need rank finite cycle moments"));
    }
    let base: Vec<f64> = match initial_guess {
        Some(g) if g.len() == rank => g.to_vec(),
        _ => {
            let c3 = cycle_moments[0];
            let c4 = cycle_moments[1];
            let scale = c3.abs().powf(1.0 / 3.0).max(c4.abs().powf(0.25)).max(1e-6);
            let sign = if c3 >= 0.0 { 1.0 } else { -1.0 };
            (0..rank).map(|k| sign * scale * 0.55f64.powi(k as i32)).collect()
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_7774);
    let mut best_residual = f64::INFINITY;
    // all sign patterns of the base magnitudes come before random
    // restarts: the basin structure is driven by signs, and a random
    // flip rarely lands on alternating patterns at higher rank
    let patterns = 1usize << rank.min(4);
    for attempt in 0..patterns + RESTARTS {
        let start: Vec<f64> = if attempt == 0 {
            base.clone()
        } else if attempt < patterns {
            base.iter()
                .enumerate()
                .map(|(k, l)| if attempt >> k & 1 == 1 { -l.abs() } else { l.abs() })
                .collect()
        } else {
            base.iter()
                .map(|l| {
                    let scale = 0.4 + 1.2 * rng.gen::<f64>();
                    let sign = if rng.gen::<f64>() < 0.25 { -1.0 } else { 1.0 };
                    let jitter = 0.02 * (rng.gen::<f64>() - 0.5);
                    sign * scale * l + jitter
                })
                .collect()
        };
        let (mut lambda, res) = newton_attempt(cycle_moments, &start);
        best_residual = best_residual.min(res);
        if res > NEWTON_TOL {
            continue;
        }
        lambda.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        if let Some(gap) = lambda
            .windows(2)
            .map(|w| (w[0].abs() - w[1].abs()).abs())
            .find(|g| *g < EIGENVALUE_GAP)
        {
            // a fully-converged root with tied magnitudes is a genuine
            // tie in the underlying system, not a bad start: fail fast
            return Err(Error::Degeneracy { gap });
        }
        return Ok(lambda);
    }
    Err(Error::SolverFailure { residual: best_residual })
}

/// Solve the line equations `sum_k lambda_k^a y_k^2 = l_a` for the
/// component integrals. Negative squared solutions are clamped to zero;
/// the boolean reports whether any clamp happened.
pub fn solve_integrals(
    eigenvalues: &[f64],
    line_moments: &[f64],
    rank: usize,
) -> Result<(Vec<f64>, bool)> {
    assert_eq!(eigenvalues.len(), rank);
    if line_moments.len() != rank {
        return Err(Error::invalid("need rank line moments"));
    }
    let mut a = vec![0.0; rank * rank];
    for t in 0..rank {
        for k in 0..rank {
            a[t * rank + k] = eigenvalues[k].powi((t + 1) as i32);
        }
    }
    let y_sq = linalg::solve_gated(rank, &a, line_moments, MAX_CONDITION)?;
    let clamped = y_sq.iter().any(|v| *v < 0.0);
    let y = y_sq.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok((y, clamped))
}

/// Solve, for every node, the system
/// `sum_k lambda_k^a y_k g_k = node_line(i, a)`, `a = 1..=r`,
/// sharing one factorization of the coefficient matrix.
/// Returns the `n x rank` row-major value matrix and the system's
/// condition number.
pub fn solve_node_values(
    eigenvalues: &[f64],
    integrals: &[f64],
    moments: &MomentVector,
) -> Result<(Vec<f64>, f64)> {
    let rank = moments.rank;
    assert_eq!(eigenvalues.len(), rank);
    assert_eq!(integrals.len(), rank);
    if let Some(k) = integrals.iter().position(|y| *y <= INTEGRAL_FLOOR) {
        return Err(Error::UnidentifiableComponent { component: k + 1 });
    }
    let mut a = vec![0.0; rank * rank];
    for t in 0..rank {
        for k in 0..rank {
            a[t * rank + k] = eigenvalues[k].powi((t + 1) as i32) * integrals[k];
        }
    }
    let lu = lu_factor(rank, &a)?;
    if !lu.cond.is_finite() || lu.cond > MAX_CONDITION {
        return Err(Error::IllConditioned { cond: lu.cond });
    }
    let n = moments.n;
    let mut values = vec![0.0; n * rank];
    let mut rhs = vec![0.0; rank];
    for i in 0..n {
        for (t, r) in rhs.iter_mut().enumerate() {
            *r = moments.node_line(i, t + 1);
        }
        let g = lu.solve(&rhs);
        values[i * rank..(i + 1) * rank].copy_from_slice(&g);
    }
    Ok((values, lu.cond))
}

/// Rescale each column to unit empirical second moment:
/// `(1/n) sum_i g_k(i)^2 = 1`.
pub fn standardize(node_values: &[f64], n: usize, rank: usize) -> Result<Vec<f64>> {
    assert_eq!(node_values.len(), n * rank);
    let mut out = node_values.to_vec();
    for k in 0..rank {
        let mean_sq: f64 =
            (0..n).map(|i| node_values[i * rank + k].powi(2)).sum::<f64>() / n as f64;
        if mean_sq == 0.0 {
            return Err(Error::invalid("standardize: zero column"));
        }
        let scale = 1.0 / mean_sq.sqrt();
        for i in 0..n {
            out[i * rank + k] *= scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_recovered_from_forward_moments() {
        let c = cycle_moments_of(&[0.6, 0.3]);
        assert!((c[0] - 0.243).abs() < 1e-15);
        assert!((c[1] - 0.1377).abs() < 1e-15);
        let l = solve_eigenvalues(&c, 2, None).unwrap();
        assert!((l[0] - 0.6).abs() < 1e-9);
        assert!((l[1] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rank_three_with_negative_component() {
        let truth = [0.5, -0.3, 0.1];
        let c = cycle_moments_of(&truth);
        assert!((c[0] - 0.099).abs() < 1e-12);
        assert!((c[1] - 0.0707).abs() < 1e-12);
        assert!((c[2] - 0.02883).abs() < 1e-12);
        let l = solve_eigenvalues(&c, 3, None).unwrap();
        for (got, want) in l.iter().zip(&truth) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn tied_eigenvalues_rejected() {
        let c = cycle_moments_of(&[0.4, 0.4]);
        assert!(matches!(
            solve_eigenvalues(&c, 2, None),
            Err(Error::Degeneracy { .. }) | Err(Error::SolverFailure { .. })
        ));
    }

    #[test]
    fn rank_one_redirected() {
        assert!(solve_eigenvalues(&[0.1], 1, None).is_err());
    }

    #[test]
    fn integrals_recovered() {
        let y = solve_integrals(&[0.6, 0.3], &[0.162, 0.0936], 2).unwrap();
        assert!(!y.1);
        assert!((y.0[0] - 0.5).abs() < 1e-12);
        assert!((y.0[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn zero_line_moments_give_zero_integrals() {
        let (y, clamped) = solve_integrals(&[0.6, 0.3], &[0.0, 0.0], 2).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
        assert!(!clamped);
    }

    #[test]
    fn negative_squared_integral_clamped() {
        // forward moments for y^2 = (0.25, -1e-6)
        let l = [0.6 * 0.25 + 0.3 * -1e-6, 0.36 * 0.25 + 0.09 * -1e-6];
        let (y, clamped) = solve_integrals(&[0.6, 0.3], &l, 2).unwrap();
        assert!(clamped);
        assert!((y[0] - 0.5).abs() < 1e-9);
        assert_eq!(y[1], 0.0);
    }

    fn toy_moments(node_lines: Vec<f64>, rank: usize) -> MomentVector {
        let n = node_lines.len() / rank;
        MomentVector {
            rank,
            n,
            cycle_moments: vec![0.0; rank],
            line_moments: vec![0.0; rank],
            node_lines,
            clamped_negative: 0,
        }
    }

    #[test]
    fn node_values_from_worked_example() {
        let m = toy_moments(vec![0.336, 0.2088], 2);
        let (g, _cond) = solve_node_values(&[0.6, 0.3], &[0.5, 0.2], &m).unwrap();
        assert!((g[0] - 1.2).abs() < 1e-12);
        assert!((g[1] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero_node_values() {
        let m = toy_moments(vec![0.0, 0.0], 2);
        let (g, _) = solve_node_values(&[0.6, 0.3], &[0.5, 0.2], &m).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn vanishing_integral_is_unidentifiable() {
        let m = toy_moments(vec![0.1, 0.1], 2);
        let err = solve_node_values(&[0.6, 0.3], &[0.5, 0.0], &m).unwrap_err();
        assert_eq!(err, Error::UnidentifiableComponent { component: 2 });
    }

    #[test]
    fn standardize_examples() {
        // already unit second moment: unchanged
        let col = vec![1.0, -1.0, 1.0, -1.0];
        assert_eq!(standardize(&col, 4, 1).unwrap(), col);
        // constant 2 -> constant 1
        let two = vec![2.0, 2.0, 2.0];
        assert_eq!(standardize(&two, 3, 1).unwrap(), vec![1.0, 1.0, 1.0]);
        // (3, 4) with n = 2: scale by 1/sqrt(12.5)
        let g = standardize(&[3.0, 4.0], 2, 1).unwrap();
        assert!((g[0] - 3.0 / 12.5f64.sqrt()).abs() < 1e-12);
        assert!((g[1] - 4.0 / 12.5f64.sqrt()).abs() < 1e-12);
        let check = (g[0] * g[0] + g[1] * g[1]) / 2.0;
        assert!((check - 1.0).abs() < 1e-12);
        // zero column errors
        assert!(standardize(&[0.0, 0.0], 2, 1).is_err());
    }
}
