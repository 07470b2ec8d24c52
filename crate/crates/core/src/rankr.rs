//! Full rank-r pipeline: subgraph counts, normalized moments, the
//! eigenvalue/integral/node-value solves, standardization, and the
//! clipped low-rank probability matrix. Also the graphon reconstruction
//! that sorts nodes by the reference component and interpolates.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::counts::{self, DEFAULT_EXACT_BUDGET};
use crate::error::{Error, Result};
use crate::graphon::AdjacencyMatrix;
use crate::matrix::Matrix;
use crate::moments::{self, MomentVector, SpectralEstimate};
use crate::power_iter::{power_iteration_estimate, PowerIterationConfig};
use crate::rank1::Rank1Fit;

/// Which counting route feeds the moment equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counting {
    Exact,
    Fast,
    Corrected,
}

/// Spectral estimate plus the node ordering used for reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRFit {
    pub spectral: SpectralEstimate,
    /// Permutation sorting nodes by the reference column (nondecreasing).
    pub sort_perm: Vec<usize>,
    /// 1-based index of the component used as reference marginal.
    pub reference_component: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitKind {
    Rank1(Rank1Fit),
    RankR(RankRFit),
    PowerIteration(Vec<crate::power_iter::EigenPairEstimate>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    Rank1,
    RankR,
    PowerIteration,
}

/// Wall-clock seconds per pipeline stage. All zero without the `std`
/// feature.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub counts: f64,
    pub moments: f64,
    pub solve: f64,
    pub assemble: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.counts + self.moments + self.solve + self.assemble
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub p_hat: Matrix,
    pub fit: FitKind,
    pub method: EstimationMethod,
    pub timings: StageTimings,
}

#[cfg(feature = "std")]
fn now() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(not(feature = "std"))]
fn now() -> Option<()> {
    None
}

#[cfg(feature = "std")]
fn elapsed(t: &Option<std::time::Instant>) -> f64 {
    t.map(|t| t.elapsed().as_secs_f64()).unwrap_or(0.0)
}

#[cfg(not(feature = "std"))]
fn elapsed(_t: &Option<()>) -> f64 {
    0.0
}

/// Sort nodes by the reference column of the raw node values (stable:
/// ties keep node order).
pub fn fit_rankr_reference(spectral: SpectralEstimate, reference: usize) -> RankRFit {
    assert!((1..=spectral.rank).contains(&reference));
    let n = spectral.n;
    let col = reference - 1;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| {
        spectral.raw(i, col).partial_cmp(&spectral.raw(j, col)).unwrap().then(i.cmp(&j))
    });
    RankRFit { spectral, sort_perm: perm, reference_component: reference }
}

/// The solver chain from moments to a spectral estimate. `initial_guess`
/// seeds the eigenvalue Newton solve.
pub fn estimate_from_moments(
    moments: &MomentVector,
    initial_guess: Option<&[f64]>,
) -> Result<SpectralEstimate> {
    let rank = moments.rank;
    let n = moments.n;
    let eigenvalues = moments::solve_eigenvalues(&moments.cycle_moments, rank, initial_guess)
        .map_err(|e| e.in_stage("eigenvalues"))?;
    let (integrals, clamped) = moments::solve_integrals(&eigenvalues, &moments.line_moments, rank)
        .map_err(|e| e.in_stage("integrals"))?;
    let (node_values_raw, cond) = moments::solve_node_values(&eigenvalues, &integrals, moments)
        .map_err(|e| e.in_stage("node_values"))?;
    let node_values_std = moments::standardize(&node_values_raw, n, rank)
        .map_err(|e| e.in_stage("standardize"))?;
    Ok(SpectralEstimate {
        rank,
        n,
        eigenvalues,
        integrals,
        node_values_raw,
        node_values_std,
        diagnostics: moments::SolverDiagnostics {
            integrals_clamped: clamped,
            node_system_condition: cond,
            ..Default::default()
        },
    })
}

/// `min(1, max(0, Σ_k λ_k g_k(i) g_k(j)))` off the diagonal, zero on it.
pub fn assemble_p(eigenvalues: &[f64], node_values: &[f64], n: usize, rank: usize) -> Matrix {
    let mut p = Matrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = 0.0;
            for (k, l) in eigenvalues.iter().enumerate() {
                s += l * node_values[i * rank + k] * node_values[j * rank + k];
            }
            let s = s.clamp(0.0, 1.0);
            p.set(i, j, s);
            p.set(j, i, s);
        }
    }
    p
}

fn spectral_initial_guess(adj: &AdjacencyMatrix, rank: usize) -> Vec<f64> {
    let (_, pairs) = power_iteration_estimate(adj, &PowerIterationConfig::new(rank));
    let scale = (adj.n() - 1) as f64;
    let mut guess: Vec<f64> = pairs.iter().map(|p| p.value / scale).collect();
    guess.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
    guess
}

/// End-to-end rank-r estimation of the connection probability matrix.
pub fn estimate_p_rankr(
    adj: &AdjacencyMatrix,
    rank: usize,
    counting: Counting,
) -> Result<EstimationResult> {
    if rank < 2 {
        return Err(Error::invalid("rank-r estimation needs rank >= 2; use the rank-1 estimator"));
    }
    let n = adj.n();
    if n < rank + 3 {
        return Err(Error::InsufficientNodes { n, rank });
    }
    let mut timings = StageTimings::default();

    let t = now();
    let counts = match counting {
        Counting::Exact => counts::count_exact(adj, rank, DEFAULT_EXACT_BUDGET),
        Counting::Fast => counts::count_fast(adj, rank),
        Counting::Corrected => counts::count_fast(adj, rank)
            .and_then(|fast| counts::apply_corrections(&fast, adj)),
    }
    .map_err(|e| e.in_stage("counts"))?;
    timings.counts = elapsed(&t);

    let t = now();
    let moments = counts::aggregate_moments(&counts).map_err(|e| e.in_stage("moments"))?;
    timings.moments = elapsed(&t);

    let t = now();
    if adj.edge_count() == 0 {
        return Err(Error::DegenerateGraph.in_stage("moments"));
    }
    let guess = spectral_initial_guess(adj, rank);
    let spectral = estimate_from_moments(&moments, Some(&guess))?;
    timings.solve = elapsed(&t);

    let t = now();
    let p_hat = assemble_p(&spectral.eigenvalues, &spectral.node_values_std, n, rank);
    let fit = fit_rankr_reference(spectral, 1);
    timings.assemble = elapsed(&t);

    Ok(EstimationResult {
        p_hat,
        fit: FitKind::RankR(fit),
        method: EstimationMethod::RankR,
        timings,
    })
}

/// Gap below which consecutive reference knots are treated as tied and
/// the interpolation weight collapses onto the left knot.
pub const KNOT_TIE_GAP: f64 = 1e-12;

impl RankRFit {
    fn sorted_raw(&self, m: usize, k: usize) -> f64 {
        self.spectral.raw(self.sort_perm[m], k)
    }

    /// Reference marginal `h_ref(u)`: index interpolation of the sorted
    /// reference column at `s = u (n + 1)`, constant beyond the first and
    /// last grid points.
    pub fn h_reference(&self, u: f64) -> f64 {
        self.component_curves(u)[self.reference_component - 1]
    }

    /// All component curves `h_1(u)..h_r(u)`. The reference component is
    /// interpolated by index; the others are interpolated in the value of
    /// the reference (inverse interpolation), so that a node's components
    /// stay coupled.
    pub fn component_curves(&self, u: f64) -> Vec<f64> {
        let n = self.spectral.n;
        let rank = self.spectral.rank;
        let rc = self.reference_component - 1;
        let s = u * (n + 1) as f64;
        let k = s.floor() as isize;
        // clamped 1-based endpoints of the active segment
        let left = (k.clamp(1, n as isize) - 1) as usize;
        let right = ((k + 1).clamp(1, n as isize) - 1) as usize;
        let frac = s - k as f64;
        let h_ref = self.sorted_raw(left, rc) * (1.0 - frac) + self.sorted_raw(right, rc) * frac;
        let gap = self.sorted_raw(right, rc) - self.sorted_raw(left, rc);
        let t = if left == right {
            0.0
        } else if gap.abs() < KNOT_TIE_GAP {
            0.0 // tied knots: all weight to the left
        } else {
            (h_ref - self.sorted_raw(left, rc)) / gap
        };
        (0..rank)
            .map(|j| {
                if j == rc {
                    h_ref
                } else {
                    self.sorted_raw(left, j) * (1.0 - t) + self.sorted_raw(right, j) * t
                }
            })
            .collect()
    }
}

/// Graphon estimate `1 ∧ (0 ∨ Σ_k λ̂_k h_k(u) h_k(v))`.
pub fn reconstruct_graphon_rankr(fit: &RankRFit, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid("graphon arguments must lie in [0, 1]"));
    }
    let hu = fit.component_curves(u);
    let hv = fit.component_curves(v);
    let s: f64 = fit
        .spectral
        .eigenvalues
        .iter()
        .zip(hu.iter().zip(&hv))
        .map(|(l, (a, b))| l * a * b)
        .sum();
    Ok(s.clamp(0.0, 1.0))
}
