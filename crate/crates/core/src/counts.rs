//! Per-node line (path) and cycle counts.
//!
//! Three routes: exact enumeration of simple paths/cycles (an oracle for
//! small graphs), fast counts from adjacency-matrix powers that allow
//! repeated nodes, and the fast counts with finite-sample corrections at
//! orders 3-5. The fast route never forms powers above half the largest
//! needed order: row sums come from iterated matrix-vector products and
//! diagonals from row dot products of half-order powers, which yields
//! bitwise the same integers as the full power.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphon::AdjacencyMatrix;
use crate::matrix::Matrix;
use crate::moments::MomentVector;

/// Provenance of a set of counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Simple paths/cycles by enumeration.
    Exact,
    /// Walks with repeated nodes, from matrix powers.
    Fast,
    /// Fast counts with the order-3/4/5 corrections applied.
    Corrected,
}

/// Default step budget for the exact enumeration oracle.
pub const DEFAULT_EXACT_BUDGET: u64 = 1_000_000_000;

/// Per-node line counts for orders `1..=rank` and cycle counts for orders
/// `3..=rank + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphCounts {
    n: usize,
    rank: usize,
    /// `lines[i * rank + (a - 1)]` = count of order `a` at node `i`.
    lines: Vec<f64>,
    /// `cycles[i * rank + (a - 3)]` = count of order `a` at node `i`.
    cycles: Vec<f64>,
    method: CountMethod,
}

impl SubgraphCounts {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn method(&self) -> CountMethod {
        self.method
    }

    /// Line count of order `a` (1-based) at node `i`.
    pub fn line(&self, i: usize, a: usize) -> f64 {
        assert!((1..=self.rank).contains(&a));
        self.lines[i * self.rank + (a - 1)]
    }

    /// Cycle count of order `a` (3..=rank+2) at node `i`.
    pub fn cycle(&self, i: usize, a: usize) -> f64 {
        assert!((3..=self.rank + 2).contains(&a));
        self.cycles[i * self.rank + (a - 3)]
    }
}

/// Exact counts by enumeration of ordered simple paths and cycles.
/// Cost is O(n^(rank+2)) in the worst case; guarded by `budget`
/// elementary steps.
pub fn count_exact(adj: &AdjacencyMatrix, rank: usize, budget: u64) -> Result<SubgraphCounts> {
    if rank == 0 {
        return Err(Error::invalid("rank must be at least 1"));
    }
    let n = adj.n();
    let mut needed: u64 = 1;
    for _ in 0..=(rank + 1) {
        needed = needed.saturating_mul(n as u64);
    }
    if needed > budget {
        return Err(Error::ResourceBudget { needed, budget });
    }
    let neighbors: Vec<Vec<usize>> = (0..n).map(|i| adj.neighbors(i)).collect();
    let mut lines = vec![0.0; n * rank];
    let mut cycles = vec![0.0; n * rank];
    let max_depth = rank + 1; // longest tuple: cycle of order rank + 2
    let mut visited = vec![false; n];
    for start in 0..n {
        visited[start] = true;
        let mut stack: Vec<(usize, usize)> = Vec::new(); // (node, next neighbor index)
        let mut current = start;
        let mut depth = 0usize;
        let mut cursor = 0usize;
        loop {
            if depth < max_depth && cursor < neighbors[current].len() {
                let next = neighbors[current][cursor];
                cursor += 1;
                if visited[next] {
                    continue;
                }
                stack.push((current, cursor));
                visited[next] = true;
                current = next;
                depth += 1;
                cursor = 0;
                // tuple (i_1..i_depth): a simple path of length `depth`
                if depth <= rank {
                    lines[start * rank + (depth - 1)] += 1.0;
                }
                // closing edge makes a cycle of order depth + 1
                if depth >= 2 && depth + 1 <= rank + 2 && adj.has_edge(current, start) {
                    cycles[start * rank + (depth + 1 - 3)] += 1.0;
                }
            } else {
                match stack.pop() {
                    Some((prev, prev_cursor)) => {
                        visited[current] = false;
                        current = prev;
                        cursor = prev_cursor;
                        depth -= 1;
                    }
                    None => break,
                }
            }
        }
        visited[start] = false;
    }
    Ok(SubgraphCounts { n, rank, lines, cycles, method: CountMethod::Exact })
}

/// Incremental producer of fast counts. Matrix powers accumulate across
/// calls, so asking for counts at increasing ranks (as rank selection
/// does) never recomputes a power.
pub struct FastCounter {
    powers: Vec<Matrix>, // powers[m] = E^(m+1)
}

impl FastCounter {
    pub fn new(adj: &AdjacencyMatrix) -> Self {
        FastCounter { powers: vec![adj.to_dense()] }
    }

    fn diag(&self, a: usize) -> Vec<f64> {
        let n = self.powers[0].n();
        match a {
            1 => vec![0.0; n],
            a if a % 2 == 0 => {
                let m = &self.powers[a / 2 - 1];
                (0..n).map(|i| m.row(i).iter().map(|x| x * x).sum()).collect()
            }
            _ => {
                let lo = &self.powers[(a - 1) / 2 - 1];
                let hi = &self.powers[(a + 1) / 2 - 1];
                (0..n)
                    .map(|i| lo.row(i).iter().zip(hi.row(i)).map(|(x, y)| x * y).sum())
                    .collect()
            }
        }
    }

    /// Fast counts allowing repeated nodes: line counts are row sums of
    /// adjacency powers (minus the diagonal), cycle counts are power
    /// diagonals. Only powers up to half the largest order are formed;
    /// the halves are combined by row dot products, which is bitwise the
    /// same integer arithmetic as the full power.
    pub fn counts(&mut self, rank: usize) -> Result<SubgraphCounts> {
        if rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        let n = self.powers[0].n();
        let max_order = rank + 2;
        let half = max_order.div_ceil(2);
        while self.powers.len() < half {
            let next = self.powers[0].matmul(self.powers.last().unwrap());
            self.powers.push(next);
        }
        let mut lines = vec![0.0; n * rank];
        let mut cycles = vec![0.0; n * rank];
        let mut row_sum: Vec<f64> = vec![1.0; n];
        for a in 1..=max_order {
            row_sum = self.powers[0].matvec(&row_sum); // E^a * 1
            if a <= rank {
                let d = self.diag(a);
                for i in 0..n {
                    lines[i * rank + (a - 1)] = row_sum[i] - d[i];
                }
            }
            if a >= 3 {
                let d = self.diag(a);
                for i in 0..n {
                    cycles[i * rank + (a - 3)] = d[i];
                }
            }
        }
        Ok(SubgraphCounts { n, rank, lines, cycles, method: CountMethod::Fast })
    }
}

/// One-shot fast counts; see [`FastCounter`].
pub fn count_fast(adj: &AdjacencyMatrix, rank: usize) -> Result<SubgraphCounts> {
    FastCounter::new(adj).counts(rank)
}

/// Finite-sample corrections for the fast counts: order-3 lines and
/// order-4 cycles become exact; order-5 cycles move closer to the exact
/// value. Other orders are unchanged.
pub fn apply_corrections(fast: &SubgraphCounts, adj: &AdjacencyMatrix) -> Result<SubgraphCounts> {
    if fast.method != CountMethod::Fast {
        return Err(Error::invalid("corrections apply to fast counts only"));
    }
    let n = fast.n;
    let rank = fast.rank;
    assert_eq!(adj.n(), n);
    let mut out = fast.clone();
    out.method = CountMethod::Corrected;
    let deg: Vec<f64> = (0..n).map(|i| fast.line(i, 1)).collect();
    let total_degree: f64 = deg.iter().sum();
    if rank >= 3 {
        for i in 0..n {
            out.lines[i * rank + 2] =
                fast.line(i, 3) - fast.line(i, 2) - deg[i] * deg[i];
        }
    }
    if rank >= 2 {
        for i in 0..n {
            out.cycles[i * rank + 1] =
                fast.cycle(i, 4) - fast.line(i, 2) - deg[i] * deg[i];
        }
    }
    if rank >= 3 {
        let tri: Vec<f64> = (0..n).map(|i| fast.cycle(i, 3)).collect();
        for i in 0..n {
            let neighbor_tri: f64 =
                (0..n).filter(|&k| adj.has_edge(i, k)).map(|k| tri[k]).sum();
            out.cycles[i * rank + 2] = fast.cycle(i, 5)
                - 2.0 * (deg[i] - 2.0) * tri[i]
                - total_degree / n as f64 * tri[i]
                - 2.0 * neighbor_tri;
        }
    }
    Ok(out)
}

/// Normalize counts into the moment quantities matched against eigenvalue
/// power sums: global cycle moments, global line moments, and per-node
/// normalized line counts. Negative corrected counts are clamped to zero
/// here, with the number of clamped entries recorded.
pub fn aggregate_moments(counts: &SubgraphCounts) -> Result<MomentVector> {
    let n = counts.n;
    let rank = counts.rank;
    if n <= rank + 2 {
        return Err(Error::InsufficientNodes { n, rank });
    }
    let falling = |terms: core::ops::RangeInclusive<usize>| -> f64 {
        terms.map(|j| (n - j) as f64).product()
    };
    let mut clamped = 0usize;
    let mut clamp = |v: f64| {
        if v < 0.0 {
            clamped += 1;
            0.0
        } else {
            v
        }
    };
    let mut cycle_moments = Vec::with_capacity(rank);
    for a in 3..=rank + 2 {
        let total: f64 = (0..n).map(|i| clamp(counts.cycle(i, a))).sum();
        cycle_moments.push(total / falling(0..=a - 1));
    }
    let mut line_moments = Vec::with_capacity(rank);
    let mut node_lines = vec![0.0; n * rank];
    for a in 1..=rank {
        let norm = falling(1..=a);
        let mut total = 0.0;
        for i in 0..n {
            let v = clamp(counts.line(i, a));
            total += v;
            node_lines[i * rank + (a - 1)] = v / norm;
        }
        line_moments.push(total / falling(0..=a));
    }
    Ok(MomentVector { rank, n, cycle_moments, line_moments, node_lines, clamped_negative: clamped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> AdjacencyMatrix {
        AdjacencyMatrix::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn exact_counts_on_triangle() {
        // r = 1 still produces the order-3 cycle column
        let c = count_exact(&triangle(), 1, DEFAULT_EXACT_BUDGET).unwrap();
        for i in 0..3 {
            assert_eq!(c.line(i, 1), 2.0);
            assert_eq!(c.cycle(i, 3), 2.0);
        }
    }

    #[test]
    fn exact_counts_on_path() {
        let path = AdjacencyMatrix::from_edges(3, &[(0, 1), (1, 2)]);
        let c = count_exact(&path, 2, DEFAULT_EXACT_BUDGET).unwrap();
        assert_eq!(c.line(0, 2), 1.0); // tuple (1, 2)
        assert_eq!(c.cycle(0, 3), 0.0);
        assert_eq!(c.line(1, 2), 0.0); // both one-step extensions revisit node 1's neighbors
    }

    #[test]
    fn exact_counts_on_empty_graph() {
        let empty = AdjacencyMatrix::empty(5);
        let c = count_exact(&empty, 3, DEFAULT_EXACT_BUDGET).unwrap();
        for i in 0..5 {
            for a in 1..=3 {
                assert_eq!(c.line(i, a), 0.0);
            }
            for a in 3..=5 {
                assert_eq!(c.cycle(i, a), 0.0);
            }
        }
    }

    #[test]
    fn exact_budget_guard() {
        let adj = AdjacencyMatrix::empty(100);
        assert!(matches!(
            count_exact(&adj, 4, 1000),
            Err(Error::ResourceBudget { .. })
        ));
    }

    #[test]
    fn exact_cycle_counts_are_even() {
        // each simple cycle is traversed in two orientations
        let adj = random_graph(8, 0.6, 9);
        let c = count_exact(&adj, 3, DEFAULT_EXACT_BUDGET).unwrap();
        for i in 0..8 {
            for a in 3..=5 {
                assert_eq!(c.cycle(i, a) as u64 % 2, 0);
            }
        }
    }

    #[test]
    fn fast_counts_on_triangle() {
        let c = count_fast(&triangle(), 3).unwrap();
        for i in 0..3 {
            assert_eq!(c.line(i, 1), 2.0);
            assert_eq!(c.line(i, 2), 2.0);
            assert_eq!(c.line(i, 3), 6.0); // repeated nodes dominate; exact is 0
            assert_eq!(c.cycle(i, 3), 2.0);
            assert_eq!(c.cycle(i, 4), 6.0);
        }
    }

    #[test]
    fn corrections_on_triangle() {
        let fast = count_fast(&triangle(), 3).unwrap();
        let c = apply_corrections(&fast, &triangle()).unwrap();
        assert_eq!(c.method(), CountMethod::Corrected);
        for i in 0..3 {
            assert_eq!(c.line(i, 3), 0.0); // 6 - 2 - 4
            assert_eq!(c.cycle(i, 4), 0.0); // 6 - 2 - 4
        }
    }

    #[test]
    fn corrections_reject_non_fast_input() {
        let exact = count_exact(&triangle(), 2, DEFAULT_EXACT_BUDGET).unwrap();
        assert!(apply_corrections(&exact, &triangle()).is_err());
    }

    #[test]
    fn corrections_leave_empty_graph_zero() {
        let empty = AdjacencyMatrix::empty(6);
        let fast = count_fast(&empty, 3).unwrap();
        let c = apply_corrections(&fast, &empty).unwrap();
        for i in 0..6 {
            for a in 1..=3 {
                assert_eq!(c.line(i, a), 0.0);
            }
            for a in 3..=5 {
                assert_eq!(c.cycle(i, a), 0.0);
            }
        }
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> AdjacencyMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut adj = AdjacencyMatrix::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    adj.set_edge(i, j);
                }
            }
        }
        adj
    }

    #[test]
    fn fast_equals_exact_where_no_repeats_possible() {
        for seed in 0..20 {
            let n = 4 + (seed as usize % 5);
            let adj = random_graph(n, 0.5, seed);
            let exact = count_exact(&adj, 2, DEFAULT_EXACT_BUDGET).unwrap();
            let fast = count_fast(&adj, 2).unwrap();
            for i in 0..n {
                assert_eq!(exact.line(i, 1), fast.line(i, 1));
                assert_eq!(exact.line(i, 2), fast.line(i, 2));
                assert_eq!(exact.cycle(i, 3), fast.cycle(i, 3));
            }
        }
    }

    #[test]
    fn corrected_identities_hold_exactly() {
        for seed in 0..30 {
            let n = 5 + (seed as usize % 4);
            let adj = random_graph(n, 0.2 + 0.3 * (seed % 3) as f64, seed + 100);
            let exact = count_exact(&adj, 3, DEFAULT_EXACT_BUDGET).unwrap();
            let fast = count_fast(&adj, 3).unwrap();
            let corr = apply_corrections(&fast, &adj).unwrap();
            for i in 0..n {
                assert_eq!(corr.line(i, 3), exact.line(i, 3), "seed {seed} node {i}");
                assert_eq!(corr.cycle(i, 4), exact.cycle(i, 4), "seed {seed} node {i}");
            }
        }
    }

    #[test]
    fn aggregate_on_complete_graph() {
        let k4 = AdjacencyMatrix::from_edges(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        let c = count_exact(&k4, 1, DEFAULT_EXACT_BUDGET).unwrap();
        let m = aggregate_moments(&c).unwrap();
        // complete graph: every ordered tuple of distinct nodes is a
        // path/cycle, so normalized moments are exactly 1
        assert!((m.cycle_moment(3) - 1.0).abs() < 1e-12);
        assert!((m.line_moment(1) - 1.0).abs() < 1e-12);
        assert!((m.node_line(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counter_reuses_powers_across_ranks() {
        let adj = random_graph(9, 0.5, 42);
        let mut counter = FastCounter::new(&adj);
        let low = counter.counts(2).unwrap();
        let high = counter.counts(4).unwrap();
        let fresh = count_fast(&adj, 4).unwrap();
        assert_eq!(high, fresh);
        for i in 0..9 {
            assert_eq!(low.cycle(i, 4), high.cycle(i, 4));
        }
    }

    #[test]
    fn aggregate_requires_enough_nodes() {
        let c = count_fast(&AdjacencyMatrix::empty(5), 3).unwrap();
        assert!(matches!(aggregate_moments(&c), Err(Error::InsufficientNodes { .. })));
    }

    #[test]
    fn aggregate_zero_on_empty_graph() {
        let c = count_fast(&AdjacencyMatrix::empty(10), 2).unwrap();
        let m = aggregate_moments(&c).unwrap();
        assert_eq!(m.cycle_moment(3), 0.0);
        assert_eq!(m.cycle_moment(4), 0.0);
        assert_eq!(m.line_moment(1), 0.0);
    }
}
