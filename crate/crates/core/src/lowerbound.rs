//! Reduction from MIS on a cycle to approximate MaxIS on a cycle of cliques.
//!
//! Every cycle node `u_i` becomes an `n₁`-clique `{v_{i,j}}`, and the cliques
//! of consecutive cycle nodes are joined completely. An independent set of
//! the clique cycle hits each clique at most once and never two consecutive
//! cliques, so it maps back to an independent set of the cycle. The gaps it
//! leaves are filled greedily, one path component at a time.

use serde::Serialize;

use crate::algorithm::{validate_output, AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::graph::{GraphError, IndependentSet, NodeId, WeightedGraph};
use crate::mis::{greedy_mis_on, verify_mis, GreedyOrder};
use crate::simulator::{ceil_log2, ExecConfig, Mode};

/// Clique cycle over the cycle `0, 1, …, n₀−1` with unit weights.
pub fn build_clique_cycle(n0: usize, n1: usize) -> Result<WeightedGraph, GraphError> {
    let ids: Vec<NodeId> = (0..n0 as NodeId).collect();
    build_clique_cycle_over(&ids, n1)
}

/// Clique cycle over a cycle whose identifiers are listed in cycle order.
/// Vertex `v_{i,j}` has dense index `i·n₁ + j` and identifier
/// `(id(u_i) << ⌈log₂ n₁⌉) | j`.
pub fn build_clique_cycle_over(cycle_ids: &[NodeId], n1: usize) -> Result<WeightedGraph, GraphError> {
    let n0 = cycle_ids.len();
    if n0 < 3 {
        return Err(GraphError::InvalidParameters(format!("cycle needs at least 3 nodes, got {n0}")));
    }
    if n1 < 1 {
        return Err(GraphError::InvalidParameters("cliques need at least one vertex".into()));
    }
    let shift = ceil_log2(n1 as u64);
    let mut ids = Vec::with_capacity(n0 * n1);
    for &u in cycle_ids {
        if shift > 0 && u >> (64 - shift) != 0 {
            return Err(GraphError::InvalidParameters(format!("identifier {u} leaves no room for {shift} clique bits")));
        }
        ids.extend((0..n1 as u64).map(|j| (u << shift) | j));
    }
    let mut edges = Vec::with_capacity(n0 * (n1 * (n1 - 1) / 2 + n1 * n1));
    for i in 0..n0 {
        let next = (i + 1) % n0;
        for j in 0..n1 {
            for k in j + 1..n1 {
                edges.push((i * n1 + j, i * n1 + k));
            }
            for k in 0..n1 {
                edges.push((i * n1 + j, next * n1 + k));
            }
        }
    }
    WeightedGraph::with_ids(ids, vec![1; n0 * n1], &edges)
}

/// Cycle positions hit by an independent set of the clique cycle.
pub fn map_back(c1: &WeightedGraph, n1: usize, members: &[usize]) -> Result<Vec<usize>, Error> {
    if let Some((a, b)) = c1.find_conflict(members) {
        return Err(Error::InvalidParameter(format!(
            "nodes {} and {} of the clique cycle are adjacent",
            c1.id(a),
            c1.id(b)
        )));
    }
    let mut positions: Vec<usize> = members.iter().map(|&v| v / n1).collect();
    positions.sort_unstable();
    positions.dedup();
    Ok(positions)
}

/// Dense indices of a cycle graph in cycle order, starting at the smallest
/// identifier and continuing towards its smaller neighbour.
pub fn cycle_order(cycle: &WeightedGraph) -> Result<Vec<usize>, Error> {
    let n = cycle.n();
    if n < 3 || (0..n).any(|v| cycle.degree(v) != 2) || !cycle.is_connected() {
        return Err(Error::InvalidParameter("input is not a cycle".into()));
    }
    let start = (0..n).min_by_key(|&v| cycle.id(v)).unwrap_or(0);
    let mut order = Vec::with_capacity(n);
    let (mut prev, mut cur) = (usize::MAX, start);
    let first = *cycle.neighbors(start).iter().min_by_key(|&&u| cycle.id(u)).unwrap_or(&start);
    for step in 0..n {
        order.push(cur);
        let next = if step == 0 {
            first
        } else {
            *cycle.neighbors(cur).iter().find(|&&u| u != prev).unwrap_or(&cur)
        };
        prev = cur;
        cur = next;
    }
    Ok(order)
}

/// Result of completing a partial independent set of a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapFill {
    pub set: IndependentSet,
    /// Longest run of cycle nodes strictly between consecutive members of
    /// the partial set (`n₀` if it is empty).
    pub max_gap: usize,
    /// Size of the largest component of `C ∖ (I ∪ N(I))`, i.e. the rounds of
    /// a sequential greedy pass per component.
    pub fill_rounds: usize,
    pub components: usize,
}

/// Extends the independent set `partial` of the cycle to a maximal one by
/// greedy MIS on each component of `C ∖ (I ∪ N(I))`.
pub fn fill_gaps(cycle: &WeightedGraph, order: &[usize], partial: &[usize]) -> Result<GapFill, Error> {
    let n = order.len();
    let mut position = vec![0; cycle.n()];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut in_set = vec![false; n];
    for &v in partial {
        in_set[position[v]] = true;
    }
    let hits: Vec<usize> = (0..n).filter(|&p| in_set[p]).collect();
    let max_gap = match hits.len() {
        0 => n,
        k => (0..k).map(|i| (hits[(i + 1) % k] + n - hits[i] - 1) % n).max().unwrap_or(0),
    };

    let covered: Vec<bool> = (0..n).map(|p| in_set[p] || in_set[(p + 1) % n] || in_set[(p + n - 1) % n]).collect();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let start = (0..n).find(|&p| covered[p]).unwrap_or(0);
    let mut current = Vec::new();
    for k in 0..n {
        let p = (start + k) % n;
        if covered[p] {
            if !current.is_empty() {
                components.push(std::mem::take(&mut current));
            }
        } else {
            current.push(order[p]);
        }
    }
    if !current.is_empty() {
        components.push(current);
    }

    let mut members = partial.to_vec();
    for comp in &components {
        members.extend(greedy_mis_on(cycle, comp, GreedyOrder::ById).members);
    }
    Ok(GapFill {
        set: IndependentSet::new(cycle, members),
        max_gap,
        fill_rounds: components.iter().map(Vec::len).max().unwrap_or(0),
        components: components.len(),
    })
}

/// Diagnostics of one reduction run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStats {
    pub n0: usize,
    pub n1: usize,
    pub inner_rounds: u64,
    pub inner_messages: u64,
    pub mapped: usize,
    pub max_gap: usize,
    pub fill_rounds: usize,
    pub components: usize,
    /// `(100c + 1)·T + 2`.
    pub r_large: u128,
    /// `100c·T`.
    pub r_small: u128,
    pub mis_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandMisResult {
    /// Maximal independent set of the cycle.
    pub set: IndependentSet,
    /// Cycle nodes hit by the inner algorithm's output.
    pub mapped: Vec<usize>,
    pub inner: AlgOutcome,
    pub gaps: GapStats,
}

/// `R_large` and `R_small` for an inner algorithm with size constant `c`
/// and round count `t`.
pub fn locality_radii(c: u64, t: u64) -> (u128, u128) {
    let (c, t) = (u128::from(c), u128::from(t));
    ((100 * c + 1) * t + 2, 100 * c * t)
}

/// MIS of `cycle` via an approximate MaxIS algorithm run (in LOCAL mode) on
/// its clique cycle with cliques of size `n1`. `approx_c` is the inner
/// algorithm's size constant, used only for the diagnostics.
pub fn rand_mis<A: MaxIsAlgorithm + ?Sized>(
    cycle: &WeightedGraph,
    alg: &A,
    n1: usize,
    approx_c: u64,
    exec: &ExecConfig,
    seed: u64,
) -> Result<RandMisResult, Error> {
    let order = cycle_order(cycle)?;
    let ids: Vec<NodeId> = order.iter().map(|&v| cycle.id(v)).collect();
    let c1 = build_clique_cycle_over(&ids, n1)?;
    let local = ExecConfig {
        n_upper: None,
        ..exec.with_mode(Mode::Local)
    };
    let inst = Instance::full(&c1);
    let inner = alg.run(&inst, &local, seed)?;
    validate_output(&inst, &inner.members).map_err(|reason| Error::InnerFailure { phase: 1, reason })?;
    let positions = map_back(&c1, n1, &inner.members)?;
    let mapped: Vec<usize> = positions.iter().map(|&p| order[p]).collect();

    let fill = fill_gaps(cycle, &order, &mapped)?;
    let all: Vec<usize> = (0..cycle.n()).collect();
    verify_mis(cycle, &all, &fill.set.members)
        .map_err(|e| Error::Invariant(format!("reduction output is not a maximal independent set: {e:?}")))?;

    let (r_large, r_small) = locality_radii(approx_c, inner.stats.rounds);
    let gaps = GapStats {
        n0: cycle.n(),
        n1,
        inner_rounds: inner.stats.rounds,
        inner_messages: inner.stats.messages_sent,
        mapped: mapped.len(),
        max_gap: fill.max_gap,
        fill_rounds: fill.fill_rounds,
        components: fill.components,
        r_large,
        r_small,
        mis_size: fill.set.len(),
    };
    Ok(RandMisResult {
        set: fill.set,
        mapped,
        inner,
        gaps,
    })
}
