//! Approximation for graphs of bounded arboricity.
//!
//! Each of the `⌈log₂ n⌉ + 1` phases runs a `(1+ε)Δ`-approximation on the
//! nodes of degree at most `4α` in the current graph `G_i`, pushes the result,
//! zeroes every low-degree node and reduces the others by their selected
//! neighbours. Only nodes with positive residual survive into `G_{i+1}`. The
//! shared pop stage then yields an `8(1+ε)α`-approximation.

use crate::algorithm::{validate_output, AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::approx::HeavyMis;
use crate::boost::{self, distributed_update, pop_stage, Boosted, PhaseStack, StackCheck};
use crate::graph::WeightedGraph;
use crate::rng::{phase_seed, NodeRng};
use crate::simulator::{self, ceil_log2, ExecConfig, Inbox, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

/// Nodes of `nodes` whose degree inside `nodes` is at most `4α`.
pub fn low_degree_subgraph(g: &WeightedGraph, nodes: &[usize], alpha: usize) -> Vec<usize> {
    let mut present = vec![false; g.n()];
    for &v in nodes {
        present[v] = true;
    }
    let cap = 4 * alpha;
    nodes
        .iter()
        .copied()
        .filter(|&v| g.neighbors(v).iter().filter(|&&u| present[u]).count() <= cap)
        .collect()
}

/// One round in which every node learns its degree in the current graph.
#[derive(Debug, Clone, Copy, Default)]
pub struct DegreeProbe;

#[derive(Debug, Clone, Copy)]
pub struct Present;

impl WireSize for Present {
    fn size_bits(&self) -> u64 {
        1
    }
}

impl NodeProgram for DegreeProbe {
    type State = ();
    type Msg = Present;
    type Output = usize;

    fn init(&self, _: &NodeContext<'_>, _: &mut NodeRng) -> ((), Transition<Present, usize>) {
        ((), Transition::broadcast(Present))
    }

    fn step(&self, _: &NodeContext<'_>, _: &mut (), inbox: &Inbox<'_, Present>, _: &mut NodeRng) -> Transition<Present, usize> {
        Transition::halt(inbox.len())
    }
}

/// Residuals and surviving nodes after one phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbReduction {
    pub weights: Vec<i64>,
    pub survivors: Vec<usize>,
}

/// `w_{i+1}(v) = 0` on `low`, `w_i(v) − Σ_{u ∈ N(v) ∩ I_i} w_i(u)` on the
/// rest of `nodes`; survivors are the nodes with positive residual.
pub fn arb_reduce(g: &WeightedGraph, nodes: &[usize], weights: &[i64], set: &[usize], low: &[usize]) -> Result<ArbReduction, usize> {
    let mut next = boost::reduce_weights_on(g, nodes, weights, set)?;
    for &v in low {
        next[v] = 0;
    }
    let survivors = nodes.iter().copied().filter(|&v| next[v] > 0).collect();
    Ok(ArbReduction {
        weights: next,
        survivors,
    })
}

/// `⌈log₂ n⌉ + 1`.
pub fn arb_phase_count(n: usize) -> usize {
    ceil_log2(n.max(1) as u64) as usize + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArbResult {
    pub members: Vec<usize>,
    pub stack: PhaseStack,
    pub stats: RoundStats,
    pub phases: usize,
    /// `|V_i|` for `i = 1, …, phases + 1`.
    pub active_sizes: Vec<usize>,
    /// `|V^{4α}_i|` per phase.
    pub low_degree_sizes: Vec<usize>,
    /// Phases `i` (1-based) with `|V_{i+1}| > |V_i| / 2`.
    pub halving_violations: Vec<usize>,
    pub mis_valid: bool,
    pub stack_check: StackCheck,
    pub inner_checks: Vec<StackCheck>,
}

impl ArbResult {
    /// `V_{phases+1} = ∅`.
    pub fn emptied(&self) -> bool {
        self.active_sizes.last() == Some(&0)
    }
}

/// Runs the push phases with `inner` on each low-degree subgraph, then the
/// shared pop stage.
pub fn arb_approx<A: MaxIsAlgorithm + ?Sized>(
    inst: &Instance<'_>,
    alpha: usize,
    inner: &A,
    exec: &ExecConfig,
    seed: u64,
) -> Result<ArbResult, Error> {
    if alpha == 0 {
        return Err(Error::InvalidParameter("alpha must be at least 1".into()));
    }
    let g = inst.graph;
    let phases = arb_phase_count(inst.nodes.len());
    let mut weights = inst.weights.clone();
    let mut active = inst.nodes.clone();
    let mut stack = PhaseStack::new();
    let mut stats = RoundStats::default();
    let mut active_sizes = vec![active.len()];
    let mut low_degree_sizes = Vec::with_capacity(phases);
    let mut halving_violations = Vec::new();
    let mut mis_valid = true;
    let mut inner_checks = Vec::new();

    for phase in 1..=phases {
        let probe = simulator::run_on_subgraph(g, &active, &DegreeProbe, exec, 0)?;
        stats.extend(&probe.stats);
        let low = low_degree_subgraph(g, &active, alpha);
        if low.iter().any(|&v| probe.outputs[v].is_none_or(|d| d > 4 * alpha)) {
            return Err(Error::Invariant(format!("phase {phase}: degree probe disagrees with the filter")));
        }
        low_degree_sizes.push(low.len());

        let sub = Instance::new(g, low.clone(), weights.clone());
        let out = inner.run(&sub, exec, phase_seed(seed, phase as u64))?;
        validate_output(&sub, &out.members).map_err(|reason| Error::InnerFailure { phase, reason })?;
        if let Some(&v) = out.members.iter().find(|&&v| weights[v] <= 0) {
            return Err(Error::InnerFailure {
                phase,
                reason: format!("node {} with non-positive residual selected", g.id(v)),
            });
        }
        mis_valid &= out.mis_valid;
        stats.extend(&out.stats);
        inner_checks.extend(out.stack_checks);
        stack.push(phase, &out.members, &weights);

        let red = arb_reduce(g, &active, &weights, &out.members, &low).map_err(|v| Error::Overflow { node: g.id(v), phase })?;
        let mut zeroed = vec![false; g.n()];
        for &v in &low {
            zeroed[v] = true;
        }
        let update = distributed_update(g, &active, &weights, &out.members, Some(&zeroed), &red.weights, exec, phase)?;
        stats.extend(&update);

        if 2 * red.survivors.len() > active.len() {
            halving_violations.push(phase);
        }
        weights = red.weights;
        active = red.survivors;
        active_sizes.push(active.len());
    }

    let (members, pop) = pop_stage(g, &stack, exec)?;
    stats.extend(&pop);
    let stack_check = boost::stack_check(&inst.weights, &members, &stack);
    Ok(ArbResult {
        members,
        stack,
        stats,
        phases,
        active_sizes,
        low_degree_sizes,
        halving_violations,
        mis_valid,
        stack_check,
        inner_checks,
    })
}

/// Arboricity algorithm with boost over the good-node algorithm as inner
/// approximation. `alpha = None` uses the degeneracy of the instance graph.
#[derive(Debug, Clone)]
pub struct Arb {
    pub alpha: Option<usize>,
    pub inner: Boosted<HeavyMis>,
}

impl Arb {
    pub fn new(alpha: Option<usize>, eps: f64) -> Self {
        Self {
            alpha,
            inner: Boosted {
                inner: HeavyMis,
                eps,
                c: 8.0,
            },
        }
    }

    pub fn alpha_for(&self, g: &WeightedGraph) -> usize {
        self.alpha.unwrap_or_else(|| g.degeneracy()).max(1)
    }
}

impl MaxIsAlgorithm for Arb {
    fn name(&self) -> String {
        "arb".into()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let r = arb_approx(inst, self.alpha_for(inst.graph), &self.inner, exec, seed)?;
        let mut stack_checks = r.inner_checks;
        stack_checks.push(r.stack_check);
        Ok(AlgOutcome {
            members: r.members,
            stats: r.stats,
            mis_valid: r.mis_valid,
            stack_checks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::brute_force_max_is;
    use crate::graph::{generate, Family, WeightModel};

    fn all(g: &WeightedGraph) -> Vec<usize> {
        (0..g.n()).collect()
    }

    #[test]
    fn low_degree_examples() {
        let tree = generate(Family::Tree { n: 30 }, WeightModel::Unit, 4).unwrap();
        let expected: Vec<usize> = (0..30).filter(|&v| tree.degree(v) <= 4).collect();
        assert_eq!(low_degree_subgraph(&tree, &all(&tree), 1), expected);

        let k10 = generate(Family::Clique { n: 10 }, WeightModel::Unit, 0).unwrap();
        assert!(low_degree_subgraph(&k10, &all(&k10), 2).is_empty());

        let edgeless = WeightedGraph::from_edges(vec![1; 5], &[]).unwrap();
        assert_eq!(low_degree_subgraph(&edgeless, &all(&edgeless), 3), all(&edgeless));
    }

    #[test]
    fn reduce_examples() {
        let mut w = vec![100];
        w.extend([1; 5]);
        let edges: Vec<_> = (1..=5).map(|i| (0, i)).collect();
        let star = WeightedGraph::from_edges(w.clone(), &edges).unwrap();
        let w: Vec<i64> = w.into_iter().map(|x| x as i64).collect();
        let nodes = all(&star);
        let low = low_degree_subgraph(&star, &nodes, 1);
        assert_eq!(low, vec![1, 2, 3, 4, 5]);
        let red = arb_reduce(&star, &nodes, &w, &[1, 3], &low).unwrap();
        assert_eq!(red.weights, vec![98, 0, 0, 0, 0, 0]);
        assert_eq!(red.survivors, vec![0]);

        let k10 = generate(Family::Clique { n: 10 }, WeightModel::Unit, 0).unwrap();
        let ones = vec![1; 10];
        let red = arb_reduce(&k10, &all(&k10), &ones, &[], &[]).unwrap();
        assert_eq!(red.weights, ones);
        assert_eq!(red.survivors, all(&k10));

        let single = WeightedGraph::from_edges(vec![7], &[]).unwrap();
        let red = arb_reduce(&single, &[0], &[7], &[], &[0]).unwrap();
        assert!(red.survivors.is_empty());
    }

    #[test]
    fn edgeless_graph_is_taken_in_phase_one() {
        let g = WeightedGraph::from_edges(vec![3, 1, 4, 1], &[]).unwrap();
        let r = arb_approx(&Instance::full(&g), 1, &Arb::new(None, 0.5).inner, &ExecConfig::default(), 2).unwrap();
        assert_eq!(r.members, all(&g));
        assert_eq!(r.active_sizes, vec![4, 0, 0, 0]);
        assert_eq!(r.stack.frames()[0].members, all(&g));
    }

    #[test]
    fn three_node_path() {
        let g = WeightedGraph::from_edges(vec![3, 5, 3], &[(0, 1), (1, 2)]).unwrap();
        for seed in 0..10 {
            let out = Arb::new(Some(1), 0.25).run(&Instance::full(&g), &ExecConfig::default(), seed).unwrap();
            assert!(8.0 * 1.25 * g.weight_of(&out.members) as f64 >= 6.0);
            assert!(out.stack_checks.iter().all(|c| c.holds));
        }
    }

    #[test]
    fn random_trees_against_oracle() {
        for seed in 0..50 {
            let g = generate(Family::Tree { n: 20 }, WeightModel::UniformRange { lo: 1, hi: 100 }, seed).unwrap();
            let opt = brute_force_max_is(&g).unwrap().weight;
            let arb = Arb::new(Some(1), 0.5);
            let r = arb_approx(&Instance::full(&g), 1, &arb.inner, &ExecConfig::default(), seed).unwrap();
            assert!(8.0 * 1.5 * g.weight_of(&r.members) as f64 >= opt as f64);
            assert!(r.halving_violations.is_empty(), "{:?}", r.active_sizes);
            assert!(r.emptied());
            assert!(r.stack_check.holds);
            assert!(g.is_independent(&r.members));
        }
    }

    #[test]
    fn phase_counts() {
        assert_eq!(arb_phase_count(1), 1);
        assert_eq!(arb_phase_count(2), 2);
        assert_eq!(arb_phase_count(20), 6);
        assert_eq!(arb_phase_count(32), 6);
    }

    #[test]
    fn rejects_zero_alpha() {
        let g = WeightedGraph::from_edges(vec![1], &[]).unwrap();
        let err = arb_approx(&Instance::full(&g), 0, &HeavyMis, &ExecConfig::default(), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
