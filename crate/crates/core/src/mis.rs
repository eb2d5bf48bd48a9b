//! Maximal independent set: a Luby-style node program, a sequential greedy
//! rule and a validity checker.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algorithm::{AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::graph::{IndependentSet, NodeId, WeightedGraph};
use crate::rng::{salt, stream, NodeRng};
use crate::simulator::{self, ExecConfig, Inbox, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

/// Width of the random priority drawn per round.
pub const PRIORITY_BITS: u64 = 62;

/// Luby's randomized MIS.
///
/// Every active node draws a 62-bit priority and broadcasts it. A node whose
/// `(priority, id)` exceeds that of every active neighbour joins, tells its
/// neighbours and halts; nodes that hear of a joining neighbour halt outside
/// the set. Each iteration takes two rounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct LubyMis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LubyMsg {
    Priority(u64),
    Joined,
}

impl WireSize for LubyMsg {
    fn size_bits(&self) -> u64 {
        match self {
            LubyMsg::Priority(_) => 1 + PRIORITY_BITS,
            LubyMsg::Joined => 1,
        }
    }
}

#[derive(Debug)]
pub struct LubyState {
    priority: u64,
    listening: bool,
}

fn draw(rng: &mut NodeRng) -> u64 {
    rng.random::<u64>() >> (64 - PRIORITY_BITS)
}

impl NodeProgram for LubyMis {
    type State = LubyState;
    type Msg = LubyMsg;
    type Output = bool;

    fn init(&self, _: &NodeContext<'_>, rng: &mut NodeRng) -> (LubyState, Transition<LubyMsg, bool>) {
        let priority = draw(rng);
        let state = LubyState {
            priority,
            listening: false,
        };
        (state, Transition::broadcast(LubyMsg::Priority(priority)))
    }

    fn step(
        &self,
        ctx: &NodeContext<'_>,
        state: &mut LubyState,
        inbox: &Inbox<'_, LubyMsg>,
        rng: &mut NodeRng,
    ) -> Transition<LubyMsg, bool> {
        if state.listening {
            if inbox.messages().any(|m| *m == LubyMsg::Joined) {
                return Transition::halt(false);
            }
            state.priority = draw(rng);
            state.listening = false;
            return Transition::broadcast(LubyMsg::Priority(state.priority));
        }
        let mine = (state.priority, ctx.id);
        let wins = inbox.iter().all(|(id, m)| match *m {
            LubyMsg::Priority(p) => mine > (p, id),
            LubyMsg::Joined => true,
        });
        if wins {
            Transition::broadcast_and_halt(LubyMsg::Joined, true)
        } else {
            state.listening = true;
            Transition::wait()
        }
    }
}

/// Runs [`LubyMis`] on the subgraph induced by `subset`.
pub fn luby_mis(
    g: &WeightedGraph,
    subset: &[usize],
    config: &ExecConfig,
    seed: u64,
) -> Result<(Vec<usize>, RoundStats), Error> {
    let out = simulator::run_on_subgraph(g, subset, &LubyMis, config, seed)?;
    let members = members_of(&out.outputs);
    Ok((members, out.stats))
}

/// Dense indices whose boolean output is `true`.
pub(crate) fn members_of(outputs: &[Option<bool>]) -> Vec<usize> {
    outputs
        .iter()
        .enumerate()
        .filter_map(|(v, o)| (*o == Some(true)).then_some(v))
        .collect()
}

/// Scan order of [`greedy_mis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    ById,
    Permutation(u64),
}

/// Sequential greedy MIS: scan nodes in order and add a node iff none of its
/// neighbours has been added.
pub fn greedy_mis(g: &WeightedGraph, order: GreedyOrder) -> IndependentSet {
    let all: Vec<usize> = (0..g.n()).collect();
    greedy_mis_on(g, &all, order)
}

/// [`greedy_mis`] restricted to the subgraph induced by `subset`.
pub fn greedy_mis_on(g: &WeightedGraph, subset: &[usize], order: GreedyOrder) -> IndependentSet {
    let mut scan = subset.to_vec();
    match order {
        GreedyOrder::ById => scan.sort_by_key(|&v| g.id(v)),
        GreedyOrder::Permutation(seed) => {
            scan.sort_unstable();
            scan.shuffle(&mut stream(seed, salt::CORPUS, 0));
        }
    }
    let mut taken = vec![false; g.n()];
    let mut members = Vec::new();
    for v in scan {
        if !g.neighbors(v).iter().any(|&u| taken[u]) {
            taken[v] = true;
            members.push(v);
        }
    }
    IndependentSet::new(g, members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisViolation {
    OutsideSubset(NodeId),
    Adjacent(NodeId, NodeId),
    Uncovered(NodeId),
}

/// `Ok(())` iff `candidate` is a maximal independent set of the subgraph
/// induced by `subset`; otherwise the first violation found.
pub fn verify_mis(g: &WeightedGraph, subset: &[usize], candidate: &[usize]) -> Result<(), MisViolation> {
    let mut in_subset = vec![false; g.n()];
    for &v in subset {
        in_subset[v] = true;
    }
    let mut chosen = vec![false; g.n()];
    for &v in candidate {
        if !in_subset[v] {
            return Err(MisViolation::OutsideSubset(g.id(v)));
        }
        chosen[v] = true;
    }
    for &v in candidate {
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| chosen[u]) {
            return Err(MisViolation::Adjacent(g.id(v), g.id(u)));
        }
    }
    for &v in subset {
        if !chosen[v] && !g.neighbors(v).iter().any(|&u| chosen[u]) {
            return Err(MisViolation::Uncovered(g.id(v)));
        }
    }
    Ok(())
}

/// Luby's MIS as a (weight-oblivious) algorithm on an instance.
#[derive(Debug, Clone, Copy, Default)]
pub struct LubyAlgorithm;

impl MaxIsAlgorithm for LubyAlgorithm {
    fn name(&self) -> String {
        "luby".into()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let (members, stats) = luby_mis(inst.graph, &inst.nodes, exec, seed)?;
        let mis_valid = verify_mis(inst.graph, &inst.nodes, &members).is_ok();
        Ok(AlgOutcome {
            members,
            stats,
            mis_valid,
            stack_checks: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, WeightModel};

    fn cycle(n: usize) -> WeightedGraph {
        generate(Family::Cycle { n }, WeightModel::Unit, 0).unwrap()
    }

    #[test]
    fn luby_on_small_graphs() {
        let config = ExecConfig::default();
        let edgeless = WeightedGraph::from_edges(vec![1; 6], &[]).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let (members, stats) = luby_mis(&edgeless, &all, &config, 9).unwrap();
        assert_eq!(members, all);
        assert_eq!(stats.rounds, 1);

        let k2 = WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap();
        for seed in 0..20 {
            let (members, _) = luby_mis(&k2, &[0, 1], &config, seed).unwrap();
            assert_eq!(members.len(), 1);
        }

        let c5 = cycle(5);
        let (members, _) = luby_mis(&c5, &[0, 1, 2, 3, 4], &config, 42).unwrap();
        assert_eq!(members.len(), 2);
        assert_eq!(verify_mis(&c5, &[0, 1, 2, 3, 4], &members), Ok(()));
    }

    #[test]
    fn isolated_node_of_a_subgraph_joins_at_once() {
        let tri = cycle(3);
        let (members, stats) = luby_mis(&tri, &[1], &ExecConfig::default(), 5).unwrap();
        assert_eq!(members, vec![1]);
        assert_eq!(stats.rounds, 1);
    }

    #[test]
    fn greedy_examples() {
        let p3 = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(greedy_mis(&p3, GreedyOrder::ById).members, vec![0, 2]);
        let k5 = generate(Family::Clique { n: 5 }, WeightModel::Unit, 0).unwrap();
        assert_eq!(greedy_mis(&k5, GreedyOrder::ById).members, vec![0]);
        let edgeless = WeightedGraph::from_edges(vec![1; 4], &[]).unwrap();
        assert_eq!(greedy_mis(&edgeless, GreedyOrder::Permutation(3)).len(), 4);
    }

    #[test]
    fn verify_examples() {
        let c5 = cycle(5);
        let all: Vec<usize> = (0..5).collect();
        assert_eq!(verify_mis(&c5, &all, &[0, 2]), Ok(()));
        assert_eq!(verify_mis(&c5, &all, &[0]), Err(MisViolation::Uncovered(2)));
        assert_eq!(verify_mis(&c5, &all, &[0, 1, 3]), Err(MisViolation::Adjacent(0, 1)));
        assert_eq!(verify_mis(&c5, &[], &[]), Ok(()));
        assert_eq!(verify_mis(&c5, &[1], &[2]), Err(MisViolation::OutsideSubset(2)));
    }

    #[test]
    fn greedy_is_always_maximal() {
        for seed in 0..50 {
            let g = generate(Family::Gnp { n: 60, p: 0.1 }, WeightModel::Unit, seed).unwrap();
            let all: Vec<usize> = (0..g.n()).collect();
            for order in [GreedyOrder::ById, GreedyOrder::Permutation(seed)] {
                let s = greedy_mis(&g, order);
                assert_eq!(verify_mis(&g, &all, &s.members), Ok(()));
            }
        }
    }
}
