//! Synchronous round engine for node programs.
//!
//! A run initialises every node, then repeats rounds until all nodes have
//! halted. In each round the messages emitted in the previous stage (by
//! `init` or by the previous round's `step`) are delivered, and every node that
//! has not halted computes its next transition from its own state, its inbox
//! and its private random stream. All outboxes of a round are computed from
//! the previous stage before anything is delivered, so the order in which
//! nodes are stepped cannot influence the result.
//!
//! A node that halts stops stepping, but the messages it emitted in the same
//! transition are still delivered in the next round.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, WeightedGraph};
use crate::parallel::{self, Schedule};
use crate::rng::{node_rng, NodeRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Messages are limited to the bit budget of [`ExecConfig::budget_bits`].
    #[default]
    Congest,
    /// Unbounded messages.
    Local,
}

/// Execution parameters shared by every simulator run of an algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub mode: Mode,
    /// Multiplier in the CONGEST budget `c_msg * log n_upper`.
    pub c_msg: u64,
    /// Polynomial upper bound on `n` known to the nodes. `None` means the
    /// node count of the graph passed to the engine.
    pub n_upper: Option<u64>,
    pub max_rounds: u64,
    #[serde(default)]
    pub schedule: Schedule,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Congest,
            c_msg: 32,
            n_upper: None,
            max_rounds: 100_000,
            schedule: Schedule::Parallel,
        }
    }
}

/// Smallest `k` with `2^k >= x`, for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Width of a field holding a node identifier or a degree.
pub fn id_bits(n_upper: u64) -> u64 {
    u64::from(ceil_log2(n_upper.max(2)))
}

/// The logarithmic term of the message budget never drops below this, so that
/// tiny graphs can still carry one 64-bit weight per message.
pub const MIN_LOG_TERM: u64 = 4;

impl ExecConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn n_upper_for(&self, g: &WeightedGraph) -> u64 {
        self.n_upper.unwrap_or(g.n() as u64).max(1)
    }

    /// `B = c_msg * max(ceil(log2 n_upper), MIN_LOG_TERM)`.
    pub fn budget_bits(&self, n_upper: u64) -> u64 {
        self.c_msg * u64::from(ceil_log2(n_upper)).max(MIN_LOG_TERM)
    }
}

/// What a node knows about itself and its incident edges.
#[derive(Debug, Clone, Copy)]
pub struct NodeContext<'a> {
    /// Dense index of the node in the underlying graph. Programs may use it
    /// to look up their own entry in per-node local inputs.
    pub index: usize,
    pub id: NodeId,
    pub weight: i64,
    /// Identifiers of the neighbours in the executed (sub)graph, ascending by
    /// dense index.
    pub neighbors: &'a [NodeId],
    pub n_upper: u64,
}

impl NodeContext<'_> {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// Messages report their encoded size.
pub trait WireSize {
    fn size_bits(&self) -> u64;
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outbox<M> {
    Silent,
    /// Same message to every neighbour.
    Broadcast(M),
    /// Addressed messages, at most one per neighbour.
    Unicast(Vec<(NodeId, M)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status<O> {
    Running,
    Halt(O),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<M, O> {
    pub outbox: Outbox<M>,
    pub status: Status<O>,
}

impl<M, O> Transition<M, O> {
    pub fn wait() -> Self {
        Self {
            outbox: Outbox::Silent,
            status: Status::Running,
        }
    }

    pub fn broadcast(msg: M) -> Self {
        Self {
            outbox: Outbox::Broadcast(msg),
            status: Status::Running,
        }
    }

    pub fn halt(output: O) -> Self {
        Self {
            outbox: Outbox::Silent,
            status: Status::Halt(output),
        }
    }

    pub fn broadcast_and_halt(msg: M, output: O) -> Self {
        Self {
            outbox: Outbox::Broadcast(msg),
            status: Status::Halt(output),
        }
    }
}

/// A per-node state machine.
///
/// `init` and `step` must be deterministic functions of the node context, the
/// node's own state, its inbox and its random stream.
pub trait NodeProgram: Sync {
    type State: Send;
    type Msg: WireSize + Send + Sync;
    type Output: Send;

    fn init(&self, ctx: &NodeContext<'_>, rng: &mut NodeRng) -> (Self::State, Transition<Self::Msg, Self::Output>);

    fn step(
        &self,
        ctx: &NodeContext<'_>,
        state: &mut Self::State,
        inbox: &Inbox<'_, Self::Msg>,
        rng: &mut NodeRng,
    ) -> Transition<Self::Msg, Self::Output>;
}

/// Messages delivered to one node in one round.
pub struct Inbox<'a, M> {
    me: NodeId,
    neighbors: &'a [usize],
    neighbor_ids: &'a [NodeId],
    outboxes: &'a [Outbox<M>],
}

impl<'a, M> Inbox<'a, M> {
    /// `(sender, message)` pairs in neighbour order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &'a M)> + '_ {
        let me = self.me;
        self.neighbors
            .iter()
            .zip(self.neighbor_ids)
            .filter_map(move |(&u, &id)| match &self.outboxes[u] {
                Outbox::Silent => None,
                Outbox::Broadcast(m) => Some((id, m)),
                Outbox::Unicast(list) => list.iter().find(|(to, _)| *to == me).map(|(_, m)| (id, m)),
            })
    }

    pub fn messages(&self) -> impl Iterator<Item = &'a M> + '_ {
        self.iter().map(|(_, m)| m)
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.iter().next().is_none()
    }
}

/// Complexity ledger of one or more runs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundStats {
    pub rounds: u64,
    pub messages_sent: u64,
    pub max_message_bits: u64,
    /// Messages delivered in each round.
    pub per_round_messages: Vec<u64>,
}

impl RoundStats {
    /// Sequential composition: `other` ran after `self`.
    pub fn extend(&mut self, other: &RoundStats) {
        self.rounds += other.rounds;
        self.messages_sent += other.messages_sent;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.per_round_messages.extend_from_slice(&other.per_round_messages);
    }

    /// Accounts for a step that takes `rounds` rounds without messages.
    pub fn add_silent_rounds(&mut self, rounds: u64) {
        self.rounds += rounds;
        self.per_round_messages.extend(std::iter::repeat_n(0, rounds as usize));
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("round {round}: message {sender}->{receiver} has {size_bits} bits, CONGEST budget is {budget}")]
    Budget {
        sender: NodeId,
        receiver: NodeId,
        round: u64,
        size_bits: u64,
        budget: u64,
    },
    #[error("round {round}: node {sender} addressed non-neighbour {receiver}")]
    NotANeighbor { sender: NodeId, receiver: NodeId, round: u64 },
    #[error("{active} nodes still running after {max_rounds} rounds")]
    Timeout {
        max_rounds: u64,
        active: usize,
        stats: RoundStats,
    },
    #[error("max_rounds must be at least 1")]
    InvalidMaxRounds,
}

/// Outputs indexed by dense node index of the underlying graph (`None` for
/// nodes outside the executed subgraph) plus run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<O> {
    pub outputs: Vec<Option<O>>,
    pub stats: RoundStats,
}

impl<O> RunOutput<O> {
    /// Outputs of the executed nodes keyed by identifier.
    pub fn by_id<'a>(&'a self, g: &'a WeightedGraph) -> impl Iterator<Item = (NodeId, &'a O)> + 'a {
        self.outputs
            .iter()
            .enumerate()
            .filter_map(move |(v, o)| o.as_ref().map(|o| (g.id(v), o)))
    }
}

/// The graph as seen by one run: an induced subgraph with per-node weights.
#[derive(Debug, Clone)]
pub struct Network<'g> {
    graph: &'g WeightedGraph,
    nodes: Vec<usize>,
    adj: Vec<Vec<usize>>,
    neighbor_ids: Vec<Vec<NodeId>>,
    weights: Vec<i64>,
}

impl<'g> Network<'g> {
    pub fn full(g: &'g WeightedGraph) -> Self {
        let all: Vec<usize> = (0..g.n()).collect();
        Self::induced(g, &all)
    }

    /// Subgraph induced by `subset` (dense indices; order and duplicates are
    /// ignored).
    pub fn induced(g: &'g WeightedGraph, subset: &[usize]) -> Self {
        let mut nodes = subset.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let adj: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|&u| (local[u] != usize::MAX).then_some(local[u]))
                    .collect()
            })
            .collect();
        let neighbor_ids = adj
            .iter()
            .map(|list| list.iter().map(|&i| g.id(nodes[i])).collect())
            .collect();
        let weights = nodes.iter().map(|&v| g.weight(v) as i64).collect();
        Self {
            graph: g,
            nodes,
            adj,
            neighbor_ids,
            weights,
        }
    }

    /// Replaces node weights with `weights`, indexed by dense index of the
    /// underlying graph.
    pub fn with_weights(mut self, weights: &[i64]) -> Self {
        assert_eq!(weights.len(), self.graph.n());
        self.weights = self.nodes.iter().map(|&v| weights[v]).collect();
        self
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

struct Slot<'a, S, O> {
    ctx: NodeContext<'a>,
    rng: NodeRng,
    state: Option<S>,
    output: Option<O>,
}

/// Runs `program` on the whole graph.
pub fn run<P: NodeProgram>(
    g: &WeightedGraph,
    program: &P,
    config: &ExecConfig,
    seed: u64,
) -> Result<RunOutput<P::Output>, SimError> {
    execute(&Network::full(g), program, config, seed)
}

/// Runs `program` on the subgraph induced by `subset`. Identifiers and
/// `n_upper` are those of `g`.
pub fn run_on_subgraph<P: NodeProgram>(
    g: &WeightedGraph,
    subset: &[usize],
    program: &P,
    config: &ExecConfig,
    seed: u64,
) -> Result<RunOutput<P::Output>, SimError> {
    execute(&Network::induced(g, subset), program, config, seed)
}

/// Runs `program` on an explicit network.
pub fn execute<P: NodeProgram>(
    net: &Network<'_>,
    program: &P,
    config: &ExecConfig,
    seed: u64,
) -> Result<RunOutput<P::Output>, SimError> {
    if config.max_rounds == 0 {
        return Err(SimError::InvalidMaxRounds);
    }
    let g = net.graph;
    let n_upper = config.n_upper_for(g);
    let budget = config.budget_bits(n_upper);

    let mut slots: Vec<Slot<'_, P::State, P::Output>> = net
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| Slot {
            ctx: NodeContext {
                index: v,
                id: g.id(v),
                weight: net.weights[i],
                neighbors: &net.neighbor_ids[i],
                n_upper,
            },
            rng: node_rng(seed, g.id(v)),
            state: None,
            output: None,
        })
        .collect();

    let mut outboxes: Vec<Outbox<P::Msg>> = parallel::map_mut(config.schedule, &mut slots, |_, slot| {
        let (state, t) = program.init(&slot.ctx, &mut slot.rng);
        slot.state = Some(state);
        settle(slot, t)
    });

    let mut stats = RoundStats::default();
    loop {
        let active = slots.iter().filter(|s| s.state.is_some()).count();
        if active == 0 {
            break;
        }
        if stats.rounds == config.max_rounds {
            return Err(SimError::Timeout {
                max_rounds: config.max_rounds,
                active,
                stats,
            });
        }
        stats.rounds += 1;
        let round = stats.rounds;

        let mut delivered = 0u64;
        for (s, outbox) in outboxes.iter().enumerate() {
            let sender = g.id(net.nodes[s]);
            let mut account = |receiver: NodeId, msg: &P::Msg| {
                let size_bits = msg.size_bits();
                stats.max_message_bits = stats.max_message_bits.max(size_bits);
                if config.mode == Mode::Congest && size_bits > budget {
                    return Err(SimError::Budget {
                        sender,
                        receiver,
                        round,
                        size_bits,
                        budget,
                    });
                }
                Ok(())
            };
            match outbox {
                Outbox::Silent => {}
                Outbox::Broadcast(msg) => {
                    if let Some(&first) = net.neighbor_ids[s].first() {
                        account(first, msg)?;
                        delivered += net.adj[s].len() as u64;
                    }
                }
                Outbox::Unicast(list) => {
                    for (to, msg) in list {
                        if !net.neighbor_ids[s].contains(to) {
                            return Err(SimError::NotANeighbor {
                                sender,
                                receiver: *to,
                                round,
                            });
                        }
                        account(*to, msg)?;
                        delivered += 1;
                    }
                }
            }
        }
        stats.messages_sent += delivered;
        stats.per_round_messages.push(delivered);

        let previous = &outboxes;
        let next = parallel::map_mut(config.schedule, &mut slots, |s, slot| {
            let Some(state) = slot.state.as_mut() else {
                return Outbox::Silent;
            };
            let inbox = Inbox {
                me: slot.ctx.id,
                neighbors: &net.adj[s],
                neighbor_ids: &net.neighbor_ids[s],
                outboxes: previous,
            };
            let t = program.step(&slot.ctx, state, &inbox, &mut slot.rng);
            settle(slot, t)
        });
        outboxes = next;
    }

    let mut outputs: Vec<Option<P::Output>> = (0..g.n()).map(|_| None).collect();
    for (slot, &v) in slots.into_iter().zip(&net.nodes) {
        outputs[v] = slot.output;
    }
    Ok(RunOutput { outputs, stats })
}

fn settle<S, M, O>(slot: &mut Slot<'_, S, O>, t: Transition<M, O>) -> Outbox<M> {
    if let Status::Halt(output) = t.status {
        slot.output = Some(output);
        slot.state = None;
    }
    t.outbox
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone)]
    struct Bits(u64);

    impl WireSize for Bits {
        fn size_bits(&self) -> u64 {
            self.0
        }
    }

    /// Halts in `init` with a fixed output.
    struct Immediate;

    impl NodeProgram for Immediate {
        type State = ();
        type Msg = Bits;
        type Output = &'static str;

        fn init(&self, _: &NodeContext<'_>, _: &mut NodeRng) -> ((), Transition<Bits, &'static str>) {
            ((), Transition::halt("x"))
        }

        fn step(&self, _: &NodeContext<'_>, _: &mut (), _: &Inbox<'_, Bits>, _: &mut NodeRng) -> Transition<Bits, &'static str> {
            unreachable!()
        }
    }

    /// Sends a message of `size` bits carrying its id, halts with the
    /// identifiers it received.
    struct Exchange {
        size: u64,
    }

    #[derive(Debug, Clone)]
    struct IdMsg(NodeId, u64);

    impl WireSize for IdMsg {
        fn size_bits(&self) -> u64 {
            self.1
        }
    }

    impl NodeProgram for Exchange {
        type State = ();
        type Msg = IdMsg;
        type Output = Vec<NodeId>;

        fn init(&self, ctx: &NodeContext<'_>, _: &mut NodeRng) -> ((), Transition<IdMsg, Vec<NodeId>>) {
            ((), Transition::broadcast(IdMsg(ctx.id, self.size)))
        }

        fn step(&self, _: &NodeContext<'_>, _: &mut (), inbox: &Inbox<'_, IdMsg>, _: &mut NodeRng) -> Transition<IdMsg, Vec<NodeId>> {
            Transition::halt(inbox.messages().map(|m| m.0).collect())
        }
    }

    /// Never halts.
    struct Forever;

    impl NodeProgram for Forever {
        type State = ();
        type Msg = Bits;
        type Output = ();

        fn init(&self, _: &NodeContext<'_>, _: &mut NodeRng) -> ((), Transition<Bits, ()>) {
            ((), Transition::wait())
        }

        fn step(&self, _: &NodeContext<'_>, _: &mut (), _: &Inbox<'_, Bits>, _: &mut NodeRng) -> Transition<Bits, ()> {
            Transition::broadcast(Bits(1))
        }
    }

    fn edge() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap()
    }

    #[test]
    fn halting_in_init_takes_zero_rounds() {
        let g = WeightedGraph::from_edges(vec![1], &[]).unwrap();
        let out = run(&g, &Immediate, &ExecConfig::default(), 0).unwrap();
        assert_eq!(out.outputs, vec![Some("x")]);
        assert_eq!(out.stats.rounds, 0);
    }

    #[test]
    fn single_exchange_on_an_edge() {
        let out = run(&edge(), &Exchange { size: 8 }, &ExecConfig::default(), 0).unwrap();
        assert_eq!(out.stats.rounds, 1);
        assert_eq!(out.stats.messages_sent, 2);
        assert_eq!(out.stats.per_round_messages, vec![2]);
        assert_eq!(out.outputs, vec![Some(vec![1]), Some(vec![0])]);
    }

    #[test]
    fn congest_budget_is_enforced() {
        let config = ExecConfig::default();
        let budget = config.budget_bits(2);
        assert!(run(&edge(), &Exchange { size: budget }, &config, 0).is_ok());
        let err = run(&edge(), &Exchange { size: budget + 1 }, &config, 0).unwrap_err();
        assert_eq!(
            err,
            SimError::Budget {
                sender: 0,
                receiver: 1,
                round: 1,
                size_bits: budget + 1,
                budget
            }
        );
        let local = config.with_mode(Mode::Local);
        let out = run(&edge(), &Exchange { size: budget + 1 }, &local, 0).unwrap();
        assert_eq!(out.stats.max_message_bits, budget + 1);
    }

    #[test]
    fn timeout_carries_partial_stats() {
        let config = ExecConfig {
            max_rounds: 5,
            ..ExecConfig::default()
        };
        match run(&edge(), &Forever, &config, 0) {
            Err(SimError::Timeout { max_rounds: 5, active: 2, stats }) => {
                assert_eq!(stats.rounds, 5);
                assert_eq!(stats.messages_sent, 8);
            }
            other => panic!("unexpected {other:?}"),
        }
        let zero = ExecConfig {
            max_rounds: 0,
            ..ExecConfig::default()
        };
        assert_eq!(run(&edge(), &Forever, &zero, 0).unwrap_err(), SimError::InvalidMaxRounds);
    }

    #[test]
    fn subgraph_runs() {
        let tri = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let config = ExecConfig::default();
        let empty = run_on_subgraph(&tri, &[], &Exchange { size: 1 }, &config, 3).unwrap();
        assert_eq!(empty.stats.rounds, 0);
        assert!(empty.outputs.iter().all(Option::is_none));

        let full = run(&tri, &Exchange { size: 1 }, &config, 3).unwrap();
        let same = run_on_subgraph(&tri, &[2, 0, 1], &Exchange { size: 1 }, &config, 3).unwrap();
        assert_eq!(full, same);

        let pair = run_on_subgraph(&tri, &[0, 2], &Exchange { size: 1 }, &config, 3).unwrap();
        assert_eq!(pair.outputs, vec![Some(vec![2]), None, Some(vec![0])]);
        assert_eq!(pair.stats.messages_sent, 2);
    }

    #[test]
    fn budget_formula() {
        let c = ExecConfig::default();
        assert_eq!(c.budget_bits(1), 32 * 4);
        assert_eq!(c.budget_bits(1 << 10), 32 * 10);
        assert_eq!(c.budget_bits(1000), 32 * 10);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(id_bits(1), 1);
    }
}
