//! Local-ratio boosting.
//!
//! `t = ⌈c/ε⌉` push phases each run an inner algorithm on the nodes with
//! positive residual weight, push its output `I_i` on a stack together with
//! the residual weights `w_i` of its members, and reduce every node's residual
//! by the weight of its neighbours in `I_i` (members drop to zero). The pop
//! stage then walks the stack from the newest frame down, adding a node
//! unless one of its neighbours was already added.
//!
//! For an inner algorithm returning a `1/(cΔ)` fraction of the positive
//! residual weight, the result is a `(1+ε)Δ`-approximation and weighs at
//! least `w(V)/((1+ε)(Δ+1))`.

use serde::Serialize;

use crate::algorithm::{validate_output, AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::graph::{IndependentSet, NodeId, WeightedGraph};
use crate::mis::members_of;
use crate::rng::{phase_seed, NodeRng};
use crate::simulator::{self, ExecConfig, Inbox, Network, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

/// One push phase: `I_i` and `w_i` restricted to `I_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub phase: usize,
    pub members: Vec<usize>,
    pub residuals: Vec<i64>,
}

/// The local-ratio stack. Frames are pushed in phase order and popped in
/// reverse.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PhaseStack {
    frames: Vec<Frame>,
}

impl PhaseStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pushes `members` with their residuals taken from `weights`.
    pub fn push(&mut self, phase: usize, members: &[usize], weights: &[i64]) {
        self.frames.push(Frame {
            phase,
            members: members.to_vec(),
            residuals: members.iter().map(|&v| weights[v]).collect(),
        });
    }

    /// Frames in push order.
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Frames in pop order.
    pub fn pop_order(&self) -> impl Iterator<Item = &Frame> {
        self.frames.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// `Σ_i w_i(I_i)`.
    pub fn total(&self) -> i128 {
        self.frames
            .iter()
            .flat_map(|f| f.residuals.iter())
            .map(|&r| i128::from(r))
            .sum()
    }

    /// JSON audit dump with node identifiers.
    pub fn to_json(&self, g: &WeightedGraph) -> serde_json::Value {
        let frames: Vec<serde_json::Value> = self
            .frames
            .iter()
            .map(|f| {
                serde_json::json!({
                    "phase": f.phase,
                    "members": f.members.iter().map(|&v| g.id(v)).collect::<Vec<_>>(),
                    "residuals": f.residuals,
                })
            })
            .collect();
        serde_json::json!({ "frames": frames, "total": self.total().to_string() })
    }
}

/// Outcome of checking `w(I) ≥ Σ_i w_i(I_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StackCheck {
    pub holds: bool,
    pub set_weight: i128,
    pub stack_total: i128,
    pub phases: usize,
}

/// Stack property with respect to arbitrary base weights.
pub fn stack_check(weights: &[i64], members: &[usize], stack: &PhaseStack) -> StackCheck {
    let set_weight: i128 = members.iter().map(|&v| i128::from(weights[v])).sum();
    let stack_total = stack.total();
    StackCheck {
        holds: set_weight >= stack_total,
        set_weight,
        stack_total,
        phases: stack.len(),
    }
}

/// Stack property with respect to the input weights of `g`.
pub fn check_stack_property(g: &WeightedGraph, set: &IndependentSet, stack: &PhaseStack) -> bool {
    let weights: Vec<i64> = g.weights().iter().map(|&w| w as i64).collect();
    stack_check(&weights, &set.members, stack).holds
}

/// `w_{i+1}(v) = 0` for `v ∈ I`, otherwise `w_i(v) − Σ_{u ∈ N(v) ∩ I} w_i(u)`,
/// for every node of `g`. Returns the dense index of a node whose residual
/// overflows.
pub fn reduce_weights(g: &WeightedGraph, weights: &[i64], set: &[usize]) -> Result<Vec<i64>, usize> {
    let all: Vec<usize> = (0..g.n()).collect();
    reduce_weights_on(g, &all, weights, set)
}

/// [`reduce_weights`] applied only to `nodes`; other entries are copied.
pub fn reduce_weights_on(g: &WeightedGraph, nodes: &[usize], weights: &[i64], set: &[usize]) -> Result<Vec<i64>, usize> {
    let mut in_set = vec![false; g.n()];
    for &v in set {
        in_set[v] = true;
    }
    let mut next = weights.to_vec();
    for &v in nodes {
        next[v] = if in_set[v] {
            0
        } else {
            g.neighbors(v)
                .iter()
                .filter(|&&u| in_set[u])
                .try_fold(weights[v], |acc, &u| acc.checked_sub(weights[u]))
                .ok_or(v)?
        };
    }
    Ok(next)
}

/// One round: members of `I_i` announce their residual, everybody else
/// subtracts what it hears. Nodes flagged in `zeroed` drop to zero instead.
/// Output `None` signals overflow.
pub struct ResidualUpdate<'a> {
    pub in_set: &'a [bool],
    pub zeroed: Option<&'a [bool]>,
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualMsg(pub i64);

impl WireSize for ResidualMsg {
    fn size_bits(&self) -> u64 {
        64
    }
}

impl NodeProgram for ResidualUpdate<'_> {
    type State = ();
    type Msg = ResidualMsg;
    type Output = Option<i64>;

    fn init(&self, ctx: &NodeContext<'_>, _: &mut NodeRng) -> ((), Transition<ResidualMsg, Option<i64>>) {
        if self.in_set[ctx.index] {
            ((), Transition::broadcast_and_halt(ResidualMsg(ctx.weight), Some(0)))
        } else {
            ((), Transition::wait())
        }
    }

    fn step(&self, ctx: &NodeContext<'_>, _: &mut (), inbox: &Inbox<'_, ResidualMsg>, _: &mut NodeRng) -> Transition<ResidualMsg, Option<i64>> {
        if self.zeroed.is_some_and(|z| z[ctx.index]) {
            return Transition::halt(Some(0));
        }
        Transition::halt(inbox.messages().try_fold(ctx.weight, |acc, m| acc.checked_sub(m.0)))
    }
}

/// Runs [`ResidualUpdate`] on `nodes` and checks the result against the
/// sequential formula `expected`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn distributed_update(
    g: &WeightedGraph,
    nodes: &[usize],
    weights: &[i64],
    set: &[usize],
    zeroed: Option<&[bool]>,
    expected: &[i64],
    exec: &ExecConfig,
    phase: usize,
) -> Result<RoundStats, Error> {
    let mut in_set = vec![false; g.n()];
    for &v in set {
        in_set[v] = true;
    }
    let program = ResidualUpdate {
        in_set: &in_set,
        zeroed,
    };
    let net = Network::induced(g, nodes).with_weights(weights);
    let out = simulator::execute(&net, &program, exec, 0)?;
    for &v in nodes {
        match out.outputs[v] {
            Some(Some(r)) if r == expected[v] => {}
            Some(None) => return Err(Error::Overflow { node: g.id(v), phase }),
            other => {
                return Err(Error::Invariant(format!(
                    "phase {phase}: distributed residual of node {} is {other:?}, expected {}",
                    g.id(v),
                    expected[v]
                )))
            }
        }
    }
    Ok(out.stats)
}

/// Pop stage as a node program: the node pushed in phase `f` of `t` decides
/// in round `t − f + 1`, joining unless a neighbour announced itself
/// earlier.
pub struct PopProgram<'a> {
    /// Phase in which each node was pushed (dense index).
    pub frame_of: &'a [Option<usize>],
    pub phases: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct JoinedMsg;

impl WireSize for JoinedMsg {
    fn size_bits(&self) -> u64 {
        1
    }
}

#[derive(Debug)]
pub struct PopState {
    round: usize,
    blocked: bool,
}

impl NodeProgram for PopProgram<'_> {
    type State = PopState;
    type Msg = JoinedMsg;
    type Output = bool;

    fn init(&self, ctx: &NodeContext<'_>, _: &mut NodeRng) -> (PopState, Transition<JoinedMsg, bool>) {
        let state = PopState {
            round: 0,
            blocked: false,
        };
        match self.frame_of[ctx.index] {
            Some(_) => (state, Transition::wait()),
            None => (state, Transition::halt(false)),
        }
    }

    fn step(&self, ctx: &NodeContext<'_>, state: &mut PopState, inbox: &Inbox<'_, JoinedMsg>, _: &mut NodeRng) -> Transition<JoinedMsg, bool> {
        state.round += 1;
        state.blocked |= !inbox.is_empty();
        let frame = self.frame_of[ctx.index].expect("frameless nodes halt in init");
        if state.round < self.phases + 1 - frame {
            Transition::wait()
        } else if state.blocked {
            Transition::halt(false)
        } else {
            Transition::broadcast_and_halt(JoinedMsg, true)
        }
    }
}

/// Distributed pop stage over the union of the stack's frames.
pub fn pop_stage(g: &WeightedGraph, stack: &PhaseStack, exec: &ExecConfig) -> Result<(Vec<usize>, RoundStats), Error> {
    let mut frame_of = vec![None; g.n()];
    let mut nodes = Vec::new();
    for (k, frame) in stack.frames().iter().enumerate() {
        for &v in &frame.members {
            if frame_of[v].is_some() {
                return Err(Error::Invariant(format!("node {} pushed twice", g.id(v))));
            }
            frame_of[v] = Some(k + 1);
            nodes.push(v);
        }
    }
    let program = PopProgram {
        frame_of: &frame_of,
        phases: stack.len(),
    };
    let out = simulator::run_on_subgraph(g, &nodes, &program, exec, 0)?;
    Ok((members_of(&out.outputs), out.stats))
}

/// Sequential pop stage.
pub fn pop_sequential(g: &WeightedGraph, stack: &PhaseStack) -> Vec<usize> {
    let mut taken = vec![false; g.n()];
    for frame in stack.pop_order() {
        for &v in &frame.members {
            if !g.neighbors(v).iter().any(|&u| taken[u]) {
                taken[v] = true;
            }
        }
    }
    (0..g.n()).filter(|&v| taken[v]).collect()
}

/// Every pushed node has a member of its inclusive neighbourhood in `set`.
pub fn covers_frames(g: &WeightedGraph, set: &[usize], stack: &PhaseStack) -> Option<NodeId> {
    let mut taken = vec![false; g.n()];
    for &v in set {
        taken[v] = true;
    }
    stack
        .frames()
        .iter()
        .flat_map(|f| f.members.iter())
        .find(|&&v| !taken[v] && !g.neighbors(v).iter().any(|&u| taken[u]))
        .map(|&v| g.id(v))
}

/// `⌈c/ε⌉`, tolerant of floating-point noise in the quotient.
pub fn phase_count(eps: f64, c: f64) -> Result<usize, Error> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    if !c.is_finite() || c < 1.0 {
        return Err(Error::InvalidParameter(format!("c must be at least 1, got {c}")));
    }
    Ok(((c / eps) - 1e-9).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostResult {
    pub members: Vec<usize>,
    pub stack: PhaseStack,
    pub stats: RoundStats,
    pub phases: usize,
    /// Largest round count of a single inner invocation.
    pub max_inner_rounds: u64,
    pub mis_valid: bool,
    /// Stack property of this run w.r.t. the instance weights.
    pub stack_check: StackCheck,
    /// Stack checks reported by the inner invocations.
    pub inner_checks: Vec<StackCheck>,
}

/// Runs `t = ⌈c/ε⌉` push phases of `inner`, then the pop stage.
pub fn boost<A: MaxIsAlgorithm + ?Sized>(
    inst: &Instance<'_>,
    inner: &A,
    eps: f64,
    c: f64,
    exec: &ExecConfig,
    seed: u64,
) -> Result<BoostResult, Error> {
    let phases = phase_count(eps, c)?;
    let g = inst.graph;
    let mut weights = inst.weights.clone();
    let mut stack = PhaseStack::new();
    let mut stats = RoundStats::default();
    let mut max_inner_rounds = 0;
    let mut mis_valid = true;
    let mut inner_checks = Vec::new();

    for phase in 1..=phases {
        let active = Instance::new(g, inst.nodes.clone(), weights.clone()).positive();
        let out = inner.run(&active, exec, phase_seed(seed, phase as u64))?;
        validate_output(&active, &out.members).map_err(|reason| Error::InnerFailure { phase, reason })?;
        mis_valid &= out.mis_valid;
        max_inner_rounds = max_inner_rounds.max(out.stats.rounds);
        stats.extend(&out.stats);
        inner_checks.extend(out.stack_checks);

        stack.push(phase, &out.members, &weights);
        let next = reduce_weights_on(g, &inst.nodes, &weights, &out.members)
            .map_err(|v| Error::Overflow { node: g.id(v), phase })?;
        let update = distributed_update(g, &active.nodes, &weights, &out.members, None, &next, exec, phase)?;
        stats.extend(&update);
        weights = next;
    }

    let (members, pop) = pop_stage(g, &stack, exec)?;
    stats.extend(&pop);
    let stack_check = stack_check(&inst.weights, &members, &stack);
    Ok(BoostResult {
        members,
        stack,
        stats,
        phases,
        max_inner_rounds,
        mis_valid,
        stack_check,
        inner_checks,
    })
}

/// `boost(inner)` behind the common algorithm interface.
#[derive(Debug, Clone)]
pub struct Boosted<A> {
    pub inner: A,
    pub eps: f64,
    pub c: f64,
}

impl<A: MaxIsAlgorithm> MaxIsAlgorithm for Boosted<A> {
    fn name(&self) -> String {
        format!("boost-{}", self.inner.name())
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let r = boost(inst, &self.inner, self.eps, self.c, exec, seed)?;
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
    use crate::approx::HeavyMis;

    fn path(weights: &[u64]) -> WeightedGraph {
        let edges: Vec<_> = (1..weights.len()).map(|i| (i - 1, i)).collect();
        WeightedGraph::from_edges(weights.to_vec(), &edges).unwrap()
    }

    /// Returns a fixed set per phase (empty once the script runs out).
    struct Scripted(Vec<Vec<usize>>);

    impl MaxIsAlgorithm for Scripted {
        fn name(&self) -> String {
            "scripted".into()
        }

        fn run(&self, _: &Instance<'_>, _: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
            let phase = (1..=self.0.len() as u64).find(|&p| phase_seed(SCRIPT_SEED, p) == seed);
            let members = phase
                .map(|p| self.0[p as usize - 1].clone())
                .unwrap_or_default();
            Ok(AlgOutcome {
                members,
                mis_valid: true,
                ..AlgOutcome::default()
            })
        }
    }

    const SCRIPT_SEED: u64 = 77;

    #[test]
    fn reduce_examples() {
        let g = path(&[3, 5, 3]);
        assert_eq!(reduce_weights(&g, &[3, 5, 3], &[1]), Ok(vec![-2, 0, -2]));
        assert_eq!(reduce_weights(&g, &[3, 5, 3], &[]), Ok(vec![3, 5, 3]));
        let g = path(&[2, 3, 3, 2]);
        assert_eq!(reduce_weights(&g, &[2, 3, 3, 2], &[1]), Ok(vec![-1, 0, 0, 2]));
        assert_eq!(reduce_weights(&g, &[i64::MIN, 3, 3, 2], &[1]), Err(0));
    }

    #[test]
    fn reduce_matches_closed_neighbourhood_form() {
        use crate::graph::{generate, Family, WeightModel};
        for seed in 0..20 {
            let g = generate(Family::Gnp { n: 30, p: 0.2 }, WeightModel::UniformRange { lo: 1, hi: 50 }, seed).unwrap();
            let w: Vec<i64> = g.weights().iter().map(|&x| x as i64).collect();
            let set = crate::mis::greedy_mis(&g, crate::mis::GreedyOrder::Permutation(seed)).members;
            let closed: Vec<i64> = (0..g.n())
                .map(|v| {
                    let hit: i64 = std::iter::once(v)
                        .chain(g.neighbors(v).iter().copied())
                        .filter(|u| set.contains(u))
                        .map(|u| w[u])
                        .sum();
                    w[v] - hit
                })
                .collect();
            assert_eq!(reduce_weights(&g, &w, &set).unwrap(), closed);
        }
    }

    #[test]
    fn scripted_trace_on_four_node_path() {
        let g = path(&[2, 3, 3, 2]);
        let inner = Scripted(vec![vec![1], vec![3]]);
        let r = boost(&Instance::full(&g), &inner, 1.0, 2.0, &ExecConfig::default(), SCRIPT_SEED).unwrap();
        assert_eq!(r.phases, 2);
        assert_eq!(r.members, vec![1, 3]);
        assert_eq!(r.stack.total(), 5);
        let set = IndependentSet::new(&g, r.members.clone());
        assert_eq!(set.weight, 5);
        assert!(check_stack_property(&g, &set, &r.stack));
        assert_eq!(r.stack_check.set_weight, r.stack_check.stack_total);
    }

    #[test]
    fn stack_property_trivial_cases() {
        let g = path(&[4, 1]);
        let mut stack = PhaseStack::new();
        assert!(check_stack_property(&g, &IndependentSet::empty(), &stack));
        stack.push(1, &[0], &[4, 1]);
        assert!(check_stack_property(&g, &IndependentSet::new(&g, vec![0]), &stack));
        assert!(!check_stack_property(&g, &IndependentSet::new(&g, vec![1]), &stack));
    }

    #[test]
    fn heavy_boost_on_three_node_path() {
        let g = path(&[3, 5, 3]);
        for seed in 0..10 {
            let r = boost(&Instance::full(&g), &HeavyMis, 0.5, 8.0, &ExecConfig::default(), seed).unwrap();
            assert_eq!(r.phases, 16);
            let w = g.weight_of(&r.members);
            // OPT = 6, Δ = 2.
            assert!(1.5 * 2.0 * w as f64 >= 6.0);
            assert!(r.stack_check.holds);
            assert!(g.is_independent(&r.members));
        }
    }

    #[test]
    fn edgeless_graph_is_taken_in_phase_one() {
        let g = WeightedGraph::from_edges(vec![2, 7, 1], &[]).unwrap();
        let r = boost(&Instance::full(&g), &HeavyMis, 1.0, 4.0, &ExecConfig::default(), 3).unwrap();
        assert_eq!(r.members, vec![0, 1, 2]);
        assert_eq!(r.stack.frames()[0].members, vec![0, 1, 2]);
        assert!(r.stack.frames()[1..].iter().all(|f| f.members.is_empty()));
    }

    #[test]
    fn distributed_pop_matches_sequential() {
        use crate::graph::{generate, Family, WeightModel};
        for seed in 0..20 {
            let g = generate(Family::Gnp { n: 40, p: 0.15 }, WeightModel::HeavyTail { max: 100 }, seed).unwrap();
            let r = boost(&Instance::full(&g), &HeavyMis, 0.5, 4.0, &ExecConfig::default(), seed).unwrap();
            assert_eq!(r.members, pop_sequential(&g, &r.stack));
            assert_eq!(covers_frames(&g, &r.members, &r.stack), None);
            assert!(r.stats.rounds <= r.phases as u64 * (r.max_inner_rounds + 2));
        }
    }

    #[test]
    fn phase_count_rounding() {
        assert_eq!(phase_count(0.1, 8.0).unwrap(), 80);
        assert_eq!(phase_count(0.3, 1.0).unwrap(), 4);
        assert_eq!(phase_count(0.25, 8.0).unwrap(), 32);
        assert!(phase_count(0.0, 8.0).is_err());
        assert!(phase_count(0.5, 0.5).is_err());
    }

    #[test]
    fn inner_failure_names_the_phase() {
        let g = path(&[1, 1, 1]);
        let adjacent = Scripted(vec![vec![0, 1]]);
        let err = boost(&Instance::full(&g), &adjacent, 1.0, 3.0, &ExecConfig::default(), SCRIPT_SEED).unwrap_err();
        assert!(matches!(err, Error::InnerFailure { phase: 1, .. }), "{err}");
        let exhausted = Scripted(vec![vec![1], vec![1]]);
        let err = boost(&Instance::full(&g), &exhausted, 1.0, 3.0, &ExecConfig::default(), SCRIPT_SEED).unwrap_err();
        assert!(matches!(err, Error::InnerFailure { phase: 2, .. }), "{err}");
    }
}
