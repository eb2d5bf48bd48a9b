//! Good-node approximation: a node is good when its weight is at least a
//! `1 / (2(δ(v)+1))` fraction of the weight of its inclusive neighbourhood,
//! where `δ(v)` is the largest degree in that neighbourhood. An MIS of the
//! good nodes has weight at least `w(V) / (4(Δ+1))`.

use crate::algorithm::{AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::mis::{members_of, verify_mis, LubyMis};
use crate::rng::{phase_seed, NodeRng};
use crate::simulator::{self, id_bits, ExecConfig, Inbox, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

/// `(deg(v), δ(v), s(v))` where `s(v)` is the weight of `N⁺(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDegreeStats {
    pub degree: u64,
    pub delta: u64,
    pub inclusive_weight: i128,
}

/// Two rounds: broadcast the weight (the number of replies is the degree),
/// then broadcast the degree.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalStatsProgram;

#[derive(Debug, Clone, Copy)]
pub enum StatsMsg {
    Weight(i64),
    Degree { value: u64, width: u64 },
}

impl WireSize for StatsMsg {
    fn size_bits(&self) -> u64 {
        1 + match self {
            StatsMsg::Weight(_) => 64,
            StatsMsg::Degree { width, .. } => *width,
        }
    }
}

#[derive(Debug, Default)]
pub struct StatsState {
    degree: Option<u64>,
    inclusive_weight: i128,
}

impl NodeProgram for LocalStatsProgram {
    type State = StatsState;
    type Msg = StatsMsg;
    type Output = LocalDegreeStats;

    fn init(&self, ctx: &NodeContext<'_>, _: &mut NodeRng) -> (StatsState, Transition<StatsMsg, LocalDegreeStats>) {
        (StatsState::default(), Transition::broadcast(StatsMsg::Weight(ctx.weight)))
    }

    fn step(
        &self,
        ctx: &NodeContext<'_>,
        state: &mut StatsState,
        inbox: &Inbox<'_, StatsMsg>,
        _: &mut NodeRng,
    ) -> Transition<StatsMsg, LocalDegreeStats> {
        match state.degree {
            None => {
                let mut degree = 0;
                state.inclusive_weight = i128::from(ctx.weight);
                for m in inbox.messages() {
                    if let StatsMsg::Weight(w) = m {
                        degree += 1;
                        state.inclusive_weight += i128::from(*w);
                    }
                }
                state.degree = Some(degree);
                Transition::broadcast(StatsMsg::Degree {
                    value: degree,
                    width: id_bits(ctx.n_upper),
                })
            }
            Some(degree) => {
                let delta = inbox
                    .messages()
                    .filter_map(|m| match m {
                        StatsMsg::Degree { value, .. } => Some(*value),
                        StatsMsg::Weight(_) => None,
                    })
                    .fold(degree, u64::max);
                Transition::halt(LocalDegreeStats {
                    degree,
                    delta,
                    inclusive_weight: state.inclusive_weight,
                })
            }
        }
    }
}

/// Runs [`LocalStatsProgram`] on the instance.
pub fn compute_local_stats(
    inst: &Instance<'_>,
    exec: &ExecConfig,
    seed: u64,
) -> Result<(Vec<Option<LocalDegreeStats>>, RoundStats), Error> {
    let out = simulator::execute(&inst.network(), &LocalStatsProgram, exec, seed)?;
    Ok((out.outputs, out.stats))
}

/// The good predicate `2(δ(v)+1)·w(v) ≥ s(v)` in exact arithmetic. Nodes of
/// non-positive weight are never good.
pub fn is_good(weight: i64, stats: &LocalDegreeStats) -> bool {
    weight > 0 && 2 * (i128::from(stats.delta) + 1) * i128::from(weight) >= stats.inclusive_weight
}

/// Good nodes of the instance, given its local statistics.
pub fn good_nodes(inst: &Instance<'_>, stats: &[Option<LocalDegreeStats>]) -> Vec<usize> {
    inst.nodes
        .iter()
        .copied()
        .filter(|&v| stats[v].as_ref().is_some_and(|s| is_good(inst.weights[v], s)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeavyResult {
    pub members: Vec<usize>,
    pub good: Vec<usize>,
    pub stats: RoundStats,
    /// Whether the MIS call returned a maximal independent set of the good
    /// subgraph.
    pub mis_valid: bool,
}

/// Good-node algorithm with Luby's MIS as the black box.
pub fn heavy_mis_approx(inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<HeavyResult, Error> {
    heavy_mis_approx_with(inst, &LubyMis, exec, seed)
}

/// Good-node algorithm with an arbitrary MIS program (output `true` = in).
pub fn heavy_mis_approx_with<P>(inst: &Instance<'_>, mis: &P, exec: &ExecConfig, seed: u64) -> Result<HeavyResult, Error>
where
    P: NodeProgram<Output = bool>,
{
    if let Some(&v) = inst.nodes.iter().find(|&&v| inst.weights[v] < 0) {
        return Err(Error::InvalidParameter(format!(
            "node {} has negative weight; the good-node algorithm needs non-negative weights",
            inst.graph.id(v)
        )));
    }
    let (local, mut stats) = compute_local_stats(inst, exec, phase_seed(seed, 0))?;
    let good = good_nodes(inst, &local);
    let out = simulator::run_on_subgraph(inst.graph, &good, mis, exec, phase_seed(seed, 1))?;
    let members = members_of(&out.outputs);
    stats.extend(&out.stats);
    let mis_valid = verify_mis(inst.graph, &good, &members).is_ok();
    Ok(HeavyResult {
        members,
        good,
        stats,
        mis_valid,
    })
}

/// [`heavy_mis_approx`] behind the common algorithm interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeavyMis;

impl MaxIsAlgorithm for HeavyMis {
    fn name(&self) -> String {
        "heavy".into()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let r = heavy_mis_approx(inst, exec, seed)?;
        Ok(AlgOutcome {
            members: r.members,
            stats: r.stats,
            mis_valid: r.mis_valid,
            stack_checks: Vec::new(),
        })
    }
}
