//! Weighted sparsification.
//!
//! Each node joins the sampled subgraph `H` independently with probability
//!
//! ```text
//! p(v) = min{ λ · log n · (1/δ(v) + w(v)/w_max(v)), 1 }
//! ```
//!
//! where `w_max(v)` is the largest weighted degree `w(N(u))` over
//! `u ∈ N⁺(v)`. The good-node algorithm then runs on `H`, whose maximum
//! degree is `O(log n)` with high probability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::approx::heavy_mis_approx;
use crate::rng::{phase_seed, salt, stream, NodeRng};
use crate::simulator::{self, id_bits, ExecConfig, Inbox, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.ln(),
        }
    }
}

/// Per-node sampling data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingProfile {
    pub degree: u64,
    /// `w(N(v))`.
    pub weighted_degree: i128,
    /// `max { w(N(u)) : u ∈ N⁺(v) }`.
    pub w_max: i128,
    /// `max { deg(u) : u ∈ N⁺(v) }`.
    pub delta: u64,
    pub p: f64,
}

/// The clamped sampling probability. Isolated nodes (`δ = 0`) and nodes
/// whose neighbourhoods carry no weight (`w_max = 0`) get probability 1.
pub fn sampling_probability(lambda: f64, log_base: LogBase, n: u64, delta: u64, weight: i64, w_max: i128) -> f64 {
    if delta == 0 || w_max <= 0 {
        return 1.0;
    }
    let raw = lambda * log_base.log(n as f64) * (1.0 / delta as f64 + weight as f64 / w_max as f64);
    raw.clamp(0.0, 1.0)
}

/// Two rounds: weights first, then `(degree, weighted degree)`.
#[derive(Debug, Clone, Copy)]
pub struct SamplingProfileProgram {
    pub lambda: f64,
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Copy)]
pub enum ProfileMsg {
    Weight(i64),
    Degrees { degree: u64, weighted: i128, width: u64 },
}

impl WireSize for ProfileMsg {
    fn size_bits(&self) -> u64 {
        1 + match self {
            ProfileMsg::Weight(_) => 64,
            ProfileMsg::Degrees { width, .. } => width + 64,
        }
    }
}

#[derive(Debug, Default)]
pub struct ProfileState {
    first: Option<(u64, i128)>,
}

impl NodeProgram for SamplingProfileProgram {
    type State = ProfileState;
    type Msg = ProfileMsg;
    type Output = SamplingProfile;

    fn init(&self, ctx: &NodeContext<'_>, _: &mut NodeRng) -> (ProfileState, Transition<ProfileMsg, SamplingProfile>) {
        (ProfileState::default(), Transition::broadcast(ProfileMsg::Weight(ctx.weight)))
    }

    fn step(
        &self,
        ctx: &NodeContext<'_>,
        state: &mut ProfileState,
        inbox: &Inbox<'_, ProfileMsg>,
        _: &mut NodeRng,
    ) -> Transition<ProfileMsg, SamplingProfile> {
        match state.first {
            None => {
                let (mut degree, mut weighted) = (0u64, 0i128);
                for m in inbox.messages() {
                    if let ProfileMsg::Weight(w) = m {
                        degree += 1;
                        weighted += i128::from(*w);
                    }
                }
                state.first = Some((degree, weighted));
                Transition::broadcast(ProfileMsg::Degrees {
                    degree,
                    weighted,
                    width: id_bits(ctx.n_upper),
                })
            }
            Some((degree, weighted_degree)) => {
                let (mut delta, mut w_max) = (degree, weighted_degree);
                for m in inbox.messages() {
                    if let ProfileMsg::Degrees { degree, weighted, .. } = *m {
                        delta = delta.max(degree);
                        w_max = w_max.max(weighted);
                    }
                }
                let p = sampling_probability(self.lambda, self.log_base, ctx.n_upper, delta, ctx.weight, w_max);
                Transition::halt(SamplingProfile {
                    degree,
                    weighted_degree,
                    w_max,
                    delta,
                    p,
                })
            }
        }
    }
}

/// Runs [`SamplingProfileProgram`] on the instance.
pub fn compute_sampling_profile(
    inst: &Instance<'_>,
    lambda: f64,
    log_base: LogBase,
    exec: &ExecConfig,
    seed: u64,
) -> Result<(Vec<Option<SamplingProfile>>, RoundStats), Error> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let program = SamplingProfileProgram { lambda, log_base };
    let out = simulator::execute(&inst.network(), &program, exec, seed)?;
    Ok((out.outputs, out.stats))
}

/// One Bernoulli draw per node from its own sampling stream: a 53-bit uniform
/// integer compared against `p(v) · 2^53`.
pub fn sample_subgraph(inst: &Instance<'_>, profile: &[Option<SamplingProfile>], seed: u64) -> Vec<usize> {
    const SCALE: f64 = (1u64 << 53) as f64;
    inst.nodes
        .iter()
        .copied()
        .filter(|&v| {
            let Some(prof) = profile[v] else { return false };
            let draw = stream(seed, salt::SAMPLE, inst.graph.id(v)).random::<u64>() >> 11;
            (draw as f64) < prof.p * SCALE
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseResult {
    pub members: Vec<usize>,
    /// `V_H`.
    pub sampled: Vec<usize>,
    /// `Δ_H`.
    pub sampled_max_degree: usize,
    /// `w(V_H)`.
    pub sampled_weight: i128,
    pub stats: RoundStats,
    pub mis_valid: bool,
}

/// Samples `H` and runs the good-node algorithm on it.
pub fn sparse_approx(
    inst: &Instance<'_>,
    lambda: f64,
    log_base: LogBase,
    exec: &ExecConfig,
    seed: u64,
) -> Result<SparseResult, Error> {
    let (profile, mut stats) = compute_sampling_profile(inst, lambda, log_base, exec, phase_seed(seed, 0))?;
    let sampled = sample_subgraph(inst, &profile, phase_seed(seed, 1));
    let sub = Instance::new(inst.graph, sampled.clone(), inst.weights.clone());
    let heavy = heavy_mis_approx(&sub, exec, phase_seed(seed, 2))?;
    stats.extend(&heavy.stats);
    Ok(SparseResult {
        members: heavy.members,
        sampled_max_degree: sub.max_degree(),
        sampled_weight: sub.weight_of(&sampled),
        sampled,
        stats,
        mis_valid: heavy.mis_valid,
    })
}

/// [`sparse_approx`] behind the common algorithm interface.
#[derive(Debug, Clone, Copy)]
pub struct SparseMis {
    pub lambda: f64,
    pub log_base: LogBase,
}

impl Default for SparseMis {
    fn default() -> Self {
        Self {
            lambda: 4.0,
            log_base: LogBase::Two,
        }
    }
}

impl MaxIsAlgorithm for SparseMis {
    fn name(&self) -> String {
        "sparse".into()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let r = sparse_approx(inst, self.lambda, self.log_base, exec, seed)?;
        Ok(AlgOutcome {
            members: r.members,
            stats: r.stats,
            mis_valid: r.mis_valid,
            stack_checks: Vec::new(),
        })
    }
}
