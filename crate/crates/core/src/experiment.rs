//! Self-describing experiment records and their replay.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::approx::HeavyMis;
use crate::arb::{arb_approx, Arb};
use crate::boost::{boost, Boosted, PhaseStack};
use crate::graph::{self, brute_force_max_is_with_cap, Family, GraphError, WeightModel, WeightedGraph, DEFAULT_ORACLE_CAP};
use crate::mis::LubyAlgorithm;
use crate::ranking::{BoppanaMis, RANKING_C};
use crate::rng::mix;
use crate::simulator::{ExecConfig, SimError};
use crate::sparsify::{LogBase, SparseMis};

/// Algorithm together with every parameter that affects its output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Luby,
    Heavy,
    Sparse { lambda: f64, log_base: LogBase },
    BoostHeavy { eps: f64, c: f64 },
    BoostSparse { eps: f64, c: f64, lambda: f64, log_base: LogBase },
    /// `alpha = None` uses the degeneracy.
    Arb { eps: f64, alpha: Option<usize> },
    Boppana { c: u32 },
    Fastld { eps: f64, c: u32 },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Luby => "luby",
            AlgorithmSpec::Heavy => "heavy",
            AlgorithmSpec::Sparse { .. } => "sparse",
            AlgorithmSpec::BoostHeavy { .. } => "boost-heavy",
            AlgorithmSpec::BoostSparse { .. } => "boost-sparse",
            AlgorithmSpec::Arb { .. } => "arb",
            AlgorithmSpec::Boppana { .. } => "boppana",
            AlgorithmSpec::Fastld { .. } => "fastld",
        }
    }

    pub fn build(&self) -> Box<dyn MaxIsAlgorithm> {
        match *self {
            AlgorithmSpec::Luby => Box::new(LubyAlgorithm),
            AlgorithmSpec::Heavy => Box::new(HeavyMis),
            AlgorithmSpec::Sparse { lambda, log_base } => Box::new(SparseMis { lambda, log_base }),
            AlgorithmSpec::BoostHeavy { eps, c } => Box::new(Boosted { inner: HeavyMis, eps, c }),
            AlgorithmSpec::BoostSparse { eps, c, lambda, log_base } => Box::new(Boosted {
                inner: SparseMis { lambda, log_base },
                eps,
                c,
            }),
            AlgorithmSpec::Arb { eps, alpha } => Box::new(Arb::new(alpha, eps)),
            AlgorithmSpec::Boppana { c } => Box::new(BoppanaMis { c }),
            AlgorithmSpec::Fastld { eps, c } => Box::new(Boosted {
                inner: BoppanaMis { c },
                eps,
                c: RANKING_C,
            }),
        }
    }

    /// Approximation factor `r` with `r·w(I) ≥ OPT` guaranteed on `g`, if any.
    pub fn guarantee(&self, g: &WeightedGraph) -> Option<f64> {
        let delta = g.max_degree().max(1) as f64;
        match *self {
            AlgorithmSpec::Heavy => Some(4.0 * (g.max_degree() as f64 + 1.0)),
            AlgorithmSpec::BoostHeavy { eps, .. } | AlgorithmSpec::BoostSparse { eps, .. } => Some((1.0 + eps) * delta),
            AlgorithmSpec::Arb { eps, alpha } => {
                let alpha = alpha.unwrap_or_else(|| g.degeneracy()).max(1) as f64;
                Some(8.0 * (1.0 + eps) * alpha)
            }
            _ => None,
        }
    }
}

impl AlgorithmSpec {
    /// Outermost local-ratio stack of a run, for algorithms that build one.
    /// Reruns the algorithm with the same seed, so it matches [`run_on`].
    pub fn phase_stack(&self, g: &WeightedGraph, exec: &ExecConfig, seed: u64) -> Result<Option<PhaseStack>, Error> {
        let inst = Instance::full(g);
        Ok(Some(match *self {
            AlgorithmSpec::BoostHeavy { eps, c } => boost(&inst, &HeavyMis, eps, c, exec, seed)?.stack,
            AlgorithmSpec::BoostSparse { eps, c, lambda, log_base } => {
                boost(&inst, &SparseMis { lambda, log_base }, eps, c, exec, seed)?.stack
            }
            AlgorithmSpec::Fastld { eps, c } => boost(&inst, &BoppanaMis { c }, eps, RANKING_C, exec, seed)?.stack,
            AlgorithmSpec::Arb { eps, alpha } => {
                let arb = Arb::new(alpha, eps);
                arb_approx(&inst, arb.alpha_for(g), &arb.inner, exec, seed)?.stack
            }
            _ => return Ok(None),
        }))
    }
}

/// Where the input graph came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSpec {
    Generated {
        #[serde(flatten)]
        family: Family,
        weights: WeightModel,
        graph_seed: u64,
    },
    File { path: String },
}

impl GraphSpec {
    pub fn load(&self) -> Result<WeightedGraph, GraphError> {
        match self {
            GraphSpec::Generated {
                family,
                weights,
                graph_seed,
            } => graph::generate(*family, *weights, *graph_seed),
            GraphSpec::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| GraphError::Parse {
                    line: 0,
                    msg: format!("{path}: {e}"),
                })?;
                graph::load(&text)
            }
        }
    }
}

/// Comparison with the exact optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    /// `OPT / w(I)`; absent when `w(I) = 0 < OPT`.
    pub opt_ratio: Option<f64>,
    /// Guaranteed factor, if the algorithm has one.
    pub guarantee: Option<f64>,
    /// `guarantee · w(I) ≥ OPT`, if there is a guarantee.
    pub within_guarantee: Option<bool>,
}

/// One observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub graph: GraphSpec,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub degeneracy: usize,
    pub total_weight: u64,
    pub algorithm: AlgorithmSpec,
    pub exec: ExecConfig,
    pub seed: u64,
    pub weight: u64,
    pub size: usize,
    /// Hash of the sorted member identifiers.
    pub members_hash: String,
    pub mis_valid: bool,
    /// All stack checks of the run passed (absent without local-ratio stack).
    pub stack_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub opt: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratios: Option<Ratios>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_refused: Option<String>,
    pub rounds: u64,
    pub messages: u64,
    pub max_message_bits: u64,
    pub budget_bits: u64,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    /// Equal in everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let strip = |r: &Self| Self { wall_ms: 0.0, ..r.clone() };
        strip(self) == strip(other)
    }

    /// [`Self::same_outcome`] ignoring the execution schedule as well.
    pub fn same_outcome_across_schedules(&self, other: &Self) -> bool {
        let mut other = other.clone();
        other.exec.schedule = self.exec.schedule;
        self.same_outcome(&other)
    }
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub graph: GraphSpec,
    pub algorithm: AlgorithmSpec,
    pub exec: ExecConfig,
    pub seed: u64,
    pub oracle: bool,
}

fn members_hash(g: &WeightedGraph, members: &[usize]) -> String {
    let mut ids: Vec<u64> = members.iter().map(|&v| g.id(v)).collect();
    ids.sort_unstable();
    ids.push(ids.len() as u64);
    format!("{:016x}", mix(&ids))
}

/// Runs `spec.algorithm` on an already loaded graph.
pub fn run_on(g: &WeightedGraph, spec: &RunSpec) -> Result<(ExperimentRecord, AlgOutcome), Error> {
    let alg = spec.algorithm.build();
    let start = Instant::now();
    let out = alg.run(&Instance::full(g), &spec.exec, spec.seed)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some((a, b)) = g.find_conflict(&out.members) {
        return Err(Error::Invariant(format!("output contains adjacent nodes {} and {}", g.id(a), g.id(b))));
    }
    let weight = g.weight_of(&out.members);

    let (mut opt, mut ratios, mut oracle_refused) = (None, None, None);
    if spec.oracle {
        match brute_force_max_is_with_cap(g, DEFAULT_ORACLE_CAP) {
            Ok(best) => {
                let guarantee = spec.algorithm.guarantee(g);
                opt = Some(best.weight);
                ratios = Some(Ratios {
                    opt_ratio: match (weight, best.weight) {
                        (0, 0) => Some(1.0),
                        (0, _) => None,
                        (w, o) => Some(o as f64 / w as f64),
                    },
                    guarantee,
                    within_guarantee: guarantee.map(|r| r * weight as f64 >= best.weight as f64),
                });
            }
            Err(e) => oracle_refused = Some(e.to_string()),
        }
    }

    let record = ExperimentRecord {
        graph: spec.graph.clone(),
        n: g.n(),
        m: g.m(),
        max_degree: g.max_degree(),
        degeneracy: g.degeneracy(),
        total_weight: g.total_weight(),
        algorithm: spec.algorithm,
        exec: spec.exec,
        seed: spec.seed,
        weight,
        size: out.members.len(),
        members_hash: members_hash(g, &out.members),
        mis_valid: out.mis_valid,
        stack_ok: (!out.stack_checks.is_empty()).then(|| out.stack_checks.iter().all(|c| c.holds)),
        opt,
        ratios,
        oracle_refused,
        rounds: out.stats.rounds,
        messages: out.stats.messages_sent,
        max_message_bits: out.stats.max_message_bits,
        budget_bits: spec.exec.budget_bits(spec.exec.n_upper_for(g)),
        wall_ms,
    };
    Ok((record, out))
}

/// Loads the graph and runs.
pub fn execute(spec: &RunSpec) -> Result<ExperimentRecord, Error> {
    let g = spec.graph.load()?;
    Ok(run_on(&g, spec)?.0)
}

/// Reruns the experiment a record describes.
pub fn replay(record: &ExperimentRecord) -> Result<ExperimentRecord, Error> {
    execute(&RunSpec {
        graph: record.graph.clone(),
        algorithm: record.algorithm,
        exec: record.exec,
        seed: record.seed,
        oracle: record.opt.is_some() || record.oracle_refused.is_some(),
    })
}

/// Whether an error is a violation of the engine contract (as opposed to an
/// algorithmic or parameter error).
pub fn is_engine_violation(e: &Error) -> bool {
    matches!(e, Error::Sim(SimError::Budget { .. } | SimError::NotANeighbor { .. } | SimError::Timeout { .. }))
}

/// Default algorithm parameters used by the CLI and the suites.
pub fn default_spec(name: &str, eps: Option<f64>, c: Option<f64>, lambda: Option<f64>, alpha: Option<usize>) -> Option<AlgorithmSpec> {
    let eps = eps.unwrap_or(0.5);
    let lambda = lambda.unwrap_or(4.0);
    Some(match name {
        "luby" => AlgorithmSpec::Luby,
        "heavy" => AlgorithmSpec::Heavy,
        "sparse" => AlgorithmSpec::Sparse {
            lambda,
            log_base: LogBase::Two,
        },
        "boost-heavy" => AlgorithmSpec::BoostHeavy { eps, c: c.unwrap_or(8.0) },
        "boost-sparse" => AlgorithmSpec::BoostSparse {
            eps,
            c: c.unwrap_or(8.0),
            lambda,
            log_base: LogBase::Two,
        },
        "arb" => AlgorithmSpec::Arb { eps, alpha },
        "boppana" => AlgorithmSpec::Boppana {
            c: c.map_or(2, |c| c as u32),
        },
        "fastld" => AlgorithmSpec::Fastld {
            eps,
            c: c.map_or(2, |c| c as u32),
        },
        _ => return None,
    })
}
