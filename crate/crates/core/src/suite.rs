//! Acceptance criteria and invariant checks, shared by `cmwis verify` and the
//! acceptance test target.

use std::time::Instant;

use serde::Serialize;

use crate::algorithm::{Error, Instance, MaxIsAlgorithm};
use crate::approx::{heavy_mis_approx, HeavyMis};
use crate::arb::arb_approx;
use crate::boost::{boost, covers_frames, phase_count, pop_sequential, reduce_weights, Boosted};
use crate::corpus::{connected_corpus, low_degeneracy_corpus, mixed_corpus, small_graph_corpus, Sample};
use crate::experiment::{self, default_spec, is_engine_violation, ExperimentRecord, GraphSpec, RunSpec};
use crate::graph::{self, brute_force_max_is, generate, Family, WeightModel, WeightedGraph};
use crate::lowerbound::{build_clique_cycle, rand_mis};
use crate::mis::{luby_mis, verify_mis};
use crate::parallel::{self, Schedule};
use crate::ranking::{boppana, find_perm_mismatch, ranking_regime_max_degree, strict_max_rule, BoppanaMis, RANKING_C};
use crate::rng::phase_seed;
use crate::simulator::ExecConfig;
use crate::sparsify::{compute_sampling_profile, sample_subgraph, LogBase, SparseMis};

/// Base seed of every suite run.
pub const SUITE_SEED: u64 = 0x00C0_FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub schedule: Schedule,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            schedule: Schedule::Parallel,
            seed: SUITE_SEED,
        }
    }
}

impl SuiteOptions {
    fn exec(&self) -> ExecConfig {
        ExecConfig::default().with_schedule(Schedule::Sequential)
    }

    fn seed(&self, salt: u64) -> u64 {
        phase_seed(self.seed, salt)
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub runs: usize,
    pub detail: String,
    pub engine_violations: usize,
    pub elapsed_secs: f64,
    pub budget_secs: f64,
}

impl CriterionReport {
    /// One human-readable line.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: {} ({} runs, {:.1}s of {:.0}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.runs,
            self.elapsed_secs,
            self.budget_secs
        )
    }
}

/// Result of a single run inside a criterion.
enum Run {
    Pass,
    Fail(String),
    /// Excluded by the criterion's own precondition.
    Skip,
    Error(Error),
}

#[derive(Default)]
struct Tally {
    runs: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    errors: usize,
    engine: usize,
    first: Option<String>,
}

impl Tally {
    fn add(&mut self, run: Run) {
        self.runs += 1;
        match run {
            Run::Pass => self.passed += 1,
            Run::Skip => self.skipped += 1,
            Run::Fail(msg) => {
                self.failed += 1;
                self.first.get_or_insert(msg);
            }
            Run::Error(e) => {
                self.errors += 1;
                if is_engine_violation(&e) {
                    self.engine += 1;
                }
                self.first.get_or_insert(e.to_string());
            }
        }
    }

    fn collect(runs: impl IntoIterator<Item = Run>) -> Self {
        let mut t = Self::default();
        for r in runs {
            t.add(r);
        }
        t
    }

    fn clean(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }

    fn summary(&self) -> String {
        let mut s = format!("{} passed, {} failed, {} errors", self.passed, self.failed, self.errors);
        if self.skipped > 0 {
            s += &format!(", {} excluded", self.skipped);
        }
        if let Some(first) = &self.first {
            s += &format!("; first problem: {first}");
        }
        s
    }
}

fn report(id: u8, title: &str, budget_secs: f64, start: Instant, tally: &Tally, ok: bool, extra: String) -> CriterionReport {
    let elapsed_secs = start.elapsed().as_secs_f64();
    let mut detail = tally.summary();
    if !extra.is_empty() {
        detail = format!("{extra}; {detail}");
    }
    CriterionReport {
        id,
        title: title.to_owned(),
        passed: ok && elapsed_secs <= budget_secs,
        runs: tally.runs,
        detail,
        engine_violations: tally.engine,
        elapsed_secs,
        budget_secs,
    }
}

fn attempt(f: impl FnOnce() -> Result<Run, Error>) -> Run {
    f().unwrap_or_else(Run::Error)
}

/// `num/den ≥ q` for a ratio expressed in quarters: `(4 + q)·a ≥ 4·b`.
fn quarters_ge(q: u128, a: u128, b: u128) -> bool {
    (4 + q) * a >= 4 * b
}

const EPS_QUARTERS: [(f64, u128); 3] = [(0.25, 1), (0.5, 2), (1.0, 4)];

/// `4(Δ+1)·w(I) ≥ w(V)` for the good-node algorithm.
pub fn criterion_1(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = mixed_corpus(1000, 1, 200, opts.seed(1));
    let exec = opts.exec();
    let runs = parallel::map(opts.schedule, &corpus, |s| {
        attempt(|| {
            let g = &s.graph;
            let r = heavy_mis_approx(&Instance::full(g), &exec, s.graph_seed)?;
            if !r.mis_valid {
                return Ok(Run::Skip);
            }
            let lhs = 4 * (g.max_degree() as u128 + 1) * u128::from(g.weight_of(&r.members));
            Ok(if g.is_independent(&r.members) && lhs >= u128::from(g.total_weight()) {
                Run::Pass
            } else {
                Run::Fail(format!("{:?} seed {}: 4(Δ+1)w(I) = {lhs} < w(V) = {}", s.family, s.graph_seed, g.total_weight()))
            })
        })
    });
    let t = Tally::collect(runs);
    report(1, "good-node fraction 4(Δ+1)·w(I) ≥ w(V)", 60.0, start, &t, t.clean(), String::new())
}

/// Stack property on boost and arb runs.
pub fn criterion_2(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = mixed_corpus(150, 2, 120, opts.seed(2));
    let exec = opts.exec();
    let algs = [
        default_spec("boost-heavy", Some(0.5), Some(8.0), None, None),
        default_spec("boost-sparse", Some(1.0), Some(8.0), None, None),
        default_spec("fastld", Some(1.0), Some(2.0), None, None),
        default_spec("arb", Some(0.5), None, None, None),
    ]
    .map(|a| a.expect("known algorithm").build());
    let jobs: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|i| (0..algs.len()).map(move |a| (i, a))).collect();
    let checks = std::sync::atomic::AtomicUsize::new(0);
    let runs = parallel::map(opts.schedule, &jobs, |&(i, a)| {
        attempt(|| {
            let s = &corpus[i];
            let out = algs[a].run(&Instance::full(&s.graph), &exec, phase_seed(s.graph_seed, a as u64))?;
            checks.fetch_add(out.stack_checks.len(), std::sync::atomic::Ordering::Relaxed);
            Ok(match out.stack_checks.iter().find(|c| !c.holds) {
                None if !out.stack_checks.is_empty() => Run::Pass,
                None => Run::Fail(format!("{} produced no stack check", algs[a].name())),
                Some(c) => Run::Fail(format!("{}: w(I) = {} < stack total {}", algs[a].name(), c.set_weight, c.stack_total)),
            })
        })
    });
    let t = Tally::collect(runs);
    let extra = format!("{} stack checks", checks.into_inner());
    report(2, "stack property w(I) ≥ Σ w_i(I_i)", 300.0, start, &t, t.clean(), extra)
}

/// Boost over the good-node algorithm against the exact optimum.
pub fn criterion_3(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = connected_corpus(500, 24, opts.seed(3));
    let exec = opts.exec();
    let runs: Vec<Vec<Run>> = parallel::map(opts.schedule, &corpus, |s| {
        let g = &s.graph;
        let opt = match brute_force_max_is(g) {
            Ok(best) => u128::from(best.weight),
            Err(e) => return vec![Run::Error(e.into())],
        };
        let delta = g.max_degree() as u128;
        EPS_QUARTERS
            .iter()
            .map(|&(eps, q)| {
                attempt(|| {
                    let r = boost(&Instance::full(g), &HeavyMis, eps, 8.0, &exec, phase_seed(s.graph_seed, q as u64))?;
                    let w = u128::from(g.weight_of(&r.members));
                    let ratio = quarters_ge(q, delta * w, opt);
                    let fraction = quarters_ge(q, (delta + 1) * w, u128::from(g.total_weight()));
                    Ok(if ratio && fraction && g.is_independent(&r.members) {
                        Run::Pass
                    } else {
                        Run::Fail(format!(
                            "{:?} seed {} ε={eps}: w(I)={w}, OPT={opt}, Δ={delta}, w(V)={}",
                            s.family,
                            s.graph_seed,
                            g.total_weight()
                        ))
                    })
                })
            })
            .collect()
    });
    let t = Tally::collect(runs.into_iter().flatten());
    let extra = format!("{} graphs", corpus.len());
    report(3, "boost ratio (1+ε)Δ·w(I) ≥ OPT and (1+ε)(Δ+1)·w(I) ≥ w(V)", 300.0, start, &t, t.clean(), extra)
}

/// Phase count and round bound of boost.
pub fn criterion_4(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = mixed_corpus(100, 2, 150, opts.seed(4));
    let exec = opts.exec();
    let heavy = HeavyMis;
    let sparse = SparseMis::default();
    let ranking = BoppanaMis::default();
    let configs: [(&dyn MaxIsAlgorithm, f64, f64); 5] = [
        (&heavy, 0.25, 8.0),
        (&heavy, 0.3, 2.5),
        (&sparse, 0.5, 8.0),
        (&ranking, 1.0, RANKING_C),
        (&ranking, 0.7, RANKING_C),
    ];
    let jobs: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|i| (0..configs.len()).map(move |k| (i, k))).collect();
    let runs = parallel::map(opts.schedule, &jobs, |&(i, k)| {
        attempt(|| {
            let (inner, eps, c) = configs[k];
            let s = &corpus[i];
            let r = boost(&Instance::full(&s.graph), inner, eps, c, &exec, phase_seed(s.graph_seed, k as u64))?;
            let t = phase_count(eps, c)?;
            let bound = t as u64 * (r.max_inner_rounds + 2);
            Ok(if r.phases == t && r.stack.len() == t && r.stats.rounds <= bound {
                Run::Pass
            } else {
                Run::Fail(format!(
                    "{} ε={eps} c={c}: {} phases (want {t}), {} rounds > {bound}",
                    inner.name(),
                    r.phases,
                    r.stats.rounds
                ))
            })
        })
    });
    let t = Tally::collect(runs);
    report(4, "boost rounds ≤ ⌈c/ε⌉(T+2), phases = ⌈c/ε⌉", 300.0, start, &t, t.clean(), String::new())
}

/// Sparsifier degree and weight statistics.
pub fn criterion_5(opts: &SuiteOptions) -> CriterionReport {
    const N: usize = 4096;
    const SEEDS: u64 = 50;
    let start = Instant::now();
    let exec = opts.exec();
    let log_n = (N as f64).log2();
    let seeds: Vec<u64> = (0..SEEDS).map(|i| opts.seed(500 + i)).collect();
    let stats = parallel::map(opts.schedule, &seeds, |&seed| -> Result<(usize, bool, bool), Error> {
        let g = generate(Family::Gnp { n: N, p: 0.04 }, WeightModel::HeavyTail { max: 1 << 20 }, seed)?;
        let inst = Instance::full(&g);
        let (profile, _) = compute_sampling_profile(&inst, 4.0, LogBase::Two, &exec, phase_seed(seed, 0))?;
        let sampled = sample_subgraph(&inst, &profile, phase_seed(seed, 1));
        let h = Instance::new(&g, sampled.clone(), inst.weights.clone());
        let delta_h = h.max_degree();
        let w_v = g.total_weight() as f64;
        let w_h = h.weight_of(&sampled) as f64;
        let delta = g.max_degree() as f64;
        let degree_ok = delta_h as f64 <= 10.0 * log_n;
        let weight_ok = w_h >= w_v.min(w_v * log_n / delta) / 8.0;
        Ok((g.max_degree(), degree_ok, weight_ok))
    });
    let mut t = Tally::default();
    let (mut degree_hits, mut weight_hits, mut max_delta, mut min_delta) = (0, 0, 0, usize::MAX);
    for s in stats {
        match s {
            Ok((delta, d, w)) => {
                degree_hits += usize::from(d);
                weight_hits += usize::from(w);
                max_delta = max_delta.max(delta);
                min_delta = min_delta.min(delta);
                t.add(if d && w { Run::Pass } else { Run::Fail("threshold missed".into()) });
            }
            Err(e) => t.add(Run::Error(e)),
        }
    }
    let need = (0.98 * SEEDS as f64).ceil() as usize;
    let ok = t.errors == 0 && degree_hits >= need && weight_hits >= need;
    let extra = format!("Δ ∈ [{min_delta}, {max_delta}], Δ_H bound met {degree_hits}/{SEEDS}, w(V_H) bound met {weight_hits}/{SEEDS}, need {need}");
    report(5, "sparsifier Δ_H ≤ 10 log n and w(V_H) bound", 120.0, start, &t, ok, extra)
}

/// Exhaustive permutation equivalence on small graphs.
pub fn criterion_6(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = small_graph_corpus(7, 200, opts.seed(6));
    let runs = parallel::map(opts.schedule, &corpus, |g| {
        attempt(|| {
            Ok(match find_perm_mismatch(g, Schedule::Sequential)? {
                None => Run::Pass,
                Some(perm) => Run::Fail(format!("n={} m={} mismatch at order {perm:?}", g.n(), g.m())),
            })
        })
    });
    let t = Tally::collect(runs);
    report(6, "sequential scan ≡ strict-max ranking over all orders", 120.0, start, &t, t.clean(), String::new())
}

/// Size of one ranking round in the low-degree regime.
pub fn criterion_7(opts: &SuiteOptions) -> CriterionReport {
    const N: usize = 4096;
    const RUNS: u64 = 300;
    let start = Instant::now();
    let exec = opts.exec();
    let cap = ranking_regime_max_degree(N, 0.01);
    let edge_p = 0.1 / (N - 1) as f64;
    let seeds: Vec<u64> = (0..RUNS).map(|i| opts.seed(700 + i)).collect();
    let runs = parallel::map(opts.schedule, &seeds, |&seed| {
        attempt(|| {
            let mut attempt_no = 0;
            let g = loop {
                let g = generate(Family::Gnp { n: N, p: edge_p }, WeightModel::Unit, phase_seed(seed, attempt_no))?;
                attempt_no += 1;
                if g.max_degree() <= cap {
                    break g;
                }
            };
            let all: Vec<usize> = (0..N).collect();
            let r = boppana(&g, &all, 2, &exec, seed)?;
            let lhs = 8 * (g.max_degree() + 1) * r.members.len();
            Ok(if g.is_independent(&r.members) && lhs >= N {
                Run::Pass
            } else {
                Run::Fail(format!("|I| = {} with Δ = {}", r.members.len(), g.max_degree()))
            })
        })
    });
    let t = Tally::collect(runs);
    let need = (0.99 * RUNS as f64).ceil() as usize;
    let ok = t.errors == 0 && t.passed >= need;
    let extra = format!("Δ ≤ {cap}, |I| ≥ n/(8(Δ+1)) in {}/{RUNS}, need {need}", t.passed);
    report(7, "one ranking round |I| ≥ n/(8(Δ+1))", 120.0, start, &t, ok, extra)
}

/// Arboricity algorithm against the exact optimum, plus halving.
pub fn criterion_8(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let corpus = low_degeneracy_corpus(300, 24, opts.seed(8));
    let exec = opts.exec();
    let indexed: Vec<(usize, &Sample)> = corpus.iter().enumerate().collect();
    let runs = parallel::map(opts.schedule, &indexed, |&(i, s)| {
        attempt(|| {
            let g = &s.graph;
            let (eps, q) = EPS_QUARTERS[i % EPS_QUARTERS.len()];
            let alpha = g.degeneracy().max(1);
            let inner = Boosted {
                inner: HeavyMis,
                eps,
                c: 8.0,
            };
            let r = arb_approx(&Instance::full(g), alpha, &inner, &exec, s.graph_seed)?;
            let opt = u128::from(brute_force_max_is(g)?.weight);
            let w = u128::from(g.weight_of(&r.members));
            let ratio = quarters_ge(q, 8 * alpha as u128 * w, opt);
            let stack = r.stack_check.holds && r.inner_checks.iter().all(|c| c.holds);
            Ok(if ratio && r.emptied() && r.halving_violations.is_empty() && stack {
                Run::Pass
            } else {
                Run::Fail(format!(
                    "{:?} seed {} α={alpha} ε={eps}: w(I)={w} OPT={opt} |V_i|={:?}",
                    s.family, s.graph_seed, r.active_sizes
                ))
            })
        })
    });
    let t = Tally::collect(runs);
    report(8, "arb 8(1+ε)α·w(I) ≥ OPT, halving, emptiness", 300.0, start, &t, t.clean(), String::new())
}

/// Reduction output is a maximal independent set of the cycle.
pub fn criterion_9(opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let exec = opts.exec();
    let jobs: Vec<(usize, usize, u64)> = [(32, 16), (64, 8)]
        .into_iter()
        .flat_map(|(n0, n1)| (0..50).map(move |k| (n0, n1, k)))
        .collect();
    let max_gap = std::sync::atomic::AtomicUsize::new(0);
    let runs = parallel::map(opts.schedule, &jobs, |&(n0, n1, k)| {
        let cycle = match generate(Family::Cycle { n: n0 }, WeightModel::Unit, 0) {
            Ok(c) => c,
            Err(e) => return Run::Error(e.into()),
        };
        match rand_mis(&cycle, &SparseMis::default(), n1, 8, &exec, opts.seed(900 + k)) {
            Ok(r) => {
                max_gap.fetch_max(r.gaps.max_gap, std::sync::atomic::Ordering::Relaxed);
                let all: Vec<usize> = (0..n0).collect();
                match verify_mis(&cycle, &all, &r.set.members) {
                    Ok(()) => Run::Pass,
                    Err(v) => Run::Fail(format!("({n0},{n1}) seed {k}: {v:?}")),
                }
            }
            Err(Error::InnerFailure { .. }) => Run::Skip,
            Err(e) => Run::Error(e),
        }
    });
    let t = Tally::collect(runs);
    let extra = format!("largest gap {}", max_gap.into_inner());
    report(9, "reduction yields an MIS of the cycle", 180.0, start, &t, t.clean(), extra)
}

/// Budget never exceeded in criteria 1–8, and bit-for-bit replay.
pub fn criterion_10(opts: &SuiteOptions, earlier: &[CriterionReport]) -> CriterionReport {
    let start = Instant::now();
    let engine: usize = earlier.iter().filter(|r| (1..=8).contains(&r.id)).map(|r| r.engine_violations).sum();
    let covered = earlier.iter().filter(|r| (1..=8).contains(&r.id)).count();
    let names = ["luby", "heavy", "sparse", "boost-heavy", "boost-sparse", "arb", "boppana", "fastld"];
    let graphs = [
        (Family::Gnp { n: 60, p: 0.1 }, WeightModel::HeavyTail { max: 1000 }),
        (Family::Tree { n: 18 }, WeightModel::UniformRange { lo: 1, hi: 50 }),
        (Family::CycleOfCliques { n0: 5, n1: 3 }, WeightModel::Unit),
    ];
    let mut jobs = Vec::new();
    for (gi, &(family, weights)) in graphs.iter().enumerate() {
        for name in names {
            for k in 0..3 {
                jobs.push(RunSpec {
                    graph: GraphSpec::Generated {
                        family,
                        weights,
                        graph_seed: opts.seed(1000 + gi as u64),
                    },
                    algorithm: default_spec(name, None, None, None, None).expect("known algorithm"),
                    exec: opts.exec(),
                    seed: opts.seed(1100 + k),
                    oracle: true,
                });
            }
        }
    }
    let runs = parallel::map(opts.schedule, &jobs, |spec| {
        attempt(|| {
            let rec = experiment::execute(spec)?;
            let line = serde_json::to_string(&rec).map_err(|e| Error::Invariant(e.to_string()))?;
            let parsed: ExperimentRecord = serde_json::from_str(&line).map_err(|e| Error::Invariant(e.to_string()))?;
            let again = experiment::replay(&parsed)?;
            let parallel_spec = RunSpec {
                exec: spec.exec.with_schedule(Schedule::Parallel),
                ..spec.clone()
            };
            let par = experiment::execute(&parallel_spec)?;
            let within = rec.max_message_bits <= rec.budget_bits;
            Ok(
                if parsed == rec && again.same_outcome(&rec) && par.same_outcome_across_schedules(&rec) && within {
                    Run::Pass
                } else {
                    Run::Fail(format!("{} on {:?}: replay or schedule mismatch", rec.algorithm.name(), spec.graph))
                },
            )
        })
    });
    let t = Tally::collect(runs);
    let ok = t.clean() && engine == 0 && covered == 8;
    let extra = format!("{engine} budget violations in criteria 1–8 ({covered} reported)");
    report(10, "engine contracts and deterministic replay", 300.0, start, &t, ok, extra)
}

/// All acceptance criteria in order.
pub fn run_acceptance(opts: &SuiteOptions, mut on_report: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    let criteria: [fn(&SuiteOptions) -> CriterionReport; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut reports = Vec::with_capacity(10);
    for c in criteria {
        let r = c(opts);
        on_report(&r);
        reports.push(r);
    }
    let last = criterion_10(opts, &reports);
    on_report(&last);
    reports.push(last);
    reports
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn invariant(name: &str, result: Result<String, String>) -> InvariantReport {
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    InvariantReport {
        name: name.to_owned(),
        passed,
        detail,
    }
}

fn check_all<T>(items: &[T], f: impl Fn(&T) -> Result<(), String>) -> Result<String, String> {
    for item in items {
        f(item)?;
    }
    Ok(format!("{} cases", items.len()))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Structural invariants of a single graph.
pub fn graph_invariants(g: &WeightedGraph) -> Result<(), String> {
    let mut ids: Vec<u64> = g.ids().to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != g.n() {
        return Err("duplicate identifiers".into());
    }
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        if nbrs.contains(&v) {
            return Err(format!("self-loop at {}", g.id(v)));
        }
        if nbrs.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("duplicate edge at {}", g.id(v)));
        }
        if let Some(&u) = nbrs.iter().find(|&&u| !g.neighbors(u).contains(&v)) {
            return Err(format!("asymmetric edge {} -> {}", g.id(v), g.id(u)));
        }
    }
    Ok(())
}

/// Deterministic invariant checks across all modules.
pub fn run_invariants(opts: &SuiteOptions) -> Vec<InvariantReport> {
    let exec = opts.exec();
    let mixed = mixed_corpus(60, 1, 60, opts.seed(20));
    let small = connected_corpus(40, 16, opts.seed(21));
    let mut out = Vec::new();

    out.push(invariant(
        "graph: symmetric adjacency, distinct ids, text round trip",
        check_all(&mixed, |s| {
            graph_invariants(&s.graph)?;
            let back = graph::load(&graph::save(&s.graph)).map_err(err)?;
            (back == s.graph).then_some(()).ok_or_else(|| "save/load mismatch".into())
        }),
    ));

    out.push(invariant(
        "oracle dominates every algorithm",
        check_all(&small, |s| {
            let opt = brute_force_max_is(&s.graph).map_err(err)?.weight;
            for name in ["luby", "heavy", "sparse", "boost-heavy", "boost-sparse", "arb", "boppana", "fastld"] {
                let alg = default_spec(name, None, None, None, None).expect("known algorithm").build();
                let out = alg.run(&Instance::full(&s.graph), &exec, s.graph_seed).map_err(err)?;
                let w = s.graph.weight_of(&out.members);
                if w > opt || !s.graph.is_independent(&out.members) {
                    return Err(format!("{name}: w(I) = {w} > OPT = {opt} or dependent output"));
                }
            }
            Ok(())
        }),
    ));

    out.push(invariant(
        "luby returns a maximal independent set",
        check_all(&mixed, |s| {
            let all: Vec<usize> = (0..s.graph.n()).collect();
            let (members, _) = luby_mis(&s.graph, &all, &exec, s.graph_seed).map_err(err)?;
            verify_mis(&s.graph, &all, &members).map_err(|v| format!("{v:?}"))
        }),
    ));

    out.push(invariant(
        "residual reduction equals the closed-neighbourhood form",
        check_all(&mixed, |s| {
            let g = &s.graph;
            let w: Vec<i64> = g.weights().iter().map(|&x| x as i64).collect();
            let all: Vec<usize> = (0..g.n()).collect();
            let (set, _) = luby_mis(g, &all, &exec, s.graph_seed).map_err(err)?;
            let mut in_set = vec![false; g.n()];
            for &v in &set {
                in_set[v] = true;
            }
            let reduced = reduce_weights(g, &w, &set).map_err(|v| format!("overflow at {v}"))?;
            for v in 0..g.n() {
                let hit: i64 = std::iter::once(v).chain(g.neighbors(v).iter().copied()).filter(|&u| in_set[u]).map(|u| w[u]).sum();
                if reduced[v] != w[v] - hit {
                    return Err(format!("node {}: {} != {}", g.id(v), reduced[v], w[v] - hit));
                }
            }
            Ok(())
        }),
    ));

    out.push(invariant(
        "boost pop stage covers every frame and matches the sequential pop",
        check_all(&mixed, |s| {
            let g = &s.graph;
            let r = boost(&Instance::full(g), &HeavyMis, 1.0, 8.0, &exec, s.graph_seed).map_err(err)?;
            if let Some(id) = covers_frames(g, &r.members, &r.stack) {
                return Err(format!("pushed node {id} uncovered"));
            }
            if r.members != pop_sequential(g, &r.stack) {
                return Err("distributed and sequential pop differ".into());
            }
            if r.stack.frames().iter().any(|f| f.residuals.iter().any(|&x| x <= 0)) {
                return Err("non-positive residual pushed".into());
            }
            r.stack_check.holds.then_some(()).ok_or_else(|| "stack property".into())
        }),
    ));

    out.push(invariant(
        "ranking output obeys the strict-max rule",
        check_all(&mixed, |s| {
            let all: Vec<usize> = (0..s.graph.n()).collect();
            let r = boppana(&s.graph, &all, 2, &exec, s.graph_seed).map_err(err)?;
            (r.members == strict_max_rule(&s.graph, &all, &r.ranks) && s.graph.is_independent(&r.members))
                .then_some(())
                .ok_or_else(|| "strict-max mismatch".into())
        }),
    ));

    out.push(invariant(
        "ranking equivalence on graphs with n ≤ 6",
        check_all(&small_graph_corpus(6, 30, opts.seed(22)), |g| match find_perm_mismatch(g, Schedule::Sequential) {
            Ok(None) => Ok(()),
            Ok(Some(p)) => Err(format!("mismatch at {p:?}")),
            Err(e) => Err(e.to_string()),
        }),
    ));

    out.push(invariant(
        "arb empties the graph and halves V_i",
        check_all(&low_degeneracy_corpus(40, 40, opts.seed(23)), |s| {
            let g = &s.graph;
            let r = arb_approx(&Instance::full(g), g.degeneracy().max(1), &HeavyMis, &exec, s.graph_seed).map_err(err)?;
            (r.emptied() && r.halving_violations.is_empty() && r.stack_check.holds)
                .then_some(())
                .ok_or_else(|| format!("|V_i| = {:?}", r.active_sizes))
        }),
    ));

    out.push(invariant(
        "clique cycle degrees are 3n₁ − 1",
        check_all(&[(3, 1), (4, 3), (7, 5), (10, 2)], |&(n0, n1)| {
            let g = build_clique_cycle(n0, n1).map_err(err)?;
            graph_invariants(&g)?;
            (0..g.n())
                .all(|v| g.degree(v) == 3 * n1 - 1)
                .then_some(())
                .ok_or_else(|| format!("({n0},{n1})"))
        }),
    ));

    out.push(invariant(
        "reduction output is maximal on the cycle",
        check_all(&[(8, 3), (12, 4), (20, 2)], |&(n0, n1)| {
            let cycle = generate(Family::Cycle { n: n0 }, WeightModel::Unit, 0).map_err(err)?;
            let r = rand_mis(&cycle, &HeavyMis, n1, 4, &exec, opts.seed(24)).map_err(err)?;
            let all: Vec<usize> = (0..n0).collect();
            verify_mis(&cycle, &all, &r.set.members).map_err(|v| format!("{v:?}"))
        }),
    ));

    out.push(invariant(
        "runs are deterministic and schedule independent",
        check_all(&mixed[..10], |s| {
            let spec = RunSpec {
                graph: GraphSpec::Generated {
                    family: s.family,
                    weights: s.weights,
                    graph_seed: s.graph_seed,
                },
                algorithm: default_spec("boost-sparse", None, None, None, None).expect("known algorithm"),
                exec,
                seed: s.graph_seed,
                oracle: false,
            };
            let a = experiment::execute(&spec).map_err(err)?;
            let b = experiment::execute(&RunSpec {
                exec: exec.with_schedule(Schedule::Parallel),
                ..spec.clone()
            })
            .map_err(err)?;
            a.same_outcome_across_schedules(&b).then_some(()).ok_or_else(|| "outcome differs".into())
        }),
    ));

    out
}
