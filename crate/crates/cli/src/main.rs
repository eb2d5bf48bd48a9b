use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use congest_mwis::algorithm::Error;
use congest_mwis::experiment::{self, default_spec, is_engine_violation, ExperimentRecord, GraphSpec, RunSpec};
use congest_mwis::graph::{self, Family, WeightModel, WeightedGraph};
use congest_mwis::lowerbound::rand_mis;
use congest_mwis::parallel::{self, Schedule};
use congest_mwis::simulator::{ExecConfig, Mode};
use congest_mwis::suite::{self, graph_invariants, SuiteOptions};

const USAGE: u8 = 2;
const INVARIANT: u8 = 3;
const ENGINE: u8 = 4;

#[derive(Parser)]
#[command(name = "cmwis", version, about = "Distributed MaxIS algorithms on a round-synchronous simulator")]
struct Cli {
    /// Default seed for every subcommand.
    #[arg(long, env = "CMWIS_SEED", default_value_t = 1, global = true)]
    seed: u64,
    /// Run independent work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it in the text format.
    Gen {
        #[command(flatten)]
        graph: GenArgs,
        /// Output file (stdout if absent).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run an algorithm over a list of seeds and emit JSON Lines records.
    Run(Box<RunArgs>),
    /// Run the invariant or acceptance suite.
    Verify {
        suite: SuiteName,
        /// Also check the structural invariants of this graph file.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Cycle-to-clique-cycle reduction with gap statistics.
    Reduce {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value = "sparse")]
        alg: String,
        /// Size constant of the inner algorithm.
        #[arg(long, default_value_t = 8)]
        approx_c: u64,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Invariants,
    Acceptance,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Cycle,
    Path,
    Clique,
    Star,
    Gnp,
    CycleOfCliques,
    Tree,
    Degenerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightName {
    Unit,
    UniformRange,
    HeavyTail,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability for `gnp`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    /// Back-degree bound for `degenerate`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "unit")]
    weights: WeightName,
    #[arg(long, default_value_t = 1)]
    lo: u64,
    #[arg(long, default_value_t = 100)]
    hi: u64,
    /// Cap of the heavy-tail model.
    #[arg(long, default_value_t = 1 << 20)]
    max_weight: u64,
    /// Graph seed (defaults to the global seed).
    #[arg(long)]
    graph_seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Graph file; otherwise the generator flags are used.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long)]
    alg: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Arboricity bound, or `degeneracy`.
    #[arg(long)]
    alpha: Option<String>,
    /// Algorithm seeds (defaults to the global seed).
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    local: bool,
    #[arg(long, default_value_t = 32)]
    c_msg: u64,
    #[arg(long)]
    n_upper: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write a CSV projection of the records.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the outermost phase stack of each run to `<dir>/stack-<seed>.json`.
    #[arg(long)]
    dump_stack: Option<PathBuf>,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            err: anyhow::anyhow!(msg.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Self { code: 1, err }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Self { code: 1, err: err.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if is_engine_violation(e) => ENGINE,
            Error::InvalidParameter(_) => USAGE,
            _ => INVARIANT,
        };
        Self { code, err: e.into() }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn family(args: &GenArgs) -> Result<Family, Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Failure::usage(format!("--{flag} is required for this family")));
    let name = args.family.ok_or_else(|| Failure::usage("either --graph or --family is required"))?;
    Ok(match name {
        FamilyName::Cycle => Family::Cycle { n: need(args.n, "n")? },
        FamilyName::Path => Family::Path { n: need(args.n, "n")? },
        FamilyName::Clique => Family::Clique { n: need(args.n, "n")? },
        FamilyName::Star => Family::Star { n: need(args.n, "n")? },
        FamilyName::Tree => Family::Tree { n: need(args.n, "n")? },
        FamilyName::Gnp => Family::Gnp {
            n: need(args.n, "n")?,
            p: args.p.ok_or_else(|| Failure::usage("--p is required for gnp"))?,
        },
        FamilyName::CycleOfCliques => Family::CycleOfCliques {
            n0: need(args.n0, "n0")?,
            n1: need(args.n1, "n1")?,
        },
        FamilyName::Degenerate => Family::Degenerate {
            n: need(args.n, "n")?,
            k: need(args.k, "k")?,
        },
    })
}

fn weight_model(args: &GenArgs) -> WeightModel {
    match args.weights {
        WeightName::Unit => WeightModel::Unit,
        WeightName::UniformRange => WeightModel::UniformRange { lo: args.lo, hi: args.hi },
        WeightName::HeavyTail => WeightModel::HeavyTail { max: args.max_weight },
    }
}

fn graph_spec(args: &GenArgs, seed: u64) -> Result<GraphSpec, Failure> {
    Ok(GraphSpec::Generated {
        family: family(args)?,
        weights: weight_model(args),
        graph_seed: args.graph_seed.unwrap_or(seed),
    })
}

fn load_graph(spec: &GraphSpec) -> Result<WeightedGraph, Failure> {
    spec.load().map_err(|e| match e {
        graph::GraphError::InvalidParameters(_) => Failure::usage(e.to_string()),
        e => Failure {
            code: INVARIANT,
            err: e.into(),
        },
    })
}

fn cmd_gen(args: &GenArgs, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let g = load_graph(&graph_spec(args, seed)?)?;
    let mut w = output(out)?;
    w.write_all(graph::save(&g).as_bytes())?;
    w.flush()?;
    Ok(())
}

fn parse_alpha(alg: &str, alpha: Option<&str>) -> Result<Option<usize>, Failure> {
    match (alg, alpha) {
        ("arb", None) => Err(Failure::usage("arb needs --alpha <bound> or --alpha degeneracy")),
        ("arb", Some("degeneracy")) => {
            eprintln!("warning: using the degeneracy as α; it can exceed the arboricity by up to a factor of 2");
            Ok(None)
        }
        ("arb", Some(a)) => match a.parse::<usize>() {
            Ok(a) if a >= 1 => Ok(Some(a)),
            _ => Err(Failure::usage(format!("--alpha must be a positive integer or `degeneracy`, got {a}"))),
        },
        (_, Some(_)) => Err(Failure::usage("--alpha only applies to arb")),
        (_, None) => Ok(None),
    }
}

const CSV_HEADER: &str = "algorithm,seed,n,m,max_degree,degeneracy,total_weight,weight,size,opt,opt_ratio,within_guarantee,mis_valid,stack_ok,rounds,messages,max_message_bits,budget_bits,wall_ms";

fn csv_row(r: &ExperimentRecord) -> String {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|v| v.to_string()).unwrap_or_default()
    }
    let ratios = r.ratios.as_ref();
    [
        r.algorithm.name().to_owned(),
        r.seed.to_string(),
        r.n.to_string(),
        r.m.to_string(),
        r.max_degree.to_string(),
        r.degeneracy.to_string(),
        r.total_weight.to_string(),
        r.weight.to_string(),
        r.size.to_string(),
        opt(r.opt),
        opt(ratios.and_then(|x| x.opt_ratio)),
        opt(ratios.and_then(|x| x.within_guarantee)),
        r.mis_valid.to_string(),
        opt(r.stack_ok),
        r.rounds.to_string(),
        r.messages.to_string(),
        r.max_message_bits.to_string(),
        r.budget_bits.to_string(),
        format!("{:.3}", r.wall_ms),
    ]
    .join(",")
}

fn cmd_run(args: &RunArgs, seed: u64, schedule: Schedule) -> Result<(), Failure> {
    let alpha = parse_alpha(&args.alg, args.alpha.as_deref())?;
    let needs_eps = matches!(args.alg.as_str(), "boost-heavy" | "boost-sparse" | "arb" | "fastld");
    if needs_eps && args.eps.is_none() {
        return Err(Failure::usage(format!("{} needs --eps", args.alg)));
    }
    let algorithm = default_spec(&args.alg, args.eps, args.c, args.lambda, alpha)
        .ok_or_else(|| Failure::usage(format!("unknown algorithm {}", args.alg)))?;
    let graph = match &args.graph {
        Some(path) => GraphSpec::File {
            path: std::fs::canonicalize(path).unwrap_or_else(|_| path.clone()).to_string_lossy().into_owned(),
        },
        None => graph_spec(&args.gen, seed)?,
    };
    let g = load_graph(&graph)?;
    let exec = ExecConfig {
        mode: if args.local { Mode::Local } else { Mode::Congest },
        c_msg: args.c_msg,
        n_upper: args.n_upper,
        ..ExecConfig::default()
    };
    let seeds = if args.seeds.is_empty() { vec![seed] } else { args.seeds.clone() };
    let specs: Vec<RunSpec> = seeds
        .iter()
        .map(|&seed| RunSpec {
            graph: graph.clone(),
            algorithm,
            exec,
            seed,
            oracle: args.oracle,
        })
        .collect();
    // Records come back in seed order regardless of the schedule.
    let results = parallel::map(schedule, &specs, |spec| experiment::run_on(&g, spec).map(|(r, _)| r));

    let mut out = output(args.out.as_deref())?;
    let mut csv = args.csv.as_deref().map(|p| output(Some(p))).transpose()?;
    if let Some(csv) = csv.as_mut() {
        writeln!(csv, "{CSV_HEADER}")?;
    }
    let mut first_error = None;
    for (spec, result) in specs.iter().zip(results) {
        match result {
            Ok(record) => {
                writeln!(out, "{}", serde_json::to_string(&record).context("serialising record")?)?;
                if let Some(csv) = csv.as_mut() {
                    writeln!(csv, "{}", csv_row(&record))?;
                }
                if let Some(dir) = &args.dump_stack {
                    if let Some(stack) = algorithm.phase_stack(&g, &exec, spec.seed)? {
                        std::fs::create_dir_all(dir)?;
                        let path = dir.join(format!("stack-{}.json", spec.seed));
                        std::fs::write(&path, serde_json::to_string_pretty(&stack.to_json(&g)).context("serialising stack")?)?;
                    }
                }
            }
            Err(e) => {
                eprintln!("seed {}: {e}", spec.seed);
                first_error.get_or_insert(e);
            }
        }
    }
    out.flush()?;
    if let Some(mut csv) = csv {
        csv.flush()?;
    }
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_verify(which: SuiteName, graph_file: Option<&Path>, out: Option<&Path>, opts: &SuiteOptions) -> Result<(), Failure> {
    let mut w = output(out)?;
    let mut failed = false;
    let mut engine = false;
    if let Some(path) = graph_file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let check = graph::load(&text).map_err(|e| e.to_string()).and_then(|g| graph_invariants(&g));
        let passed = check.is_ok();
        let line = serde_json::json!({
            "name": "graph file invariants",
            "path": path.display().to_string(),
            "passed": passed,
            "detail": check.err().unwrap_or_default(),
        });
        writeln!(w, "{line}")?;
        failed |= !passed;
    }
    match which {
        SuiteName::Invariants => {
            for r in suite::run_invariants(opts) {
                writeln!(w, "{}", serde_json::to_string(&r).context("serialising report")?)?;
                eprintln!("[{}] {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
                failed |= !r.passed;
            }
        }
        SuiteName::Acceptance => {
            let reports = suite::run_acceptance(opts, |r| eprintln!("{}", r.line()));
            for r in &reports {
                writeln!(w, "{}", serde_json::to_string(r).context("serialising report")?)?;
                failed |= !r.passed;
                engine |= r.engine_violations > 0;
            }
        }
    }
    w.flush()?;
    if engine {
        Err(Failure {
            code: ENGINE,
            err: anyhow::anyhow!("engine contract violated"),
        })
    } else if failed {
        Err(Failure {
            code: INVARIANT,
            err: anyhow::anyhow!("verification failed"),
        })
    } else {
        Ok(())
    }
}

fn cmd_reduce(n0: usize, n1: usize, alg: &str, approx_c: u64, seeds: &[u64], out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let spec = default_spec(alg, None, None, None, None).ok_or_else(|| Failure::usage(format!("unknown algorithm {alg}")))?;
    let cycle = graph::generate(Family::Cycle { n: n0 }, WeightModel::Unit, 0).map_err(|e| Failure::usage(e.to_string()))?;
    let inner = spec.build();
    let seeds = if seeds.is_empty() { vec![seed] } else { seeds.to_vec() };
    let mut w = output(out)?;
    for s in seeds {
        let r = rand_mis(&cycle, &inner, n1, approx_c, &ExecConfig::default(), s)?;
        let line = serde_json::json!({ "algorithm": alg, "seed": s, "gaps": r.gaps });
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let schedule = if cli.sequential { Schedule::Sequential } else { Schedule::Parallel };
    let result = match &cli.command {
        Command::Gen { graph, out } => cmd_gen(graph, out.as_deref(), cli.seed),
        Command::Run(args) => cmd_run(args, cli.seed, schedule),
        Command::Verify { suite, graph, out } => cmd_verify(
            *suite,
            graph.as_deref(),
            out.as_deref(),
            &SuiteOptions {
                schedule,
                seed: SuiteOptions::default().seed,
            },
        ),
        Command::Reduce {
            n0,
            n1,
            alg,
            approx_c,
            seeds,
            out,
        } => cmd_reduce(*n0, *n1, alg, *approx_c, seeds, out.as_deref(), cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
