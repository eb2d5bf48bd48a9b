//! End-to-end runs of the algorithm pipelines at moderate scale.

use congest_mwis::algorithm::{Instance, MaxIsAlgorithm};
use congest_mwis::experiment::{default_spec, execute, replay, GraphSpec, RunSpec};
use congest_mwis::graph::{generate, Family, WeightModel};
use congest_mwis::parallel::{self, Schedule};
use congest_mwis::ranking::fast_low_degree_approx;
use congest_mwis::simulator::ExecConfig;
use congest_mwis::sparsify::SparseMis;

#[test]
fn sparse_mean_weight_on_dense_gnp() {
    let g = generate(Family::Gnp { n: 200, p: 0.3 }, WeightModel::HeavyTail { max: 1 << 20 }, 3).unwrap();
    let seeds: Vec<u64> = (0..20).collect();
    let weights = parallel::map(Schedule::Parallel, &seeds, |&s| {
        let out = SparseMis::default().run(&Instance::full(&g), &ExecConfig::default(), s).unwrap();
        assert!(g.is_independent(&out.members));
        g.weight_of(&out.members) as f64
    });
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    let bound = g.total_weight() as f64 / (8.0 * g.max_degree() as f64);
    assert!(mean >= bound, "mean {mean} < {bound}");
}

#[test]
fn fast_low_degree_size_on_sparse_gnp() {
    let n = 2048;
    let seeds: Vec<u64> = (0..100).collect();
    let g = generate(Family::Gnp { n, p: 15.0 / n as f64 }, WeightModel::Unit, 8).unwrap();
    let delta = g.max_degree();
    assert!((20..=45).contains(&delta), "Δ = {delta}");
    let sizes = parallel::map(Schedule::Parallel, &seeds, |&s| {
        let r = fast_low_degree_approx(&Instance::full(&g), 1.0, 2, &ExecConfig::default(), s).unwrap();
        assert!(g.is_independent(&r.members));
        r.members.len()
    });
    for size in sizes {
        assert!(2 * (delta + 1) * size >= n, "|I| = {size}, Δ = {delta}");
    }
}

#[test]
fn every_algorithm_replays_from_json() {
    for name in ["luby", "heavy", "sparse", "boost-heavy", "boost-sparse", "arb", "boppana", "fastld"] {
        let spec = RunSpec {
            graph: GraphSpec::Generated {
                family: Family::Degenerate { n: 120, k: 3 },
                weights: WeightModel::UniformRange { lo: 1, hi: 1000 },
                graph_seed: 17,
            },
            algorithm: default_spec(name, Some(0.5), None, None, None).unwrap(),
            exec: ExecConfig::default(),
            seed: 5,
            oracle: false,
        };
        let rec = execute(&spec).unwrap();
        let parsed = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(rec, parsed, "{name}");
        assert!(replay(&parsed).unwrap().same_outcome(&rec), "{name}");
        assert!(rec.max_message_bits <= rec.budget_bits, "{name}");
    }
}

#[test]
fn phase_stack_matches_the_run() {
    let g = generate(Family::Gnp { n: 40, p: 0.2 }, WeightModel::UniformRange { lo: 1, hi: 90 }, 2).unwrap();
    let exec = ExecConfig::default();
    for name in ["boost-heavy", "boost-sparse", "arb", "fastld"] {
        let alg = default_spec(name, Some(1.0), None, None, None).unwrap();
        let stack = alg.phase_stack(&g, &exec, 4).unwrap().expect("local-ratio algorithm");
        let out = alg.build().run(&Instance::full(&g), &exec, 4).unwrap();
        assert!(i128::from(g.weight_of(&out.members)) >= stack.total(), "{name}");
    }
    assert!(default_spec("luby", None, None, None, None).unwrap().phase_stack(&g, &exec, 4).unwrap().is_none());
}

#[test]
fn reduction_gaps_stay_within_the_inner_round_count() {
    use congest_mwis::lowerbound::rand_mis;
    let cycle = generate(Family::Cycle { n: 48 }, WeightModel::Unit, 0).unwrap();
    for n1 in [8, 16] {
        for seed in 0..10 {
            let Ok(r) = rand_mis(&cycle, &SparseMis::default(), n1, 8, &ExecConfig::default(), seed) else { continue };
            assert!(r.gaps.max_gap as u64 <= 2 * r.gaps.inner_rounds.max(1), "{:?}", r.gaps);
            assert!(r.gaps.r_large > r.gaps.r_small);
        }
    }
}
