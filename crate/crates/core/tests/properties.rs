//! Property tests over random graphs and seeds.

use congest_mwis::algorithm::{Instance, MaxIsAlgorithm};
use congest_mwis::approx::HeavyMis;
use congest_mwis::arb::arb_approx;
use congest_mwis::boost::{boost, covers_frames, pop_sequential, reduce_weights};
use congest_mwis::graph::{brute_force_max_is, generate, Family, WeightModel, WeightedGraph};
use congest_mwis::mis::{luby_mis, verify_mis};
use congest_mwis::parallel::Schedule;
use congest_mwis::ranking::{boppana, check_perm_equivalence, strict_max_rule, BoppanaMis};
use congest_mwis::simulator::ExecConfig;
use congest_mwis::sparsify::SparseMis;
use proptest::prelude::*;

fn family(max_n: usize) -> impl Strategy<Value = Family> {
    prop_oneof![
        (3..=max_n).prop_map(|n| Family::Cycle { n }),
        (1..=max_n).prop_map(|n| Family::Path { n }),
        (1..=max_n.min(12)).prop_map(|n| Family::Clique { n }),
        (1..=max_n).prop_map(|n| Family::Star { n }),
        (1..=max_n).prop_map(|n| Family::Tree { n }),
        (1..=max_n, 1usize..=4).prop_map(|(n, k)| Family::Degenerate { n, k }),
        (1..=max_n, 0.0..0.6f64).prop_map(|(n, p)| Family::Gnp { n, p }),
    ]
}

fn weights() -> impl Strategy<Value = WeightModel> {
    prop_oneof![
        Just(WeightModel::Unit),
        (1u64..50, 0u64..5000).prop_map(|(lo, span)| WeightModel::UniformRange { lo, hi: lo + span }),
        Just(WeightModel::HeavyTail { max: 1 << 30 }),
    ]
}

fn graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (family(max_n), weights(), any::<u64>()).prop_map(|(f, w, s)| generate(f, w, s).unwrap())
}

fn all(g: &WeightedGraph) -> Vec<usize> {
    (0..g.n()).collect()
}

fn exec() -> ExecConfig {
    ExecConfig::default().with_schedule(Schedule::Sequential)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn luby_is_maximal(g in graph(80), seed in any::<u64>()) {
        let (members, stats) = luby_mis(&g, &all(&g), &exec(), seed).unwrap();
        prop_assert!(verify_mis(&g, &all(&g), &members).is_ok());
        prop_assert!(stats.max_message_bits <= exec().budget_bits(g.n() as u64));
    }

    #[test]
    fn reduce_weights_matches_closed_form(g in graph(60), seed in any::<u64>()) {
        let w: Vec<i64> = g.weights().iter().map(|&x| x as i64).collect();
        let (set, _) = luby_mis(&g, &all(&g), &exec(), seed).unwrap();
        let reduced = reduce_weights(&g, &w, &set).unwrap();
        for v in 0..g.n() {
            let hit: i64 = std::iter::once(v).chain(g.neighbors(v).iter().copied()).filter(|u| set.contains(u)).map(|u| w[u]).sum();
            prop_assert_eq!(reduced[v], w[v] - hit);
        }
    }

    #[test]
    fn boost_stack_property_and_pop(g in graph(60), seed in any::<u64>(), eps in prop_oneof![Just(0.25), Just(0.5), Just(1.0)]) {
        let r = boost(&Instance::full(&g), &HeavyMis, eps, 8.0, &exec(), seed).unwrap();
        prop_assert!(g.is_independent(&r.members));
        prop_assert!(r.stack_check.holds);
        prop_assert!(i128::from(g.weight_of(&r.members)) >= r.stack.total());
        prop_assert_eq!(covers_frames(&g, &r.members, &r.stack), None);
        prop_assert_eq!(&r.members, &pop_sequential(&g, &r.stack));
    }

    #[test]
    fn boost_is_schedule_independent(g in graph(50), seed in any::<u64>()) {
        let inner = SparseMis::default();
        let a = boost(&Instance::full(&g), &inner, 1.0, 8.0, &exec(), seed).unwrap();
        let b = boost(&Instance::full(&g), &inner, 1.0, 8.0, &exec().with_schedule(Schedule::Parallel), seed).unwrap();
        prop_assert_eq!(a.members, b.members);
        prop_assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn boppana_is_the_strict_max_rule(g in graph(80), seed in any::<u64>(), c in 1u32..6) {
        let r = boppana(&g, &all(&g), c, &exec(), seed).unwrap();
        prop_assert_eq!(&r.members, &strict_max_rule(&g, &all(&g), &r.ranks));
        prop_assert!(g.is_independent(&r.members));
        prop_assert_eq!(r.stats.rounds, 1);
    }

    #[test]
    fn arb_empties_and_halves(f in (1usize..60, 1usize..=3).prop_map(|(n, k)| Family::Degenerate { n, k }), w in weights(), gs in any::<u64>(), seed in any::<u64>()) {
        let g = generate(f, w, gs).unwrap();
        let r = arb_approx(&Instance::full(&g), g.degeneracy().max(1), &HeavyMis, &exec(), seed).unwrap();
        prop_assert!(r.emptied());
        prop_assert!(r.halving_violations.is_empty(), "{:?}", r.active_sizes);
        prop_assert!(r.stack_check.holds);
        prop_assert!(g.is_independent(&r.members));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_dominates(g in graph(16), seed in any::<u64>()) {
        let opt = brute_force_max_is(&g).unwrap().weight;
        for alg in [&HeavyMis as &dyn MaxIsAlgorithm, &SparseMis::default(), &BoppanaMis::default()] {
            let out = alg.run(&Instance::full(&g), &exec(), seed).unwrap();
            prop_assert!(g.weight_of(&out.members) <= opt);
        }
    }

    #[test]
    fn ranking_equivalence_on_tiny_graphs(g in graph(6)) {
        prop_assert!(check_perm_equivalence(&g).unwrap());
    }
}
