//! Random ranking: every node draws a rank from `{1, …, 100·n^{c+2}}` and
//! joins iff its rank strictly exceeds the rank of every neighbour. The
//! sequential formulation scans a permutation and keeps every node that
//! precedes all its neighbours.

use rand::Rng;

use crate::algorithm::{AlgOutcome, Error, Instance, MaxIsAlgorithm};
use crate::boost::{boost, BoostResult};
use crate::graph::{GraphError, IndependentSet, WeightedGraph};
use crate::parallel::{self, Schedule};
use crate::rng::NodeRng;
use crate::simulator::{self, ExecConfig, Inbox, NodeContext, NodeProgram, RoundStats, Transition, WireSize};

/// Largest graph accepted by [`check_perm_equivalence`].
pub const PERM_CHECK_MAX_N: usize = 9;

/// `R = 100·n_upper^{c+2}`, or `None` if it does not fit in 128 bits.
pub fn rank_range(n_upper: u64, c: u32) -> Option<u128> {
    u128::from(n_upper).checked_pow(c.checked_add(2)?)?.checked_mul(100)
}

/// One-round ranking program.
#[derive(Debug, Clone, Copy)]
pub struct Boppana {
    range: u128,
    width: u64,
}

impl Boppana {
    pub fn new(n_upper: u64, c: u32) -> Result<Self, Error> {
        if c == 0 {
            return Err(Error::InvalidParameter("rank constant c must be at least 1".into()));
        }
        let range = rank_range(n_upper.max(1), c).ok_or_else(|| {
            Error::InvalidParameter(format!("rank range 100·{n_upper}^{} exceeds 128 bits", c + 2))
        })?;
        Ok(Self {
            range,
            width: 128 - u64::from(range.leading_zeros()),
        })
    }

    pub fn range(&self) -> u128 {
        self.range
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RankMsg {
    pub rank: u128,
    width: u64,
}

impl WireSize for RankMsg {
    fn size_bits(&self) -> u64 {
        self.width
    }
}

/// Membership together with the drawn rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ranked {
    pub joined: bool,
    pub rank: u128,
}

impl NodeProgram for Boppana {
    type State = u128;
    type Msg = RankMsg;
    type Output = Ranked;

    fn init(&self, _: &NodeContext<'_>, rng: &mut NodeRng) -> (u128, Transition<RankMsg, Ranked>) {
        let rank = rng.random_range(1..=self.range);
        (rank, Transition::broadcast(RankMsg { rank, width: self.width }))
    }

    fn step(&self, _: &NodeContext<'_>, rank: &mut u128, inbox: &Inbox<'_, RankMsg>, _: &mut NodeRng) -> Transition<RankMsg, Ranked> {
        let rank = *rank;
        Transition::halt(Ranked {
            joined: inbox.messages().all(|m| rank > m.rank),
            rank,
        })
    }
}

/// Output of one ranking round on a subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct BoppanaRun {
    pub members: Vec<usize>,
    /// Drawn ranks by dense index (`0` outside the subgraph).
    pub ranks: Vec<u128>,
    pub stats: RoundStats,
}

/// Runs [`Boppana`] on the subgraph induced by `nodes`.
pub fn boppana(g: &WeightedGraph, nodes: &[usize], c: u32, exec: &ExecConfig, seed: u64) -> Result<BoppanaRun, Error> {
    let program = Boppana::new(exec.n_upper_for(g), c)?;
    let out = simulator::run_on_subgraph(g, nodes, &program, exec, seed)?;
    let mut ranks = vec![0; g.n()];
    let mut members = Vec::new();
    for (v, o) in out.outputs.iter().enumerate() {
        if let Some(r) = o {
            ranks[v] = r.rank;
            if r.joined {
                members.push(v);
            }
        }
    }
    Ok(BoppanaRun {
        members,
        ranks,
        stats: out.stats,
    })
}

/// Nodes of `nodes` whose rank strictly exceeds every neighbour's in `nodes`.
pub fn strict_max_rule(g: &WeightedGraph, nodes: &[usize], ranks: &[u128]) -> Vec<usize> {
    let mut present = vec![false; g.n()];
    for &v in nodes {
        present[v] = true;
    }
    let mut members: Vec<usize> = nodes
        .iter()
        .copied()
        .filter(|&v| g.neighbors(v).iter().all(|&u| !present[u] || ranks[v] > ranks[u]))
        .collect();
    members.sort_unstable();
    members
}

/// Scans `order` and keeps every node none of whose neighbours came earlier.
pub fn seq_boppana(g: &WeightedGraph, order: &[usize]) -> IndependentSet {
    let mut seen = vec![false; g.n()];
    let mut members = Vec::new();
    for &v in order {
        if !g.neighbors(v).iter().any(|&u| seen[u]) {
            members.push(v);
        }
        seen[v] = true;
    }
    IndependentSet::new(g, members)
}

/// The `k`-th permutation of `0..n` in lexicographic order.
fn nth_permutation(n: usize, mut k: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut fact: u64 = (1..n as u64).product();
    let mut perm = Vec::with_capacity(n);
    for left in (1..=n).rev() {
        let i = (k / fact) as usize;
        k %= fact;
        perm.push(pool.remove(i));
        if left > 1 {
            fact /= left as u64 - 1;
        }
    }
    perm
}

/// First permutation on which the sequential scan and the strict-max rule
/// with ranks `n − position` disagree.
pub fn find_perm_mismatch(g: &WeightedGraph, schedule: Schedule) -> Result<Option<Vec<usize>>, GraphError> {
    let n = g.n();
    if n > PERM_CHECK_MAX_N {
        return Err(GraphError::OracleCap { n, cap: PERM_CHECK_MAX_N });
    }
    let all: Vec<usize> = (0..n).collect();
    let total: u64 = (1..=n as u64).product();
    let firsts: Vec<u64> = (0..n.max(1) as u64).collect();
    let block = total / n.max(1) as u64;
    let found = parallel::map(schedule, &firsts, |&first| {
        (first * block..(first + 1) * block).find_map(|k| {
            let perm = nth_permutation(n, k);
            let mut ranks = vec![0u128; n];
            for (pos, &v) in perm.iter().enumerate() {
                ranks[v] = (n - pos) as u128;
            }
            (seq_boppana(g, &perm).members != strict_max_rule(g, &all, &ranks)).then_some(perm)
        })
    });
    Ok(found.into_iter().flatten().next())
}

/// `true` iff both formulations agree on all `n!` permutations.
pub fn check_perm_equivalence(g: &WeightedGraph) -> Result<bool, GraphError> {
    Ok(find_perm_mismatch(g, Schedule::default())?.is_none())
}

/// One ranking round as an algorithm on an instance (weight-oblivious).
#[derive(Debug, Clone, Copy)]
pub struct BoppanaMis {
    pub c: u32,
}

impl Default for BoppanaMis {
    fn default() -> Self {
        Self { c: 2 }
    }
}

impl MaxIsAlgorithm for BoppanaMis {
    fn name(&self) -> String {
        "boppana".into()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        let r = boppana(inst.graph, &inst.nodes, self.c, exec, seed)?;
        Ok(AlgOutcome {
            members: r.members,
            stats: r.stats,
            mis_valid: true,
            stack_checks: Vec::new(),
        })
    }
}

/// Largest maximum degree for which one ranking round is expected to pick
/// `n/(8(Δ+1))` nodes with failure probability `fail`:
/// `⌊n / (256 ln(1/fail)) − 1⌋`, or `0` when that is negative.
pub fn ranking_regime_max_degree(n: usize, fail: f64) -> usize {
    let bound = n as f64 / (256.0 * (1.0 / fail).ln()) - 1.0;
    if bound > 0.0 {
        bound.floor() as usize
    } else {
        0
    }
}

/// Constant of the `n/(8(Δ+1))` size guarantee of one ranking round.
pub const RANKING_C: f64 = 8.0;

/// Boosting over one ranking round with constant [`RANKING_C`].
pub fn fast_low_degree_approx(inst: &Instance<'_>, eps: f64, c: u32, exec: &ExecConfig, seed: u64) -> Result<BoostResult, Error> {
    boost(inst, &BoppanaMis { c }, eps, RANKING_C, exec, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, WeightModel};
    use crate::rng::{salt, stream};

    #[test]
    fn regime_cap_for_4096_nodes() {
        assert_eq!(ranking_regime_max_degree(4096, 0.01), 2);
        assert_eq!(ranking_regime_max_degree(100, 0.01), 0);
    }

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn strict_max_examples() {
        let tri = generate(Family::Clique { n: 3 }, WeightModel::Unit, 0).unwrap();
        assert_eq!(strict_max_rule(&tri, &[0, 1, 2], &[5, 2, 9]), vec![2]);
        let k2 = WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap();
        assert!(strict_max_rule(&k2, &[0, 1], &[4, 4]).is_empty());
    }

    #[test]
    fn program_follows_the_rule() {
        let config = ExecConfig::default();
        let edgeless = WeightedGraph::from_edges(vec![1; 5], &[]).unwrap();
        let r = boppana(&edgeless, &[0, 1, 2, 3, 4], 2, &config, 1).unwrap();
        assert_eq!(r.members, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.stats.rounds, 1);
        for seed in 0..20 {
            let g = generate(Family::Gnp { n: 80, p: 0.1 }, WeightModel::Unit, seed).unwrap();
            let all: Vec<usize> = (0..g.n()).collect();
            let r = boppana(&g, &all, 3, &config, seed).unwrap();
            assert_eq!(r.members, strict_max_rule(&g, &all, &r.ranks));
            assert!(g.is_independent(&r.members));
            let range = rank_range(80, 3).unwrap();
            assert!(r.ranks.iter().all(|&x| (1..=range).contains(&x)));
        }
    }

    #[test]
    fn rank_range_and_width() {
        assert_eq!(rank_range(10, 1), Some(100_000));
        assert_eq!(rank_range(1 << 20, 4), Some(100 << 120));
        assert_eq!(rank_range(1 << 21, 4), None);
        let b = Boppana::new(4096, 4).unwrap();
        assert_eq!(b.width, 79);
        assert!(Boppana::new(1 << 30, 4).is_err());
        assert!(Boppana::new(16, 0).is_err());
    }

    #[test]
    fn seq_examples() {
        assert_eq!(seq_boppana(&path3(), &[2, 0, 1]).members, vec![0, 2]);
        let k5 = generate(Family::Clique { n: 5 }, WeightModel::Unit, 0).unwrap();
        assert_eq!(seq_boppana(&k5, &[3, 1, 0, 2, 4]).members, vec![3]);
        let edgeless = WeightedGraph::from_edges(vec![1; 4], &[]).unwrap();
        assert_eq!(seq_boppana(&edgeless, &[2, 3, 1, 0]).len(), 4);
    }

    #[test]
    fn permutations_enumerate_lexicographically() {
        let perms: Vec<_> = (0..6).map(|k| nth_permutation(3, k)).collect();
        assert_eq!(
            perms,
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]
        );
        assert_eq!(nth_permutation(0, 0), Vec::<usize>::new());
    }

    #[test]
    fn perm_equivalence_examples() {
        let k2 = WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap();
        assert_eq!(check_perm_equivalence(&k2), Ok(true));
        assert_eq!(check_perm_equivalence(&path3()), Ok(true));
        let edgeless = WeightedGraph::from_edges(vec![1; 6], &[]).unwrap();
        assert_eq!(check_perm_equivalence(&edgeless), Ok(true));
        let big = WeightedGraph::from_edges(vec![1; 10], &[]).unwrap();
        assert!(check_perm_equivalence(&big).is_err());
        let empty = WeightedGraph::from_edges(vec![], &[]).unwrap();
        assert_eq!(check_perm_equivalence(&empty), Ok(true));
    }

    #[test]
    fn sequential_and_parallel_checks_agree() {
        for seed in 0..5 {
            let g = generate(Family::Gnp { n: 7, p: 0.4 }, WeightModel::Unit, seed).unwrap();
            assert_eq!(
                find_perm_mismatch(&g, Schedule::Sequential).unwrap(),
                find_perm_mismatch(&g, Schedule::Parallel).unwrap()
            );
        }
    }

    #[test]
    fn fast_low_degree_examples() {
        let config = ExecConfig::default();
        let edgeless = WeightedGraph::from_edges(vec![1; 6], &[]).unwrap();
        let r = fast_low_degree_approx(&Instance::full(&edgeless), 1.0, 2, &config, 0).unwrap();
        assert_eq!(r.members.len(), 6);

        let c5 = generate(Family::Cycle { n: 5 }, WeightModel::Unit, 0).unwrap();
        for seed in 0..20 {
            let r = fast_low_degree_approx(&Instance::full(&c5), 0.5, 2, &config, seed).unwrap();
            assert_eq!(r.members.len(), 2);
            assert!(r.stats.rounds <= 16 * (2 + 2));
        }
    }

    #[test]
    fn wide_ranks_do_not_collide() {
        let range = rank_range(1 << 16, 4).unwrap();
        let mut rng = stream(5, salt::SAMPLE, 0);
        let collisions = (0..1_000_000)
            .filter(|_| rng.random_range(1..=range) == rng.random_range(1..=range))
            .count();
        assert_eq!(collisions, 0);
    }
}
