//! Graph collections for the verification suites.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::{generate, Family, WeightModel, WeightedGraph};
use crate::rng::{phase_seed, salt, stream};

/// Canonical string of a rooted tree (AHU encoding).
fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v].iter().filter(|&&u| u != parent).map(|&u| rooted_code(adj, u, v)).collect();
    children.sort();
    format!("({})", children.concat())
}

/// Canonical form of a free tree: the smallest code over its centres.
pub fn tree_code(n: usize, edges: &[(usize, usize)]) -> String {
    if n == 0 {
        return String::new();
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|&c| rooted_code(&adj, c, usize::MAX)).min().unwrap_or_default()
}

fn prufer_edges(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// One representative of every isomorphism class of trees on `n` nodes.
pub fn all_trees(n: usize) -> Vec<WeightedGraph> {
    let build = |edges: &[(usize, usize)]| WeightedGraph::from_edges(vec![1; n], edges).expect("valid tree");
    match n {
        0 => return Vec::new(),
        1 => return vec![build(&[])],
        2 => return vec![build(&[(0, 1)])],
        _ => {}
    }
    let mut seen = BTreeSet::new();
    let mut trees = Vec::new();
    let len = n - 2;
    let total = n.pow(len as u32);
    for mut code in 0..total {
        let mut seq = Vec::with_capacity(len);
        for _ in 0..len {
            seq.push(code % n);
            code /= n;
        }
        let edges = prufer_edges(n, &seq);
        if seen.insert(tree_code(n, &edges)) {
            trees.push(build(&edges));
        }
    }
    trees
}

/// Every tree and cycle on at most `max_n` nodes plus `random` random graphs
/// on at most `max_n` nodes.
pub fn small_graph_corpus(max_n: usize, random: usize, seed: u64) -> Vec<WeightedGraph> {
    let mut out: Vec<WeightedGraph> = (1..=max_n).flat_map(all_trees).collect();
    out.extend((3..=max_n).map(|n| generate(Family::Cycle { n }, WeightModel::Unit, 0).expect("valid cycle")));
    let mut rng = stream(seed, salt::CORPUS, 0);
    for i in 0..random {
        let n = rng.random_range(1..=max_n);
        let p = rng.random_range(0.1..0.9);
        out.push(generate(Family::Gnp { n, p }, WeightModel::Unit, phase_seed(seed, i as u64)).expect("valid gnp"));
    }
    out
}

/// A generated graph with the parameters needed to regenerate it.
#[derive(Debug, Clone)]
pub struct Sample {
    pub family: Family,
    pub weights: WeightModel,
    pub graph_seed: u64,
    pub graph: WeightedGraph,
}

impl Sample {
    fn new(family: Family, weights: WeightModel, graph_seed: u64) -> Self {
        let graph = generate(family, weights, graph_seed).expect("corpus parameters are valid");
        Self {
            family,
            weights,
            graph_seed,
            graph,
        }
    }
}

fn weight_model(rng: &mut impl Rng) -> WeightModel {
    match rng.random_range(0..3) {
        0 => WeightModel::Unit,
        1 => WeightModel::UniformRange {
            lo: 1,
            hi: rng.random_range(2..1000),
        },
        _ => WeightModel::HeavyTail { max: 1 << 20 },
    }
}

/// Random graphs of mixed families with `min_n ≤ n ≤ max_n`.
pub fn mixed_corpus(count: usize, min_n: usize, max_n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = stream(seed, salt::CORPUS, 1);
    (0..count)
        .map(|i| {
            let n = rng.random_range(min_n..=max_n);
            let family = match rng.random_range(0..8) {
                0 if n >= 3 => Family::Cycle { n },
                1 => Family::Path { n },
                2 => Family::Star { n },
                3 => Family::Clique { n: n.min(40) },
                4 => Family::Tree { n },
                5 => Family::Degenerate {
                    n,
                    k: rng.random_range(1..=4),
                },
                _ => Family::Gnp {
                    n,
                    p: (rng.random_range(0.5..8.0) / n as f64).min(1.0),
                },
            };
            Sample::new(family, weight_model(&mut rng), phase_seed(seed, i as u64))
        })
        .collect()
}

/// Connected random graphs with `2 ≤ n ≤ max_n` (disconnected draws are
/// redrawn with the next graph seed).
pub fn connected_corpus(count: usize, max_n: usize, seed: u64) -> Vec<Sample> {
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    let mut rng = stream(seed, salt::CORPUS, 2);
    while out.len() < count {
        let n = rng.random_range(2..=max_n);
        let family = match rng.random_range(0..6) {
            0 if n >= 3 => Family::Cycle { n },
            1 => Family::Tree { n },
            2 => Family::Degenerate {
                n,
                k: rng.random_range(1..=3),
            },
            3 => Family::Star { n },
            _ => Family::Gnp {
                n,
                p: rng.random_range(0.15..0.6),
            },
        };
        let weights = weight_model(&mut rng);
        loop {
            let s = Sample::new(family, weights, phase_seed(seed, attempt));
            attempt += 1;
            if s.graph.is_connected() {
                out.push(s);
                break;
            }
        }
    }
    out
}

/// Graphs of degeneracy at most 3 with `n ≤ max_n`.
pub fn low_degeneracy_corpus(count: usize, max_n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = stream(seed, salt::CORPUS, 3);
    (0..count)
        .map(|i| {
            let n = rng.random_range(1..=max_n);
            let family = match rng.random_range(0..5) {
                0 if n >= 3 => Family::Cycle { n },
                1 => Family::Star { n },
                2 => Family::Tree { n },
                _ => Family::Degenerate {
                    n,
                    k: rng.random_range(1..=3),
                },
            };
            Sample::new(family, weight_model(&mut rng), phase_seed(seed, i as u64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=8).map(|n| all_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
    }

    #[test]
    fn trees_are_trees() {
        for n in 1..=7 {
            for t in all_trees(n) {
                assert_eq!(t.m(), n - 1);
                assert!(t.is_connected());
            }
        }
    }

    #[test]
    fn tree_code_ignores_labels() {
        let a = tree_code(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = tree_code(4, &[(2, 0), (0, 3), (3, 1)]);
        let star = tree_code(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(a, b);
        assert_ne!(a, star);
    }

    #[test]
    fn corpora_respect_their_bounds() {
        assert!(connected_corpus(50, 24, 1).iter().all(|s| s.graph.is_connected() && (2..=24).contains(&s.graph.n())));
        assert!(low_degeneracy_corpus(50, 24, 1).iter().all(|s| s.graph.degeneracy() <= 3));
        assert!(mixed_corpus(50, 1, 200, 1).iter().all(|s| s.graph.n() <= 200));
        let small = small_graph_corpus(7, 20, 1);
        assert!(small.iter().all(|g| g.n() <= 7));
        assert_eq!(small.len(), 25 + 5 + 20);
    }

    #[test]
    fn samples_regenerate() {
        for s in mixed_corpus(20, 1, 50, 9) {
            let again = generate(s.family, s.weights, s.graph_seed).unwrap();
            assert_eq!(again, s.graph);
        }
    }
}
