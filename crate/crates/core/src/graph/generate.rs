use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Pareto};
use serde::{Deserialize, Serialize};

use super::{GraphError, WeightedGraph};
use crate::rng::{salt, stream};

/// Graph families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Cycle { n: usize },
    Path { n: usize },
    Clique { n: usize },
    /// One center and `n - 1` leaves.
    Star { n: usize },
    Gnp { n: usize, p: f64 },
    CycleOfCliques { n0: usize, n1: usize },
    /// Uniform random labelled tree.
    Tree { n: usize },
    /// Each node links to up to `k` uniformly chosen earlier nodes, so the
    /// degeneracy is at most `k`.
    Degenerate { n: usize, k: usize },
}

/// Node weight distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum WeightModel {
    Unit,
    /// Uniform on `lo..=hi`.
    UniformRange { lo: u64, hi: u64 },
    /// Pareto(scale 1, shape 1.5), floored and capped at `max`.
    HeavyTail { max: u64 },
}

impl Family {
    pub fn n(&self) -> usize {
        match *self {
            Family::Cycle { n }
            | Family::Path { n }
            | Family::Clique { n }
            | Family::Star { n }
            | Family::Gnp { n, .. }
            | Family::Tree { n }
            | Family::Degenerate { n, .. } => n,
            Family::CycleOfCliques { n0, n1 } => n0 * n1,
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: &str| Err(GraphError::InvalidParameters(msg.to_owned()));
        match *self {
            Family::Cycle { n } if n < 3 => bad("cycle needs n >= 3"),
            Family::Gnp { p, .. } if !(0.0..=1.0).contains(&p) => bad("gnp needs 0 <= p <= 1"),
            Family::CycleOfCliques { n0, .. } if n0 < 3 => bad("cycle of cliques needs n0 >= 3"),
            Family::CycleOfCliques { n1, .. } if n1 < 1 => bad("cycle of cliques needs n1 >= 1"),
            Family::Degenerate { k, .. } if k < 1 => bad("degenerate family needs k >= 1"),
            _ if self.n() < 1 => bad("n must be at least 1"),
            _ => Ok(()),
        }
    }
}

/// Deterministic generator: the same `(family, weights, seed)` always yields
/// the same graph. Topology and weights are drawn from separate streams.
pub fn generate(family: Family, weights: WeightModel, seed: u64) -> Result<WeightedGraph, GraphError> {
    family.validate()?;
    if let WeightModel::UniformRange { lo, hi } = weights {
        if lo > hi {
            return Err(GraphError::InvalidParameters(format!("weight range {lo}..={hi} is empty")));
        }
    }
    let n = family.n();
    let w = draw_weights(n, weights, seed);
    if let Family::CycleOfCliques { n0, n1 } = family {
        let g = crate::lowerbound::build_clique_cycle(n0, n1)
            .map_err(|e| GraphError::InvalidParameters(e.to_string()))?;
        return g.reweighted(w);
    }
    let edges = topology(family, seed);
    WeightedGraph::from_edges(w, &edges)
}

fn topology(family: Family, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = stream(seed, salt::TOPOLOGY, 0);
    match family {
        Family::Cycle { n } => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        Family::Path { n } => (1..n).map(|i| (i - 1, i)).collect(),
        Family::Clique { n } => complete(n),
        Family::Star { n } => (1..n).map(|i| (0, i)).collect(),
        Family::Gnp { n, p } => gnp(n, p, &mut rng),
        Family::Tree { n } => random_tree(n, &mut rng),
        Family::Degenerate { n, k } => {
            let mut edges = Vec::new();
            let mut earlier: Vec<usize> = Vec::new();
            for v in 0..n {
                let picks = earlier.choose_multiple(&mut rng, k.min(v));
                edges.extend(picks.map(|&u| (u, v)));
                earlier.push(v);
            }
            edges
        }
        Family::CycleOfCliques { .. } => unreachable!("built by the lowerbound module"),
    }
}

fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// G(n, p) by geometric edge skipping (Batagelj and Brandes), O(n + m).
fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if p <= 0.0 || n < 2 {
        return Vec::new();
    }
    if p >= 1.0 {
        return complete(n);
    }
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

/// Uniform labelled tree from a random Prüfer sequence.
fn random_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn draw_weights(n: usize, model: WeightModel, seed: u64) -> Vec<u64> {
    let mut rng = stream(seed, salt::WEIGHTS, 0);
    match model {
        WeightModel::Unit => vec![1; n],
        WeightModel::UniformRange { lo, hi } => (0..n).map(|_| rng.random_range(lo..=hi)).collect(),
        WeightModel::HeavyTail { max } => {
            let pareto = Pareto::new(1.0, 1.5).expect("valid Pareto parameters");
            (0..n)
                .map(|_| {
                    let x: f64 = pareto.sample(&mut rng);
                    (x.floor() as u64).clamp(1, max.max(1))
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_edge_counts() {
        let c3 = generate(Family::Cycle { n: 3 }, WeightModel::Unit, 0).unwrap();
        assert_eq!((c3.n(), c3.m()), (3, 3));
        assert!(c3.weights().iter().all(|&w| w == 1));
        let k4 = generate(Family::Clique { n: 4 }, WeightModel::Unit, 0).unwrap();
        assert_eq!(k4.m(), 6);
        let empty = generate(Family::Gnp { n: 100, p: 0.0 }, WeightModel::Unit, 7).unwrap();
        assert_eq!((empty.n(), empty.m()), (100, 0));
        let full = generate(Family::Gnp { n: 20, p: 1.0 }, WeightModel::Unit, 7).unwrap();
        assert_eq!(full.m(), 190);
        let star = generate(Family::Star { n: 5 }, WeightModel::Unit, 0).unwrap();
        assert_eq!((star.m(), star.degree(0)), (4, 4));
    }

    #[test]
    fn invalid_parameters_are_reported() {
        assert!(generate(Family::Cycle { n: 2 }, WeightModel::Unit, 0).is_err());
        assert!(generate(Family::Gnp { n: 5, p: 1.5 }, WeightModel::Unit, 0).is_err());
        assert!(generate(Family::Path { n: 0 }, WeightModel::Unit, 0).is_err());
        assert!(generate(Family::Path { n: 3 }, WeightModel::UniformRange { lo: 5, hi: 1 }, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let f = Family::Gnp { n: 300, p: 0.05 };
        let w = WeightModel::HeavyTail { max: 1_000_000 };
        assert_eq!(generate(f, w, 11).unwrap(), generate(f, w, 11).unwrap());
        assert_ne!(generate(f, w, 11).unwrap(), generate(f, w, 12).unwrap());
    }

    #[test]
    fn gnp_edge_count_is_plausible() {
        // Binomial(4950, 0.1): mean 495, sd about 21.
        let g = generate(Family::Gnp { n: 100, p: 0.1 }, WeightModel::Unit, 2).unwrap();
        assert!((400..=590).contains(&g.m()), "m = {}", g.m());
    }

    #[test]
    fn trees_and_degenerate_graphs() {
        for seed in 0..20 {
            let t = generate(Family::Tree { n: 50 }, WeightModel::Unit, seed).unwrap();
            assert_eq!(t.m(), 49);
            assert!(t.is_connected());
            let d = generate(Family::Degenerate { n: 40, k: 3 }, WeightModel::Unit, seed).unwrap();
            assert!(d.degeneracy() <= 3);
        }
    }
}
