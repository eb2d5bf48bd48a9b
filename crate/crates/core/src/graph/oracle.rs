//! Exact maximum-weight independent set by branch and bound.

use super::{GraphError, IndependentSet, WeightedGraph};

pub const DEFAULT_ORACLE_CAP: usize = 26;

/// Exact MaxIS for graphs with at most [`DEFAULT_ORACLE_CAP`] nodes.
pub fn brute_force_max_is(g: &WeightedGraph) -> Result<IndependentSet, GraphError> {
    brute_force_max_is_with_cap(g, DEFAULT_ORACLE_CAP)
}

/// Exact MaxIS with an explicit node cap (at most 64).
pub fn brute_force_max_is_with_cap(g: &WeightedGraph, cap: usize) -> Result<IndependentSet, GraphError> {
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(GraphError::OracleCap { n: g.n(), cap });
    }
    let n = g.n();
    let closed: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u64 << v, |m, &u| m | 1u64 << u))
        .collect();
    let mut search = Search {
        weights: g.weights(),
        closed: &closed,
        best: None,
        best_set: 0,
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.branch(all, 0, 0);
    let members = (0..n).filter(|&v| search.best_set >> v & 1 == 1).collect();
    Ok(IndependentSet::new(g, members))
}

struct Search<'a> {
    weights: &'a [u64],
    closed: &'a [u64],
    best: Option<u64>,
    best_set: u64,
}

impl Search<'_> {
    fn mass(&self, mut set: u64) -> u64 {
        let mut total = 0;
        while set != 0 {
            total += self.weights[set.trailing_zeros() as usize];
            set &= set - 1;
        }
        total
    }

    fn branch(&mut self, mut remaining: u64, mut chosen: u64, mut value: u64) {
        // Nodes with no remaining neighbour are always taken.
        let mut pivot = None;
        let mut pivot_degree = 0;
        let mut scan = remaining;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let degree = (self.closed[v] & remaining).count_ones() - 1;
            if degree == 0 {
                remaining &= !(1u64 << v);
                chosen |= 1u64 << v;
                value += self.weights[v];
            } else if degree > pivot_degree {
                pivot_degree = degree;
                pivot = Some(v);
            }
        }
        let Some(v) = pivot else {
            if self.best.is_none_or(|b| value > b) {
                self.best = Some(value);
                self.best_set = chosen;
            }
            return;
        };
        if self.best.is_some_and(|b| value + self.mass(remaining) <= b) {
            return;
        }
        self.branch(
            remaining & !self.closed[v],
            chosen | 1u64 << v,
            value + self.weights[v],
        );
        self.branch(remaining & !(1u64 << v), chosen, value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive enumeration over all subsets, used to cross-check the
    /// branch and bound on small graphs.
    fn enumerate(g: &WeightedGraph) -> u64 {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&mask| {
                let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                g.is_independent(&members)
            })
            .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| g.weight(v)).sum())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn spec_examples() {
        let p3 = WeightedGraph::from_edges(vec![3, 5, 3], &[(0, 1), (1, 2)]).unwrap();
        let best = brute_force_max_is(&p3).unwrap();
        assert_eq!((best.members.clone(), best.weight), (vec![0, 2], 6));

        let single = WeightedGraph::from_edges(vec![7], &[]).unwrap();
        assert_eq!(brute_force_max_is(&single).unwrap().weight, 7);

        let k4 = WeightedGraph::from_edges(
            vec![1, 2, 3, 4],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let best = brute_force_max_is(&k4).unwrap();
        assert_eq!((best.members, best.weight), (vec![3], 4));
    }

    #[test]
    fn refuses_above_cap() {
        let g = WeightedGraph::from_edges(vec![1; 27], &[]).unwrap();
        assert_eq!(
            brute_force_max_is(&g),
            Err(GraphError::OracleCap { n: 27, cap: 26 })
        );
    }

    #[test]
    fn agrees_with_enumeration() {
        use crate::graph::{generate, Family, WeightModel};
        for seed in 0..60 {
            let n = 4 + (seed as usize % 11);
            let g = generate(
                Family::Gnp { n, p: 0.35 },
                WeightModel::UniformRange { lo: 0, hi: 20 },
                seed,
            )
            .unwrap();
            let best = brute_force_max_is(&g).unwrap();
            assert!(g.is_independent(&best.members));
            assert_eq!(best.weight, enumerate(&g), "seed {seed}");
        }
    }

    #[test]
    fn zero_weight_graph_has_zero_optimum() {
        let g = WeightedGraph::from_edges(vec![0; 3], &[(0, 1)]).unwrap();
        let best = brute_force_max_is(&g).unwrap();
        assert_eq!(best.weight, 0);
        assert!(g.is_independent(&best.members));
    }
}
