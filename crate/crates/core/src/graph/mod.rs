//! Node-weighted undirected graphs.
//!
//! Nodes are stored densely (`0..n`) and carry an external identifier. All
//! algorithms work on dense indices; identifiers are what nodes see of each
//! other inside the simulator and what the text format stores.

mod generate;
mod io;
mod oracle;

use std::collections::HashMap;

use thiserror::Error;

pub use generate::{generate, Family, WeightModel};
pub use io::{load, save};
pub use oracle::{brute_force_max_is, brute_force_max_is_with_cap, DEFAULT_ORACLE_CAP};

/// External node identifier.
pub type NodeId = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node identifier {0}")]
    DuplicateId(NodeId),
    #[error("edge references unknown node identifier {0}")]
    UnknownId(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {id} has negative weight {weight}")]
    NegativeWeight { id: NodeId, weight: i128 },
    #[error("total node weight exceeds {}", i64::MAX)]
    WeightOverflow,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("graph has {n} nodes, above the oracle cap of {cap}")]
    OracleCap { n: usize, cap: usize },
}

/// Undirected graph with non-negative integer node weights.
///
/// Adjacency lists are sorted, symmetric, loop-free and duplicate-free. The
/// total weight fits in an `i64`, so every subset sum and every residual
/// update starting from these weights can be carried out in signed 64-bit
/// arithmetic with explicit overflow checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    ids: Vec<NodeId>,
    weights: Vec<u64>,
    adj: Vec<Vec<usize>>,
    index: HashMap<NodeId, usize>,
    edges: usize,
}

impl WeightedGraph {
    /// Builds a graph with identifiers `0..weights.len()`.
    pub fn from_edges(weights: Vec<u64>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let ids = (0..weights.len() as NodeId).collect();
        Self::with_ids(ids, weights, edges)
    }

    /// Builds a graph from explicit identifiers. `edges` use dense indices.
    pub fn with_ids(
        ids: Vec<NodeId>,
        weights: Vec<u64>,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        assert_eq!(ids.len(), weights.len(), "one weight per node");
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, &id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
        }
        let mut total: i64 = 0;
        for &w in &weights {
            total = i64::try_from(w)
                .ok()
                .and_then(|w| total.checked_add(w))
                .ok_or(GraphError::WeightOverflow)?;
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u == v {
                return Err(GraphError::SelfLoop(ids[u]));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(ids[u], ids[w[0]]));
            }
        }
        Ok(Self {
            ids,
            weights,
            adj,
            index,
            edges: edges.len(),
        })
    }

    /// Same topology and identifiers, new weights.
    pub fn reweighted(&self, weights: Vec<u64>) -> Result<Self, GraphError> {
        Self::with_ids(self.ids.clone(), weights, &self.edge_list())
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.edges
    }

    pub fn id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// `w(V)`.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// `w(S)` for a set of dense indices.
    pub fn weight_of(&self, nodes: &[usize]) -> u64 {
        nodes.iter().map(|&v| self.weights[v]).sum()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    /// Maximum degree of the subgraph induced by `mask`.
    pub fn induced_max_degree(&self, mask: &[bool]) -> usize {
        (0..self.n())
            .filter(|&v| mask[v])
            .map(|v| self.adj[v].iter().filter(|&&u| mask[u]).count())
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n()
    }

    /// Checks that no two members are adjacent. Returns the first conflicting
    /// pair if there is one.
    pub fn find_conflict(&self, members: &[usize]) -> Option<(usize, usize)> {
        let mut inside = vec![false; self.n()];
        for &v in members {
            inside[v] = true;
        }
        members
            .iter()
            .find_map(|&v| self.adj[v].iter().find(|&&u| inside[u]).map(|&u| (v, u)))
    }

    pub fn is_independent(&self, members: &[usize]) -> bool {
        self.find_conflict(members).is_none()
    }

    /// Graph degeneracy via minimum-degree peeling with bucket queues.
    pub fn degeneracy(&self) -> usize {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let max = self.max_degree();
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max + 1];
        for v in 0..n {
            buckets[deg[v]].push(v);
        }
        let mut removed = vec![false; n];
        let mut best = 0;
        let mut cursor = 0;
        for _ in 0..n {
            // Lazy deletion: stale bucket entries are skipped.
            let v = loop {
                while buckets[cursor].is_empty() {
                    cursor += 1;
                }
                let v = buckets[cursor].pop().unwrap();
                if !removed[v] && deg[v] == cursor {
                    break v;
                }
            };
            removed[v] = true;
            best = best.max(cursor);
            for &u in &self.adj[v] {
                if !removed[u] {
                    deg[u] -= 1;
                    buckets[deg[u]].push(u);
                    cursor = cursor.min(deg[u]);
                }
            }
        }
        best
    }
}

/// A set of nodes together with its total input weight.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndependentSet {
    /// Dense node indices, sorted ascending.
    pub members: Vec<usize>,
    pub weight: u64,
}

impl IndependentSet {
    pub fn new(g: &WeightedGraph, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        let weight = g.weight_of(&members);
        Self { members, weight }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn ids(&self, g: &WeightedGraph) -> Vec<NodeId> {
        self.members.iter().map(|&v| g.id(v)).collect()
    }
}
