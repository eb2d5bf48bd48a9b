//! Common interface of the independent-set algorithms.

use thiserror::Error;

use crate::boost::StackCheck;
use crate::graph::{GraphError, NodeId, WeightedGraph};
use crate::simulator::{ExecConfig, Network, RoundStats, SimError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("residual weight of node {node} overflowed in phase {phase}")]
    Overflow { node: NodeId, phase: usize },
    #[error("phase {phase}: inner algorithm failed: {reason}")]
    InnerFailure { phase: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Invariant(String),
}

/// Input of one algorithm invocation: the subgraph induced by `nodes` with
/// signed per-node weights (indexed by dense index of the whole graph).
#[derive(Debug, Clone)]
pub struct Instance<'g> {
    pub graph: &'g WeightedGraph,
    pub nodes: Vec<usize>,
    pub weights: Vec<i64>,
}

impl<'g> Instance<'g> {
    /// All nodes with their input weights.
    pub fn full(graph: &'g WeightedGraph) -> Self {
        Self {
            graph,
            nodes: (0..graph.n()).collect(),
            weights: graph.weights().iter().map(|&w| w as i64).collect(),
        }
    }

    pub fn new(graph: &'g WeightedGraph, mut nodes: Vec<usize>, weights: Vec<i64>) -> Self {
        assert_eq!(weights.len(), graph.n());
        nodes.sort_unstable();
        nodes.dedup();
        Self { graph, nodes, weights }
    }

    /// Same weights, restricted to the nodes for which `keep` holds.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            graph: self.graph,
            nodes: self.nodes.iter().copied().filter(|&v| keep(v)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Restriction to the nodes with strictly positive weight.
    pub fn positive(&self) -> Self {
        self.filter(|v| self.weights[v] > 0)
    }

    pub fn network(&self) -> Network<'g> {
        Network::induced(self.graph, &self.nodes).with_weights(&self.weights)
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.graph.n()];
        for &v in &self.nodes {
            mask[v] = true;
        }
        mask
    }

    /// Maximum degree of the induced subgraph.
    pub fn max_degree(&self) -> usize {
        self.graph.induced_max_degree(&self.mask())
    }

    /// Sum of the positive weights of the instance nodes.
    pub fn positive_weight(&self) -> i128 {
        self.nodes
            .iter()
            .map(|&v| i128::from(self.weights[v].max(0)))
            .sum()
    }

    pub fn weight_of(&self, members: &[usize]) -> i128 {
        members.iter().map(|&v| i128::from(self.weights[v])).sum()
    }
}

/// Result of one algorithm invocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlgOutcome {
    /// Dense indices, sorted.
    pub members: Vec<usize>,
    pub stats: RoundStats,
    /// False if a black-box MIS call failed validation.
    pub mis_valid: bool,
    /// Stack-property checks of every local-ratio run involved, innermost
    /// first.
    pub stack_checks: Vec<StackCheck>,
}

/// An algorithm that returns an independent set of its instance.
pub trait MaxIsAlgorithm: Sync {
    fn name(&self) -> String;

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error>;
}

impl<A: MaxIsAlgorithm + ?Sized> MaxIsAlgorithm for &A {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        (**self).run(inst, exec, seed)
    }
}

impl<A: MaxIsAlgorithm + ?Sized> MaxIsAlgorithm for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, inst: &Instance<'_>, exec: &ExecConfig, seed: u64) -> Result<AlgOutcome, Error> {
        (**self).run(inst, exec, seed)
    }
}

/// Checks that `members` is an independent subset of the instance nodes.
pub fn validate_output(inst: &Instance<'_>, members: &[usize]) -> Result<(), String> {
    let mask = inst.mask();
    if let Some(&v) = members.iter().find(|&&v| !mask[v]) {
        return Err(format!("node {} is outside the instance", inst.graph.id(v)));
    }
    if let Some((a, b)) = inst.graph.find_conflict(members) {
        return Err(format!(
            "nodes {} and {} are adjacent",
            inst.graph.id(a),
            inst.graph.id(b)
        ));
    }
    Ok(())
}
