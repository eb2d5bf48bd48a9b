//! Distributed approximation algorithms for maximum-weight independent set,
//! executed on a round-synchronous CONGEST/LOCAL simulator.

pub mod algorithm;
pub mod approx;
pub mod arb;
pub mod boost;
pub mod corpus;
pub mod experiment;
pub mod graph;
pub mod lowerbound;
pub mod mis;
pub mod parallel;
pub mod ranking;
pub mod rng;
pub mod simulator;
pub mod sparsify;
pub mod suite;
