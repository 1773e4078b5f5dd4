//! Storage/retrieval trade-offs for collections of versioned artifacts.
//!
//! Versions form a directed graph: materializing node `v` costs `s_v` bytes,
//! and a stored delta `(u, v)` costs `s_e` bytes and `r_e` retrieval time.
//! A plan picks, for every version, materialization or one parent delta; the
//! four problems trade total storage against total or maximum retrieval.

pub mod arborescence;
pub mod error;
pub mod extracted;
pub mod graph;
pub mod greedy;
pub mod ingest;
pub mod oracle;
pub mod rational;
pub mod solution;
pub mod tree;
pub mod tree_dp;
pub mod treewidth;

pub use error::SolveError;
pub use graph::{Edge, ExtendedGraph, GraphError, NodeId, VersionGraph};
pub use solution::{evaluate, CostReport, Problem, ProblemSpec, Solution};
