//! Dataset construction: edge-list files, git history dumps, synthetic
//! transforms, ILP export and result tables.

pub mod edge_list;
pub mod git;
pub mod ilp;
pub mod report;
pub mod synth;

use std::io;

use thiserror::Error;

use crate::graph::NodeId;

pub use edge_list::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list};
pub use git::{ingest_git, Commit, CommitDump, Delta, IngestedHistory};
pub use ilp::{export_ilp, write_ilp};
pub use report::{stats, write_results_csv, DatasetStats, ResultRow, RESULTS_HEADER};
pub use synth::{adversarial_chain, er_construction, random_compression, uniform_delta, DatasetRng};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: node {id} declared twice")]
    DuplicateNode { line: usize, id: NodeId },
    #[error("line {line}: duplicate edge {src} -> {dst}")]
    DuplicateEdge { line: usize, src: NodeId, dst: NodeId },
    #[error("line {line}: node {id} is not declared")]
    UnknownNode { line: usize, id: NodeId },
    #[error("node ids must be 0..{count}; {missing} is missing")]
    SparseIds { count: usize, missing: NodeId },
    #[error("commit {0} is listed twice")]
    DuplicateCommit(String),
    #[error("unknown commit {0}")]
    UnknownCommit(String),
    #[error("commit history has a cycle through {0}")]
    CyclicHistory(String),
    #[error("no delta from {from} to {to}")]
    MissingDelta { from: String, to: String },
    #[error("delta {from} -> {to} is listed twice or joins commits that are not parent and child")]
    UnexpectedDelta { from: String, to: String },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}
