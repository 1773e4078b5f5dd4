use thiserror::Error;

use crate::graph::{GraphError, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no solution satisfies the bound")]
    Infeasible,
    #[error("node {0} is unreachable from the root")]
    UnreachableNode(NodeId),
    #[error("instance has {n} nodes; the limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("not a bidirectional tree: {0}")]
    NotATree(String),
    #[error("decomposition width {width} exceeds the limit {limit}")]
    WidthExceeded { width: usize, limit: usize },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("ancestor relation of the state is cyclic")]
    CyclicAnc,
    #[error("DP table grew past {limit} states")]
    StateLimit { limit: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
