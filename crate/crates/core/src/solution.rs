//! Storage plans, their costs, and the four problem formulations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, NodeId, VersionGraph};

/// A storage plan: every version is either materialized or rebuilt from one parent.
///
/// Equivalently an arborescence of the extended graph rooted at the auxiliary
/// root, where materialized nodes hang directly off the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution {
    parent: Vec<Option<NodeId>>,
}

impl Solution {
    pub fn new(parent: Vec<Option<NodeId>>) -> Self {
        Self { parent }
    }

    pub fn all_materialized(n: usize) -> Self {
        Self { parent: vec![None; n] }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn set_parent(&mut self, v: NodeId, p: Option<NodeId>) {
        self.parent[v] = p;
    }

    pub fn is_materialized(&self, v: NodeId) -> bool {
        self.parent[v].is_none()
    }

    pub fn materialized(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none())
    }

    /// Stored deltas as `(src, dst)` pairs.
    pub fn stored_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|u| (u, v)))
    }

    /// Children lists of the retrieval forest.
    pub fn children(&self) -> Vec<Vec<NodeId>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (u, v) in self.stored_edges() {
            ch[u].push(v);
        }
        ch
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub storage: u64,
    /// Per-node retrieval cost `R(v)`.
    pub retrieval: Vec<u64>,
    pub retrieval_sum: u64,
    pub retrieval_max: u64,
}

/// Checks that a plan is well formed and computes its costs.
pub fn evaluate(g: &VersionGraph, sol: &Solution) -> Result<CostReport, GraphError> {
    evaluate_counted(g, sol, None)
}

/// [`evaluate`], but only nodes with `counted[v]` contribute to the retrieval
/// sum and maximum (per-node costs are still reported for all).
pub fn evaluate_counted(
    g: &VersionGraph,
    sol: &Solution,
    counted: Option<&[bool]>,
) -> Result<CostReport, GraphError> {
    let n = g.node_count();
    if sol.node_count() != n {
        return Err(GraphError::SolutionSize { expected: n, found: sol.node_count() });
    }
    let mut storage: u64 = 0;
    let mut edge_r = vec![0u64; n];
    for v in 0..n {
        let cost = match sol.parent(v) {
            None => g.node_cost(v),
            Some(u) => {
                if u >= n {
                    return Err(GraphError::UnknownNode(u));
                }
                let e = g.edge(u, v).ok_or(GraphError::MissingEdge(u, v))?;
                edge_r[v] = e.retrieval;
                e.storage
            }
        };
        storage = storage.checked_add(cost).ok_or(GraphError::Overflow)?;
    }

    // 0 = unseen, 1 = on the current chain, 2 = resolved
    let mut state = vec![0u8; n];
    let mut retrieval = vec![0u64; n];
    let mut chain = Vec::new();
    for start in 0..n {
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            chain.push(v);
            match sol.parent(v) {
                Some(u) => v = u,
                None => break,
            }
        }
        if state[v] == 1 && sol.parent(v).is_some() {
            return Err(GraphError::CyclicSolution(v));
        }
        while let Some(w) = chain.pop() {
            retrieval[w] = match sol.parent(w) {
                None => 0,
                Some(u) => retrieval[u].checked_add(edge_r[w]).ok_or(GraphError::Overflow)?,
            };
            state[w] = 2;
        }
    }

    let mut retrieval_sum: u64 = 0;
    let mut retrieval_max = 0;
    for v in 0..n {
        if counted.is_none_or(|c| c[v]) {
            retrieval_sum = retrieval_sum.checked_add(retrieval[v]).ok_or(GraphError::Overflow)?;
            retrieval_max = retrieval_max.max(retrieval[v]);
        }
    }
    Ok(CostReport { storage, retrieval, retrieval_sum, retrieval_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Minimize total retrieval under a storage budget.
    Msr,
    /// Minimize maximum retrieval under a storage budget.
    Mmr,
    /// Minimize storage under a total-retrieval bound.
    Bsr,
    /// Minimize storage under a maximum-retrieval bound.
    Bmr,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Msr, Problem::Mmr, Problem::Bsr, Problem::Bmr];

    /// True when the bound caps storage and the objective is a retrieval cost.
    pub fn bounds_storage(self) -> bool {
        matches!(self, Problem::Msr | Problem::Mmr)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Msr => "msr",
            Problem::Mmr => "mmr",
            Problem::Bsr => "bsr",
            Problem::Bmr => "bmr",
        })
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "msr" => Ok(Problem::Msr),
            "mmr" => Ok(Problem::Mmr),
            "bsr" => Ok(Problem::Bsr),
            "bmr" => Ok(Problem::Bmr),
            other => Err(format!("unknown problem `{other}`")),
        }
    }
}

/// A problem together with its numeric bound (storage budget or retrieval cap).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub bound: u64,
}

impl ProblemSpec {
    pub fn new(problem: Problem, bound: u64) -> Self {
        Self { problem, bound }
    }

    pub fn is_satisfied(&self, report: &CostReport) -> bool {
        match self.problem {
            Problem::Msr | Problem::Mmr => report.storage <= self.bound,
            Problem::Bsr => report.retrieval_sum <= self.bound,
            Problem::Bmr => report.retrieval_max <= self.bound,
        }
    }

    pub fn objective(&self, report: &CostReport) -> u64 {
        match self.problem {
            Problem::Msr => report.retrieval_sum,
            Problem::Mmr => report.retrieval_max,
            Problem::Bsr | Problem::Bmr => report.storage,
        }
    }
}

pub fn check_feasible(g: &VersionGraph, sol: &Solution, spec: &ProblemSpec) -> Result<bool, GraphError> {
    Ok(spec.is_satisfied(&evaluate(g, sol)?))
}
