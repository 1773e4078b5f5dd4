//! Exact minimum storage under a maximum-retrieval bound on bidirectional trees.

use std::fmt::Write as _;

use super::search::dual_binary_search;
use crate::error::SolveError;
use crate::graph::{GraphError, NodeId};
use crate::solution::{evaluate, CostReport, Solution};
use crate::tree::BidirectionalTree;

const INF: u64 = u64::MAX;

fn add(a: u64, b: u64) -> Result<u64, SolveError> {
    if a == INF || b == INF {
        return Ok(INF);
    }
    match a.checked_add(b) {
        Some(s) if s != INF => Ok(s),
        _ => Err(GraphError::Overflow.into()),
    }
}

/// `dp[v][u]`: least storage for the subtree of `v` when `v` is retrieved from
/// `u` (materialized when `u == v`). `opt[v]` minimizes over `u` in the subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmrTable {
    pub dp: Vec<Vec<u64>>,
    pub opt: Vec<u64>,
    arg_opt: Vec<NodeId>,
}

impl BmrTable {
    pub fn is_finite(&self, v: NodeId, u: NodeId) -> bool {
        self.dp[v][u] != INF
    }

    /// `v,u,dp` for every finite entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,u,dp\n");
        for (v, row) in self.dp.iter().enumerate() {
            for (u, &x) in row.iter().enumerate().filter(|(_, &x)| x != INF) {
                let _ = writeln!(out, "{v},{u},{x}");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmrOutcome {
    pub solution: Solution,
    pub report: CostReport,
    pub table: BmrTable,
}

/// Pairwise path data: `dist[u][v]` is the retrieval cost of the tree path
/// `u -> v`, `toward[v][u]` the neighbour of `v` on that path.
struct Paths {
    dist: Vec<Vec<u64>>,
    toward: Vec<Vec<NodeId>>,
}

fn all_paths(t: &BidirectionalTree) -> Result<Paths, SolveError> {
    let n = t.node_count();
    let mut dist = vec![vec![0u64; n]; n];
    let mut toward = vec![vec![usize::MAX; n]; n];
    for u in 0..n {
        let mut stack = vec![u];
        let mut seen = vec![false; n];
        seen[u] = true;
        toward[u][u] = u;
        while let Some(x) = stack.pop() {
            for e in t.graph().out_edges(x) {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    dist[u][e.dst] = dist[u][x].checked_add(e.retrieval).ok_or(GraphError::Overflow)?;
                    toward[e.dst][u] = x;
                    stack.push(e.dst);
                }
            }
        }
    }
    Ok(Paths { dist, toward })
}

/// Exact BMR on a bidirectional tree: the least-storage plan in which every
/// version is retrievable within `max_retrieval`.
pub fn dp_bmr_exact(t: &BidirectionalTree, max_retrieval: u64) -> Result<BmrOutcome, SolveError> {
    let n = t.node_count();
    let paths = all_paths(t)?;
    let order = t.preorder();
    let mut tin = vec![0; n];
    let mut tout = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        tin[v] = i;
    }
    for &v in order.iter().rev() {
        tout[v] = t.children(v).iter().map(|&c| tout[c]).max().unwrap_or(tin[v] + 1);
    }
    let in_subtree = |u: NodeId, w: NodeId| tin[w] <= tin[u] && tin[u] < tout[w];

    let mut dp = vec![vec![INF; n]; n];
    let mut opt = vec![INF; n];
    let mut arg_opt = vec![0; n];
    for &v in order.iter().rev() {
        for u in 0..n {
            if paths.dist[u][v] > max_retrieval {
                continue;
            }
            let mut total = if u == v {
                t.graph().node_cost(v)
            } else {
                t.edge(paths.toward[v][u], v).storage
            };
            for &w in t.children(v) {
                let part = if in_subtree(u, w) { dp[w][u] } else { opt[w].min(dp[w][u]) };
                total = add(total, part)?;
            }
            dp[v][u] = total;
        }
        let best = order[tin[v]..tout[v]]
            .iter()
            .copied()
            .min_by_key(|&w| (dp[v][w], w))
            .expect("subtree contains v");
        opt[v] = dp[v][best];
        arg_opt[v] = best;
    }

    let root = t.root();
    if opt[root] == INF {
        return Err(SolveError::Infeasible);
    }
    let mut parent = vec![None; n];
    let mut stack = vec![(root, arg_opt[root])];
    while let Some((v, u)) = stack.pop() {
        parent[v] = (u != v).then(|| paths.toward[v][u]);
        for &w in t.children(v) {
            let src = if in_subtree(u, w) || dp[w][u] < opt[w] { u } else { arg_opt[w] };
            stack.push((w, src));
        }
    }
    let solution = Solution::new(parent);
    let report = evaluate(t.graph(), &solution)?;
    debug_assert_eq!(report.storage, opt[root]);
    debug_assert!(report.retrieval_max <= max_retrieval);
    Ok(BmrOutcome { solution, report, table: BmrTable { dp, opt, arg_opt } })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmrOutcome {
    pub solution: Solution,
    pub report: CostReport,
    /// Number of BMR solves the search made.
    pub calls: usize,
}

/// MMR on a bidirectional tree: binary search over the retrieval bound in
/// `[0, n r_max]` with [`dp_bmr_exact`] as the inner solver.
pub fn mmr_via_bmr(t: &BidirectionalTree, budget: u64) -> Result<MmrOutcome, SolveError> {
    let hi = (t.node_count() as u64).checked_mul(t.graph().max_retrieval()).ok_or(GraphError::Overflow)?;
    let found = dual_binary_search(0, hi, budget, |bound| {
        let out = dp_bmr_exact(t, bound)?;
        Ok(Some((out.report.storage, out)))
    })?;
    let out = found.value;
    Ok(MmrOutcome { solution: out.solution, report: out.report, calls: found.calls })
}
