//! Tree DPs applied to general version graphs through an extracted
//! bidirectional tree.
//!
//! The graph is reduced to a minimum arborescence (weight `s + r`) plus the
//! reverse of every arborescence edge, solved exactly or near-exactly on that
//! tree, and the plans are mapped back to the original graph.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::arborescence::{min_arborescence, min_arborescence_edges, Weight};
use crate::error::SolveError;
use crate::graph::{NodeId, VersionGraph};
use crate::solution::{evaluate, CostReport, Solution};
use crate::tree::{binarize_tree, BidirectionalTree};
use crate::tree_dp::{dp_bmr_exact, Engine, EngineOptions, StorageBuckets};

/// A bidirectional tree taken from a graph, with the reverse deltas that had
/// to be made up.
#[derive(Debug, Clone)]
pub struct ExtractedTree {
    pub tree: BidirectionalTree,
    /// Per edge id of `tree.graph()`: the edge is absent from the source graph.
    pub synthesized: Vec<bool>,
}

impl ExtractedTree {
    /// Rewrites a plan on the tree into one on the source graph. Storing a
    /// synthesized `(v, u)` costs `s_u` with no retrieval, so it becomes
    /// materializing `u`.
    pub fn to_graph_plan(&self, sol: &Solution) -> Solution {
        let g = self.tree.graph();
        let mut out = sol.clone();
        for v in 0..sol.node_count() {
            if let Some(u) = sol.parent(v) {
                let id = g.edge_id(u, v).expect("plan uses tree edges");
                if self.synthesized[id] {
                    out.set_parent(v, None);
                }
            }
        }
        out
    }
}

/// Minimum arborescence of `g` from `root` under `s + r`, made bidirectional.
///
/// A reverse delta `(v, u)` missing from `g` is added with cost `(s_u, 0)`.
pub fn extract_bidirectional_tree(g: &VersionGraph, root: NodeId) -> Result<ExtractedTree, SolveError> {
    let chosen = min_arborescence_edges(g, root, Weight::Sum)?;
    let mut tree = VersionGraph::new(g.node_costs().to_vec());
    let mut synthesized = Vec::new();
    for id in chosen.into_iter().flatten() {
        let e = *g.edge_by_id(id);
        tree.add_edge(e.src, e.dst, e.storage, e.retrieval)?;
        synthesized.push(false);
        match g.edge(e.dst, e.src) {
            Some(back) => {
                tree.add_edge(back.src, back.dst, back.storage, back.retrieval)?;
                synthesized.push(false);
            }
            None => {
                tree.add_edge(e.dst, e.src, g.node_cost(e.src), 0)?;
                synthesized.push(true);
            }
        }
    }
    Ok(ExtractedTree { tree: BidirectionalTree::new(tree, root)?, synthesized })
}

/// A plan together with its exact costs on the source graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierPoint {
    pub storage: u64,
    pub retrieval_sum: u64,
    pub solution: Solution,
}

/// Storage/retrieval-sum trade-off curve: storage ascending, retrieval sum
/// strictly descending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frontier {
    pub points: Vec<FrontierPoint>,
}

impl Frontier {
    /// Keeps the non-dominated points of `points`.
    pub fn from_points(mut points: Vec<FrontierPoint>) -> Self {
        points.sort_by_key(|p| (p.storage, p.retrieval_sum));
        let mut out: Vec<FrontierPoint> = Vec::new();
        for p in points {
            if out.last().is_none_or(|last| p.retrieval_sum < last.retrieval_sum) {
                out.push(p);
            }
        }
        Self { points: out }
    }

    /// Least-retrieval point within the storage budget.
    pub fn best_within(&self, budget: u64) -> Option<&FrontierPoint> {
        self.points.iter().take_while(|p| p.storage <= budget).last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("storage,retrieval_sum\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.storage, p.retrieval_sum);
        }
        out
    }
}

/// MSR heuristic: the storage/retrieval frontier DP on the extracted tree.
///
/// `epsilon` buckets partial-plan storage geometrically with ratio `1 + eps`
/// from the smallest positive cost of the tree; `None` keeps storage exact.
/// `prune_factor` drops partial plans storing more than that multiple of the
/// least storage any plan of `g` needs; `None` keeps everything. Every point
/// is re-evaluated on `g`.
pub fn dp_msr_heuristic(
    g: &VersionGraph,
    root: NodeId,
    epsilon: Option<Ratio<u64>>,
    prune_factor: Option<Ratio<u64>>,
) -> Result<Frontier, SolveError> {
    if let Some(f) = prune_factor {
        if f < Ratio::from_integer(1) {
            return Err(SolveError::InvalidInput(format!("prune factor {f} is below 1")));
        }
    }
    let ext = extract_bidirectional_tree(g, root)?;
    let bin = binarize_tree(&ext.tree);

    let prune_above = match prune_factor {
        None => None,
        Some(f) => {
            let least = evaluate(g, &min_arborescence(&g.extended(), Weight::Storage)?)?.storage;
            let limit = least as u128 * *f.numer() as u128 / *f.denom() as u128;
            Some(u64::try_from(limit).unwrap_or(u64::MAX))
        }
    };
    let storage_bucket = epsilon.map(|eps| {
        let tg = bin.tree.graph();
        let base = tg
            .node_costs()
            .iter()
            .copied()
            .chain(tg.edges().iter().map(|e| e.storage))
            .filter(|&c| c > 0)
            .min()
            .unwrap_or(1);
        StorageBuckets { ratio: 1.0 + *eps.numer() as f64 / *eps.denom() as f64, base }
    });

    let engine = Engine::run(&bin.tree, EngineOptions { storage_bucket, prune_above })?;
    let mut points = Vec::new();
    for i in engine.root_frontier() {
        let solution = ext.to_graph_plan(&bin.map_back(&engine.reconstruct(i)));
        let report = evaluate(g, &solution)?;
        points.push(FrontierPoint { storage: report.storage, retrieval_sum: report.retrieval_sum, solution });
    }
    if points.is_empty() {
        return Err(SolveError::Infeasible);
    }
    Ok(Frontier::from_points(points))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicPlan {
    pub solution: Solution,
    pub report: CostReport,
}

/// BMR heuristic: the exact tree DP on the extracted tree.
pub fn dp_bmr_heuristic(g: &VersionGraph, root: NodeId, max_retrieval: u64) -> Result<HeuristicPlan, SolveError> {
    let ext = extract_bidirectional_tree(g, root)?;
    let out = dp_bmr_exact(&ext.tree, max_retrieval)?;
    let solution = ext.to_graph_plan(&out.solution);
    let report = evaluate(g, &solution)?;
    Ok(HeuristicPlan { solution, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> VersionGraph {
        let mut g = VersionGraph::new(vec![1000, 10, 100]);
        g.add_edge(0, 1, 9, 9).unwrap();
        g.add_edge(1, 2, 90, 90).unwrap();
        g
    }

    #[test]
    fn tree_input_is_kept() {
        let mut g = VersionGraph::new(vec![5, 6, 7]);
        for (u, v) in [(0, 1), (0, 2)] {
            g.add_edge(u, v, 2, 3).unwrap();
            g.add_edge(v, u, 4, 1).unwrap();
        }
        let ext = extract_bidirectional_tree(&g, 0).unwrap();
        let mut a: Vec<_> = ext.tree.graph().edges().to_vec();
        let mut b: Vec<_> = g.edges().to_vec();
        a.sort_by_key(|e| (e.src, e.dst));
        b.sort_by_key(|e| (e.src, e.dst));
        assert_eq!(a, b);
        assert!(ext.synthesized.iter().all(|&s| !s));
    }

    #[test]
    fn shortcut_loses_on_weight() {
        // 0 -> 1 -> 2 weighs 2 + 2, the shortcut 0 -> 2 weighs 10
        let mut g = VersionGraph::new(vec![50, 50, 50]);
        g.add_edge(0, 1, 1, 1).unwrap();
        g.add_edge(1, 2, 1, 1).unwrap();
        g.add_edge(0, 2, 5, 5).unwrap();
        let ext = extract_bidirectional_tree(&g, 0).unwrap();
        assert!(ext.tree.graph().edge(0, 2).is_none());
        assert_eq!(ext.tree.tree_parent(2), Some(1));
    }

    #[test]
    fn missing_reverse_is_materialization() {
        let ext = extract_bidirectional_tree(&chain3(), 0).unwrap();
        let back = ext.tree.graph().edge(1, 0).unwrap();
        assert_eq!((back.storage, back.retrieval), (1000, 0));
        assert_eq!(ext.synthesized.iter().filter(|&&s| s).count(), 2);

        let plan = ext.to_graph_plan(&Solution::new(vec![Some(1), None, Some(1)]));
        assert_eq!(plan, Solution::new(vec![None, None, Some(1)]));
    }

    #[test]
    fn chain_frontier_reaches_optimum() {
        let g = chain3();
        let f = dp_msr_heuristic(&g, 0, Some(Ratio::new(1, 20)), Some(Ratio::from_integer(2))).unwrap();
        assert_eq!(f.best_within(1109).unwrap().retrieval_sum, 9);
        assert_eq!(f.best_within(1110).unwrap().retrieval_sum, 0);
        assert!(f.best_within(1098).is_none());
        assert!(f.to_csv().starts_with("storage,retrieval_sum\n1099,108\n"));
        for w in f.points.windows(2) {
            assert!(w[0].storage < w[1].storage && w[0].retrieval_sum > w[1].retrieval_sum);
        }
    }

    #[test]
    fn prune_factor_below_one_rejected() {
        let res = dp_msr_heuristic(&chain3(), 0, None, Some(Ratio::new(1, 2)));
        assert!(matches!(res, Err(SolveError::InvalidInput(_))));
    }

    #[test]
    fn bmr_zero_budget_materializes_everything() {
        let plan = dp_bmr_heuristic(&chain3(), 0, 0).unwrap();
        assert_eq!(plan.report.storage, 1110);
        let plan = dp_bmr_heuristic(&chain3(), 0, 99).unwrap();
        assert_eq!(plan.report.storage, 1099);
    }

    #[test]
    fn unreachable_root_reported() {
        let g = chain3();
        assert!(matches!(extract_bidirectional_tree(&g, 2), Err(SolveError::UnreachableNode(_))));
    }
}
