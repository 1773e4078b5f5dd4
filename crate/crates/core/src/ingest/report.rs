//! Dataset summaries and benchmark result tables.

use std::fmt::Write as _;

use crate::graph::VersionGraph;

pub const RESULTS_HEADER: &str = "algo,dataset,budget,objective,runtime_ms";

/// Integer mean rounded half up; zero for no values.
pub(crate) fn mean_half_up(values: impl IntoIterator<Item = u64>) -> u64 {
    let (sum, count) = values.into_iter().fold((0u128, 0u128), |(s, c), v| (s + u128::from(v), c + 1));
    if count == 0 {
        0
    } else {
        ((2 * sum + count) / (2 * count)) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetStats {
    pub nodes: usize,
    pub edges: usize,
    pub avg_node_cost: u64,
    /// Mean edge storage cost.
    pub avg_edge_cost: u64,
}

impl DatasetStats {
    pub fn to_csv(&self) -> String {
        format!(
            "nodes,edges,avg_node_cost,avg_edge_cost\n{},{},{},{}\n",
            self.nodes, self.edges, self.avg_node_cost, self.avg_edge_cost
        )
    }
}

pub fn stats(g: &VersionGraph) -> DatasetStats {
    DatasetStats {
        nodes: g.node_count(),
        edges: g.edge_count(),
        avg_node_cost: mean_half_up(g.node_costs().iter().copied()),
        avg_edge_cost: mean_half_up(g.edges().iter().map(|e| e.storage)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algo: String,
    pub dataset: String,
    pub budget: u64,
    /// `None` when no plan meets the budget.
    pub objective: Option<u64>,
    pub runtime_ms: f64,
}

/// CSV with [`RESULTS_HEADER`]; infeasible cells read `infeasible` and
/// runtimes carry three decimals.
pub fn write_results_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in rows {
        let objective = r.objective.map_or_else(|| "infeasible".to_string(), |o| o.to_string());
        writeln!(out, "{},{},{},{},{:.3}", r.algo, r.dataset, r.budget, objective, r.runtime_ms).unwrap();
    }
    out
}
