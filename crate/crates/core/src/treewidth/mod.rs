//! MSR and MMR on graphs of bounded treewidth.
//!
//! The underlying undirected graph gets a nice tree decomposition; a DP over
//! its bags with discretized retrieval gives one near-optimal pass, and the
//! same neutralization rounds as on trees turn that into a `(1 + eps)`
//! approximation.

pub mod decomposition;
pub mod dp;
pub mod ops;

use num_rational::Ratio;

pub use decomposition::{
    build_decomposition, make_nice, min_degree_decomposition, validate, validate_nice, Bag, BagKind,
    TreeDecomposition,
};
pub use dp::{BtwRun, Mode, RecordedState, StateParent};

use crate::error::SolveError;
use crate::graph::VersionGraph;
use crate::solution::{evaluate, CostReport, Solution};
use crate::tree::discretize;
use crate::tree_dp::fptas_rounds_by;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BtwOptions {
    pub epsilon: Ratio<u64>,
    /// Largest decomposition width accepted.
    pub k_max: usize,
    /// Most partial plans stored at one bag.
    pub state_limit: usize,
}

impl Default for BtwOptions {
    fn default() -> Self {
        Self { epsilon: Ratio::new(1, 4), k_max: 3, state_limit: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BtwOutcome {
    pub solution: Solution,
    pub report: CostReport,
    /// Width of the decomposition used.
    pub width: usize,
}

fn solve(
    g: &VersionGraph,
    decomposition: Option<&TreeDecomposition>,
    budget: u64,
    opts: &BtwOptions,
    mode: Mode,
) -> Result<BtwOutcome, SolveError> {
    let nice = build_decomposition(g, decomposition)?;
    let width = nice.width();
    if width > opts.k_max {
        return Err(SolveError::WidthExceeded { width, limit: opts.k_max });
    }
    let objective = match mode {
        Mode::Sum => |r: &CostReport| r.retrieval_sum,
        Mode::Max => |r: &CostReport| r.retrieval_max,
    };
    let (solution, report) = fptas_rounds_by(g, objective, |current| {
        let (scaled, _) = discretize(current, opts.epsilon);
        let run = BtwRun::new(&scaled, &nice, mode, opts.state_limit)?;
        run.best_within(budget).map(|(_, sol)| sol).ok_or(SolveError::Infeasible)
    })?;
    debug_assert_eq!(evaluate(g, &solution).ok().as_ref(), Some(&report));
    Ok(BtwOutcome { solution, report, width })
}

/// `(1 + eps)`-approximate MSR. Without `decomposition` one is computed by
/// min-degree elimination.
pub fn dp_msr_btw(
    g: &VersionGraph,
    decomposition: Option<&TreeDecomposition>,
    budget: u64,
    opts: &BtwOptions,
) -> Result<BtwOutcome, SolveError> {
    solve(g, decomposition, budget, opts, Mode::Sum)
}

/// `(1 + eps)`-approximate MMR on the same decomposition machinery.
pub fn dp_mmr_btw(
    g: &VersionGraph,
    decomposition: Option<&TreeDecomposition>,
    budget: u64,
    opts: &BtwOptions,
) -> Result<BtwOutcome, SolveError> {
    solve(g, decomposition, budget, opts, Mode::Max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force, DEFAULT_LIMIT};
    use crate::solution::{Problem, ProblemSpec};

    /// 4-cycle 0-1-2-3 with both directions, plus a cheap chord 0 -> 2.
    fn cycle_with_chord() -> VersionGraph {
        let mut g = VersionGraph::new(vec![100, 90, 80, 95]);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            g.add_edge(u, v, 20, 7).unwrap();
            g.add_edge(v, u, 25, 9).unwrap();
        }
        g.add_edge(0, 2, 5, 3).unwrap();
        g
    }

    #[test]
    fn cycle_matches_oracle() {
        let g = cycle_with_chord();
        let opts = BtwOptions::default();
        for budget in [170, 190, 220, 260, 300, 365] {
            let spec = ProblemSpec::new(Problem::Msr, budget);
            let oracle = brute_force(&g, &spec, DEFAULT_LIMIT).unwrap();
            let out = dp_msr_btw(&g, None, budget, &opts).unwrap();
            assert!(out.report.storage <= budget);
            assert!(4 * out.report.retrieval_sum <= 5 * oracle.objective, "budget {budget}");

            let spec = ProblemSpec::new(Problem::Mmr, budget);
            let oracle = brute_force(&g, &spec, DEFAULT_LIMIT).unwrap();
            let out = dp_mmr_btw(&g, None, budget, &opts).unwrap();
            assert!(out.report.storage <= budget);
            assert!(4 * out.report.retrieval_max <= 5 * oracle.objective, "budget {budget}");
        }
    }

    #[test]
    fn full_budget_needs_no_retrieval() {
        let g = cycle_with_chord();
        let all: u64 = g.node_costs().iter().sum();
        assert_eq!(dp_msr_btw(&g, None, all, &BtwOptions::default()).unwrap().report.retrieval_sum, 0);
        assert_eq!(dp_mmr_btw(&g, None, all, &BtwOptions::default()).unwrap().report.retrieval_max, 0);
    }

    #[test]
    fn width_limit_enforced() {
        let mut g = VersionGraph::new(vec![1; 5]);
        for u in 0..5 {
            for v in u + 1..5 {
                g.add_edge(u, v, 1, 1).unwrap();
            }
        }
        let res = dp_msr_btw(&g, None, 5, &BtwOptions::default());
        assert_eq!(res, Err(SolveError::WidthExceeded { width: 4, limit: 3 }));
    }

    #[test]
    fn tiny_budget_is_infeasible() {
        let g = cycle_with_chord();
        assert_eq!(dp_msr_btw(&g, None, 10, &BtwOptions::default()), Err(SolveError::Infeasible));
    }
}
