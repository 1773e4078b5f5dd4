//! Min-sum retrieval on bidirectional trees: a pseudo-polynomial DP over
//! discretized retrieval costs and the rounding loop that makes it an FPTAS.

use num_rational::Ratio;

use super::engine::{Engine, EngineOptions, MsrTable};
use crate::error::SolveError;
use crate::graph::VersionGraph;
use crate::solution::{evaluate, CostReport, Solution};
use crate::tree::{binarize_tree, discretize, BidirectionalTree, Discretization};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrTreeOutcome {
    pub solution: Solution,
    /// Costs on the input tree.
    pub report: CostReport,
    /// Optimal retrieval sum in ticks on the binarized, discretized tree.
    pub discretized_rho: u64,
    pub discretization: Discretization,
}

/// One DP pass: binarize, discretize retrieval with tick length
/// `eps r_max / n'^2` (`n'` the binarized node count), and return the
/// least-retrieval plan within `budget`.
///
/// The plan's true retrieval sum is at most `OPT + eps r_max`.
pub fn dp_msr_tree(t: &BidirectionalTree, budget: u64, epsilon: Ratio<u64>) -> Result<MsrTreeOutcome, SolveError> {
    let (outcome, _) = dp_msr_tree_with_table(t, budget, epsilon, false)?;
    Ok(outcome)
}

/// [`dp_msr_tree`] that can also return the DP table of the binarized tree.
pub fn dp_msr_tree_with_table(
    t: &BidirectionalTree,
    budget: u64,
    epsilon: Ratio<u64>,
    want_table: bool,
) -> Result<(MsrTreeOutcome, Option<MsrTable>), SolveError> {
    let bin = binarize_tree(t);
    let (scaled, discretization) = discretize(bin.tree.graph(), epsilon);
    let tree = bin.tree.with_graph(scaled);
    let engine = Engine::run(&tree, EngineOptions::default())?;
    let best = engine.best_within(budget).ok_or(SolveError::Infeasible)?;
    let discretized_rho = engine.root_entry(best).rho;
    let solution = bin.map_back(&engine.reconstruct(best));
    let report = evaluate(t.graph(), &solution)?;
    let table = want_table.then(|| engine.table());
    Ok((MsrTreeOutcome { solution, report, discretized_rho, discretization }, table))
}

/// Repeats a solver while neutralizing the heaviest-retrieval edge each round.
///
/// A neutralized edge `(u, v)` gets retrieval 0 and storage `s_v`; storing it
/// is then never better than materializing `v`, which is what the returned
/// plans do instead. The loop stops when the solver reports infeasibility or
/// every edge has retrieval 0, and returns the best plan on the original costs
/// (least retrieval sum, then least storage). Edges heavier than the optimum
/// are unused by an optimal plan, so some round runs with `r_max <= OPT`.
pub fn fptas_rounds<F>(g: &VersionGraph, solve: F) -> Result<(Solution, CostReport), SolveError>
where
    F: FnMut(&VersionGraph) -> Result<Solution, SolveError>,
{
    fptas_rounds_by(g, |r| r.retrieval_sum, solve)
}

/// [`fptas_rounds`] ranking plans by `objective` (then storage) instead of
/// the retrieval sum.
pub fn fptas_rounds_by<F>(
    g: &VersionGraph,
    objective: impl Fn(&CostReport) -> u64,
    mut solve: F,
) -> Result<(Solution, CostReport), SolveError>
where
    F: FnMut(&VersionGraph) -> Result<Solution, SolveError>,
{
    let mut current = g.clone();
    let mut neutral = vec![false; g.edge_count()];
    let mut best: Option<(Solution, CostReport)> = None;
    loop {
        match solve(&current) {
            Ok(sol) => {
                let mut sol = sol;
                for v in 0..sol.node_count() {
                    if let Some(u) = sol.parent(v) {
                        if neutral[g.edge_id(u, v).expect("plan edges exist")] {
                            sol.set_parent(v, None);
                        }
                    }
                }
                let report = evaluate(g, &sol)?;
                let better = best.as_ref().is_none_or(|(_, b)| {
                    (objective(&report), report.storage) < (objective(b), b.storage)
                });
                if better {
                    best = Some((sol, report));
                }
            }
            Err(SolveError::Infeasible) => break,
            Err(e) => return Err(e),
        }
        let heaviest = current
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, e)| !neutral[*i] && e.retrieval > 0)
            .max_by_key(|(i, e)| (e.retrieval, std::cmp::Reverse(*i)))
            .map(|(i, _)| i);
        let Some(id) = heaviest else { break };
        neutral[id] = true;
        let costs = g.node_costs().to_vec();
        current = current.map_edge_costs(|i, e| if i == id { (costs[e.dst], 0) } else { (e.storage, e.retrieval) });
    }
    best.ok_or(SolveError::Infeasible)
}

/// `(1 + eps)`-approximate MSR on a bidirectional tree: [`dp_msr_tree`]
/// inside [`fptas_rounds`].
pub fn dp_msr_tree_fptas(
    t: &BidirectionalTree,
    budget: u64,
    epsilon: Ratio<u64>,
) -> Result<MsrTreeOutcome, SolveError> {
    let mut last: Option<MsrTreeOutcome> = None;
    let (solution, report) = fptas_rounds(t.graph(), |g| {
        let out = dp_msr_tree(&t.with_graph(g.clone()), budget, epsilon)?;
        let sol = out.solution.clone();
        if last.as_ref().is_none_or(|l| out.discretized_rho < l.discretized_rho) {
            last = Some(out);
        }
        Ok(sol)
    })?;
    let aux = last.expect("at least one round succeeded");
    Ok(MsrTreeOutcome { solution, report, discretized_rho: aux.discretized_rho, discretization: aux.discretization })
}
