//! Exhaustive reference solver for small instances.
//!
//! Every node picks one of its in-edges or materialization; cyclic choices are
//! discarded and the rest are scored directly.

use crate::error::SolveError;
use crate::graph::{GraphError, NodeId, VersionGraph};
use crate::solution::{evaluate_counted, CostReport, ProblemSpec, Solution};

pub const DEFAULT_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub objective: u64,
    pub solution: Solution,
    pub report: CostReport,
}

/// Walks every acyclic storage plan of a graph in lexicographic order of the
/// per-node choice vector (0 = materialize, `i` = the `i`-th in-edge).
pub struct SolutionEnumerator {
    parents: Vec<Vec<Option<NodeId>>>,
    choice: Vec<usize>,
    done: bool,
}

impl SolutionEnumerator {
    pub fn new(g: &VersionGraph, limit: usize) -> Result<Self, SolveError> {
        let n = g.node_count();
        if n > limit {
            return Err(SolveError::TooLarge { n, limit });
        }
        let parents = (0..n)
            .map(|v| {
                let mut opts = vec![None];
                let mut srcs: Vec<NodeId> = g.in_edges(v).map(|e| e.src).collect();
                srcs.sort_unstable();
                opts.extend(srcs.into_iter().map(Some));
                opts
            })
            .collect();
        Ok(Self { parents, choice: vec![0; n], done: false })
    }

    fn advance(&mut self) {
        for v in (0..self.choice.len()).rev() {
            self.choice[v] += 1;
            if self.choice[v] < self.parents[v].len() {
                return;
            }
            self.choice[v] = 0;
        }
        self.done = true;
    }

    fn current(&self) -> Solution {
        Solution::new(self.choice.iter().enumerate().map(|(v, &c)| self.parents[v][c]).collect())
    }

    fn is_acyclic(&self, sol: &Solution) -> bool {
        let n = sol.node_count();
        let mut state = vec![0u8; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            loop {
                match state[v] {
                    1 => return false,
                    2 => break,
                    _ => {}
                }
                state[v] = 1;
                path.push(v);
                match sol.parent(v) {
                    Some(u) => v = u,
                    None => break,
                }
            }
            for w in path {
                state[w] = 2;
            }
        }
        true
    }
}

impl Iterator for SolutionEnumerator {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        while !self.done {
            let sol = self.current();
            self.advance();
            if self.is_acyclic(&sol) {
                return Some(sol);
            }
        }
        None
    }
}

/// Optimal plan for `spec`. Ties on the objective go to the lower secondary
/// cost (storage for retrieval objectives, total retrieval otherwise), then to
/// the first plan in enumeration order.
pub fn brute_force(g: &VersionGraph, spec: &ProblemSpec, limit: usize) -> Result<OracleResult, SolveError> {
    brute_force_counted(g, spec, limit, None)
}

/// [`brute_force`] where only nodes flagged in `counted` enter retrieval objectives.
pub fn brute_force_counted(
    g: &VersionGraph,
    spec: &ProblemSpec,
    limit: usize,
    counted: Option<&[bool]>,
) -> Result<OracleResult, SolveError> {
    let mut best: Option<((u64, u64), Solution, CostReport)> = None;
    for sol in SolutionEnumerator::new(g, limit)? {
        let report = match evaluate_counted(g, &sol, counted) {
            Ok(r) => r,
            Err(GraphError::Overflow) => return Err(GraphError::Overflow.into()),
            Err(e) => unreachable!("enumerated plan is malformed: {e}"),
        };
        if !spec.is_satisfied(&report) {
            continue;
        }
        let secondary = if spec.problem.bounds_storage() { report.storage } else { report.retrieval_sum };
        let key = (spec.objective(&report), secondary);
        if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
            best = Some((key, sol, report));
        }
    }
    let ((objective, _), solution, report) = best.ok_or(SolveError::Infeasible)?;
    Ok(OracleResult { objective, solution, report })
}
