//! Greedy heuristics: local move greedy (LMG), its all-edges variant, and a
//! Prim-style baseline for the bounded-max-retrieval problem.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::arborescence::{min_arborescence, Weight};
use crate::error::SolveError;
use crate::graph::{NodeId, VersionGraph};
use crate::solution::{evaluate, CostReport, Solution};

/// Retrieval saved per unit of extra storage, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho {
    Finite { num: u128, den: u128 },
    /// The move does not cost storage and strictly lowers retrieval.
    Infinite,
}

impl Ord for Rho {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rho::Infinite, Rho::Infinite) => Ordering::Equal,
            (Rho::Infinite, _) => Ordering::Greater,
            (_, Rho::Infinite) => Ordering::Less,
            (Rho::Finite { num: a, den: b }, Rho::Finite { num: c, den: d }) => (a * d).cmp(&(c * b)),
        }
    }
}

impl PartialOrd for Rho {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Rho {
    fn of(saved: u64, extra_storage: i128) -> Self {
        if extra_storage <= 0 {
            Rho::Infinite
        } else {
            Rho::Finite { num: saved as u128, den: extra_storage as u128 }
        }
    }

    /// `(numerator, denominator)`; infinity is `(1, 0)`.
    pub fn parts(&self) -> (u128, u128) {
        match *self {
            Rho::Finite { num, den } => (num, den),
            Rho::Infinite => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Materialize(NodeId),
    /// Retrieve `dst` from `src` instead of its current parent; `src == None`
    /// is the auxiliary root, i.e. materialization.
    Reparent { src: Option<NodeId>, dst: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub iter: usize,
    pub action: Move,
    pub rho: Rho,
    pub storage: u64,
    pub retrieval_sum: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyTrace {
    pub steps: Vec<TraceStep>,
}

impl GreedyTrace {
    /// `iter,move_kind,target,rho_num,rho_den,storage,retrieval_sum`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,move_kind,target,rho_num,rho_den,storage,retrieval_sum\n");
        for s in &self.steps {
            let (kind, target) = match s.action {
                Move::Materialize(v) => ("materialize", v.to_string()),
                Move::Reparent { src: None, dst } => ("edge", format!("aux->{dst}")),
                Move::Reparent { src: Some(u), dst } => ("edge", format!("{u}->{dst}")),
            };
            let (num, den) = s.rho.parts();
            let _ = writeln!(out, "{},{kind},{target},{num},{den},{},{}", s.iter, s.storage, s.retrieval_sum);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOutcome {
    pub solution: Solution,
    pub report: CostReport,
    pub trace: GreedyTrace,
}

/// Retrieval costs, subtree sizes and DFS intervals of a plan's retrieval forest.
struct ForestInfo {
    retrieval: Vec<u64>,
    size: Vec<u64>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl ForestInfo {
    fn new(sol: &Solution, report: &CostReport) -> Self {
        let n = sol.node_count();
        let children = sol.children();
        let mut size = vec![1u64; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        for root in sol.materialized() {
            let mut stack = vec![(root, 0usize)];
            tin[root] = clock;
            clock += 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&c) = children[v].get(*next) {
                    *next += 1;
                    tin[c] = clock;
                    clock += 1;
                    stack.push((c, 0));
                } else {
                    tout[v] = clock;
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        size[p] += size[v];
                    }
                }
            }
        }
        Self { retrieval: report.retrieval.clone(), size, tin, tout }
    }

    fn in_subtree(&self, u: NodeId, v: NodeId) -> bool {
        self.tin[v] <= self.tin[u] && self.tin[u] < self.tout[v]
    }
}

fn parent_storage(g: &VersionGraph, sol: &Solution, v: NodeId) -> u64 {
    match sol.parent(v) {
        None => g.node_cost(v),
        Some(u) => g.edge(u, v).expect("plan edges exist").storage,
    }
}

fn starting_plan(g: &VersionGraph, budget: u64) -> Result<(Solution, CostReport), SolveError> {
    let sol = min_arborescence(&g.extended(), Weight::Storage)?;
    let report = evaluate(g, &sol)?;
    if report.storage > budget {
        return Err(SolveError::Infeasible);
    }
    Ok((sol, report))
}

/// Local move greedy for the min-sum-retrieval problem.
///
/// Starts from the minimum-storage arborescence and repeatedly materializes the
/// unvisited version with the best retrieval saved per storage unit that still
/// fits the budget. Ties go to the lowest node id.
pub fn lmg(g: &VersionGraph, budget: u64) -> Result<GreedyOutcome, SolveError> {
    let (mut sol, mut report) = starting_plan(g, budget)?;
    let n = g.node_count();
    let mut unvisited = vec![true; n];
    let mut trace = GreedyTrace::default();

    while report.storage < budget && unvisited.iter().any(|&u| u) {
        let info = ForestInfo::new(&sol, &report);
        let mut best: Option<(Rho, NodeId, i128)> = None;
        for v in (0..n).filter(|&v| unvisited[v] && !sol.is_materialized(v)) {
            let extra = g.node_cost(v) as i128 - parent_storage(g, &sol, v) as i128;
            if report.storage as i128 + extra > budget as i128 {
                continue;
            }
            let saved = info.retrieval[v] * info.size[v];
            if saved == 0 {
                continue;
            }
            let rho = Rho::of(saved, extra);
            if best.is_none_or(|(b, _, _)| rho > b) {
                best = Some((rho, v, extra));
            }
        }
        let Some((rho, v, _)) = best else { break };
        sol.set_parent(v, None);
        unvisited[v] = false;
        report = evaluate(g, &sol)?;
        trace.steps.push(TraceStep {
            iter: trace.steps.len() + 1,
            action: Move::Materialize(v),
            rho,
            storage: report.storage,
            retrieval_sum: report.retrieval_sum,
        });
    }
    Ok(GreedyOutcome { solution: sol, report, trace })
}

/// The all-edges variant: every edge of the extended graph (materializations
/// included) is a candidate replacement for the current parent edge of its
/// target, as long as the source is not a descendant of the target.
pub fn lmg_all(g: &VersionGraph, budget: u64) -> Result<GreedyOutcome, SolveError> {
    let (mut sol, mut report) = starting_plan(g, budget)?;
    let n = g.node_count();
    // Candidate order: (src, dst) with the auxiliary root sorting after every real node.
    let mut candidates: Vec<(NodeId, NodeId, u64, u64)> =
        g.edges().iter().map(|e| (e.src, e.dst, e.storage, e.retrieval)).collect();
    candidates.extend((0..n).map(|v| (n, v, g.node_cost(v), 0)));
    candidates.sort_unstable_by_key(|c| (c.0, c.1));
    let mut trace = GreedyTrace::default();

    while report.storage < budget {
        let info = ForestInfo::new(&sol, &report);
        let mut best: Option<(Rho, NodeId, NodeId)> = None;
        for &(u, v, s_e, r_e) in &candidates {
            let current = sol.parent(v).unwrap_or(n);
            if u == current || (u < n && info.in_subtree(u, v)) {
                continue;
            }
            let new_r = if u == n { 0 } else { info.retrieval[u] } + r_e;
            let old_r = info.retrieval[v];
            if new_r >= old_r {
                continue;
            }
            let extra = s_e as i128 - parent_storage(g, &sol, v) as i128;
            if report.storage as i128 + extra > budget as i128 {
                continue;
            }
            let rho = Rho::of((old_r - new_r) * info.size[v], extra);
            if best.is_none_or(|(b, _, _)| rho > b) {
                best = Some((rho, u, v));
            }
        }
        let Some((rho, u, v)) = best else { break };
        sol.set_parent(v, (u < n).then_some(u));
        report = evaluate(g, &sol)?;
        trace.steps.push(TraceStep {
            iter: trace.steps.len() + 1,
            action: Move::Reparent { src: (u < n).then_some(u), dst: v },
            rho,
            storage: report.storage,
            retrieval_sum: report.retrieval_sum,
        });
    }
    Ok(GreedyOutcome { solution: sol, report, trace })
}

/// Prim-style baseline for bounded max retrieval: grow from the auxiliary root,
/// always adding the cheapest-storage edge that keeps the new node's retrieval
/// within `max_retrieval`. Ties go to the lower `(src, dst)`.
pub fn mp(g: &VersionGraph, max_retrieval: u64) -> Result<GreedyOutcome, SolveError> {
    let n = g.node_count();
    let aux = n;
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut retrieval = vec![0u64; n];
    let mut connected = vec![false; n];
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        heap.push(Reverse((g.node_cost(v), aux, v)));
    }
    let mut remaining = n;
    while remaining > 0 {
        let Reverse((_, u, v)) = heap.pop().expect("materialization edges are always admissible");
        if connected[v] {
            continue;
        }
        connected[v] = true;
        remaining -= 1;
        if u != aux {
            parent[v] = Some(u);
            retrieval[v] = retrieval[u] + g.edge(u, v).unwrap().retrieval;
        }
        for e in g.out_edges(v) {
            if !connected[e.dst] && retrieval[v].saturating_add(e.retrieval) <= max_retrieval {
                heap.push(Reverse((e.storage, v, e.dst)));
            }
        }
    }
    let solution = Solution::new(parent);
    let report = evaluate(g, &solution)?;
    Ok(GreedyOutcome { solution, report, trace: GreedyTrace::default() })
}
