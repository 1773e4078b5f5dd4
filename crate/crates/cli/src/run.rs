//! One solver invocation: problem + algorithm + bound.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use verstore::extracted::{dp_bmr_heuristic, dp_msr_heuristic, Frontier};
use verstore::greedy::{lmg, lmg_all, mp};
use verstore::oracle::{brute_force, DEFAULT_LIMIT};
use verstore::tree::BidirectionalTree;
use verstore::tree_dp::{dp_bmr_exact, dp_msr_tree_fptas, dp_msr_tree_with_table, mmr_via_bmr};
use verstore::treewidth::{dp_mmr_btw, dp_msr_btw, BtwOptions, TreeDecomposition};
use verstore::{evaluate, CostReport, NodeId, Problem, ProblemSpec, Solution, SolveError, VersionGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Lmg,
    LmgAll,
    Mp,
    DpTree,
    DpBtw,
    DpExtracted,
    Oracle,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Lmg => "lmg",
            Algo::LmgAll => "lmg-all",
            Algo::Mp => "mp",
            Algo::DpTree => "dp-tree",
            Algo::DpBtw => "dp-btw",
            Algo::DpExtracted => "dp-extracted",
            Algo::Oracle => "oracle",
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Algo::Lmg, Algo::LmgAll, Algo::Mp, Algo::DpTree, Algo::DpBtw, Algo::DpExtracted, Algo::Oracle]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Params {
    /// Approximation parameter of the DP solvers; the extracted heuristic
    /// reads it as its storage bucket ratio.
    pub epsilon: Option<Ratio<u64>>,
    pub prune: Option<Ratio<u64>>,
    pub root: NodeId,
    pub decomposition: Option<TreeDecomposition>,
    pub k_max: Option<usize>,
}

const DEFAULT_EPSILON: Ratio<u64> = Ratio::new_raw(1, 4);

impl Params {
    fn epsilon(&self) -> Ratio<u64> {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    fn btw(&self) -> BtwOptions {
        let mut opts = BtwOptions { epsilon: self.epsilon(), ..BtwOptions::default() };
        if let Some(k) = self.k_max {
            opts.k_max = k;
        }
        opts
    }
}

#[derive(Debug)]
pub enum RunError {
    Unsupported(Problem, Algo),
    Solve(SolveError),
}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> Self {
        RunError::Solve(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Unsupported(p, a) => write!(f, "{} does not solve {}", a.name(), p),
            RunError::Solve(e) => write!(f, "{e}"),
        }
    }
}

pub struct Outcome {
    pub solution: Solution,
    pub report: CostReport,
    pub objective: u64,
    pub runtime: Duration,
    /// Solver-specific table (DP table, greedy trace or frontier) as CSV.
    pub table: Option<String>,
}

fn timed<T>(f: impl FnOnce() -> Result<T, SolveError>) -> Result<(T, Duration), SolveError> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

/// Runs `algo` on `problem` with bound `bound`. The runtime covers the solver
/// call alone; tables are produced afterwards.
pub fn run(
    g: &VersionGraph,
    problem: Problem,
    algo: Algo,
    bound: u64,
    params: &Params,
    want_table: bool,
) -> Result<Outcome, RunError> {
    use Algo::*;
    use Problem::*;
    let tree = || BidirectionalTree::new(g.clone(), params.root);
    let (solution, runtime, table) = match (problem, algo) {
        (Msr, Lmg | LmgAll) => {
            let solver = if algo == Lmg { lmg } else { lmg_all };
            let (out, t) = timed(|| solver(g, bound))?;
            (out.solution, t, Some(out.trace.to_csv()))
        }
        (Bmr, Mp) => {
            let (out, t) = timed(|| mp(g, bound))?;
            (out.solution, t, None)
        }
        (Msr, DpTree) => {
            let tr = tree()?;
            let (out, t) = timed(|| dp_msr_tree_fptas(&tr, bound, params.epsilon()))?;
            let table = if want_table {
                dp_msr_tree_with_table(&tr, bound, params.epsilon(), true)?.1.map(|tb| tb.to_csv())
            } else {
                None
            };
            (out.solution, t, table)
        }
        (Mmr, DpTree) => {
            let tr = tree()?;
            let (out, t) = timed(|| mmr_via_bmr(&tr, bound))?;
            (out.solution, t, None)
        }
        (Bmr, DpTree) => {
            let tr = tree()?;
            let (out, t) = timed(|| dp_bmr_exact(&tr, bound))?;
            (out.solution, t, Some(out.table.to_csv()))
        }
        (Msr | Mmr, DpBtw) => {
            let td = params.decomposition.as_ref();
            let opts = params.btw();
            let solver = if problem == Msr { dp_msr_btw } else { dp_mmr_btw };
            let (out, t) = timed(|| solver(g, td, bound, &opts))?;
            (out.solution, t, None)
        }
        (Msr | Bsr, DpExtracted) => {
            let (frontier, t) = timed(|| dp_msr_heuristic(g, params.root, params.epsilon, params.prune))?;
            let point = pick(&frontier, problem, bound).ok_or(SolveError::Infeasible)?;
            (point, t, Some(frontier.to_csv()))
        }
        (Bmr, DpExtracted) => {
            let (out, t) = timed(|| dp_bmr_heuristic(g, params.root, bound))?;
            (out.solution, t, None)
        }
        (_, Oracle) => {
            let spec = ProblemSpec::new(problem, bound);
            let (out, t) = timed(|| brute_force(g, &spec, DEFAULT_LIMIT))?;
            (out.solution, t, None)
        }
        _ => return Err(RunError::Unsupported(problem, algo)),
    };
    let report = evaluate(g, &solution).map_err(SolveError::from)?;
    let spec = ProblemSpec::new(problem, bound);
    if !spec.is_satisfied(&report) {
        return Err(SolveError::Infeasible.into());
    }
    Ok(Outcome { objective: spec.objective(&report), solution, report, runtime, table })
}

/// The frontier's answer: least retrieval within a storage budget (MSR) or
/// least storage within a retrieval-sum bound (BSR).
pub fn pick(frontier: &Frontier, problem: Problem, bound: u64) -> Option<Solution> {
    let point = match problem {
        Problem::Bsr => frontier.points.iter().find(|p| p.retrieval_sum <= bound),
        _ => frontier.best_within(bound),
    };
    point.map(|p| p.solution.clone())
}

/// `materialize v` and `store u v` lines, in node order.
pub fn solution_text(sol: &Solution) -> String {
    let mut out = String::new();
    for v in 0..sol.node_count() {
        match sol.parent(v) {
            None => writeln!(out, "materialize {v}").unwrap(),
            Some(u) => writeln!(out, "store {u} {v}").unwrap(),
        }
    }
    out
}
