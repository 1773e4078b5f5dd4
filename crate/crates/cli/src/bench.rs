//! Budget sweeps over several algorithms.

use std::time::Instant;

use rayon::prelude::*;
use verstore::extracted::dp_msr_heuristic;
use verstore::ingest::ResultRow;
use verstore::{evaluate, Problem, ProblemSpec, SolveError, VersionGraph};

use crate::run::{pick, run, Algo, Params, RunError};

/// `steps` bounds evenly spread over `start..=stop`.
pub fn parse_bounds(spec: &str) -> Result<Vec<u64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(format!("bounds {spec:?} are not start:stop:steps"));
    };
    let num = |s: &str| s.parse::<u64>().map_err(|_| format!("bad number {s:?} in bounds"));
    let (start, stop, steps) = (num(start)?, num(stop)?, num(steps)?);
    if steps == 0 || stop < start {
        return Err(format!("bounds {spec:?} describe an empty sweep"));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps).map(|i| start + ((stop - start) as u128 * i as u128 / (steps - 1) as u128) as u64).collect())
}

fn row(algo: &str, dataset: &str, budget: u64, objective: Option<u64>, ms: f64) -> ResultRow {
    ResultRow { algo: algo.to_string(), dataset: dataset.to_string(), budget, objective, runtime_ms: ms }
}

enum Cell {
    Single(Algo, u64),
    /// One heuristic run answering every bound, plus its frontier.
    Frontier,
}

/// Rows in `(algo, bound)` order. The extracted heuristic on MSR/BSR runs
/// once; its rows share that runtime and are followed by one
/// `dp-extracted-frontier` row per frontier point (budget = storage).
pub fn sweep(
    g: &VersionGraph,
    dataset: &str,
    problem: Problem,
    algos: &[Algo],
    bounds: &[u64],
    params: &Params,
    jobs: usize,
) -> Result<Vec<ResultRow>, String> {
    let frontier_mode = matches!(problem, Problem::Msr | Problem::Bsr);
    let mut cells = Vec::new();
    for &a in algos {
        if a == Algo::DpExtracted && frontier_mode {
            cells.push(Cell::Frontier);
        } else {
            cells.extend(bounds.iter().map(|&b| Cell::Single(a, b)));
        }
    }
    let work = |cell: &Cell| -> Result<Vec<ResultRow>, String> {
        match *cell {
            Cell::Single(algo, bound) => match run(g, problem, algo, bound, params, false) {
                Ok(out) => Ok(vec![row(algo.name(), dataset, bound, Some(out.objective), out.runtime.as_secs_f64() * 1e3)]),
                Err(RunError::Solve(SolveError::Infeasible)) => Ok(vec![row(algo.name(), dataset, bound, None, 0.0)]),
                Err(e) => Err(format!("{} at bound {bound}: {e}", algo.name())),
            },
            Cell::Frontier => {
                let start = Instant::now();
                let frontier = match dp_msr_heuristic(g, params.root, params.epsilon, params.prune) {
                    Ok(f) => f,
                    Err(SolveError::Infeasible) => Default::default(),
                    Err(e) => return Err(format!("dp-extracted: {e}")),
                };
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let name = Algo::DpExtracted.name();
                let mut rows: Vec<ResultRow> = bounds
                    .iter()
                    .map(|&b| {
                        let objective = pick(&frontier, problem, b).map(|sol| {
                            let report = evaluate(g, &sol).expect("frontier plans are valid");
                            ProblemSpec::new(problem, b).objective(&report)
                        });
                        row(name, dataset, b, objective, ms)
                    })
                    .collect();
                rows.extend(
                    frontier.points.iter().map(|p| row("dp-extracted-frontier", dataset, p.storage, Some(p.retrieval_sum), ms)),
                );
                Ok(rows)
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| e.to_string())?;
    let results: Vec<Result<Vec<ResultRow>, String>> = pool.install(|| cells.par_iter().map(work).collect());
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}
