mod common;

use std::collections::VecDeque;

use num_rational::Ratio;
use proptest::prelude::*;
use verstore::arborescence::{min_arborescence, Weight};
use verstore::extracted::{dp_bmr_heuristic, dp_msr_heuristic};
use verstore::greedy::{lmg, lmg_all, mp, Move, Rho};
use verstore::oracle::{brute_force, SolutionEnumerator};
use verstore::solution::check_feasible;
use verstore::tree::BidirectionalTree;
use verstore::tree_dp::{dp_bmr_exact, dp_msr_tree_fptas, mmr_via_bmr};
use verstore::{evaluate, NodeId, Problem, ProblemSpec, Solution, SolveError, VersionGraph};

fn graph(seed: u64, n: usize, extra: usize) -> VersionGraph {
    common::random_connected(&mut common::rng(seed), n, extra)
}

/// A bidirectional tree with `extra` random arcs on top, so every node is
/// reachable from node 0.
fn reachable(seed: u64, n: usize, extra: usize) -> VersionGraph {
    use rand::Rng;
    let mut rng = common::rng(seed);
    let mut g = common::random_tree(&mut rng, n).graph().clone();
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            let _ = g.add_edge(a, b, rng.gen_range(1..=20), rng.gen_range(1..=20));
        }
    }
    g
}

fn tree(seed: u64, n: usize) -> BidirectionalTree {
    common::random_tree(&mut common::rng(seed), n)
}

/// Storage of a plan as the weight of its arborescence in the extended graph.
fn arborescence_weight(g: &VersionGraph, sol: &Solution) -> u64 {
    let x = g.extended();
    (0..g.node_count())
        .map(|v| {
            let src = sol.parent(v).unwrap_or(x.aux_root());
            x.graph().edge(src, v).unwrap().storage
        })
        .sum()
}

fn feasible_or_infeasible<T>(
    g: &VersionGraph,
    spec: ProblemSpec,
    out: Result<T, SolveError>,
    sol: impl Fn(&T) -> &Solution,
) -> Result<(), TestCaseError> {
    match out {
        Ok(o) => prop_assert!(check_feasible(g, sol(&o), &spec).unwrap(), "{spec:?}"),
        Err(SolveError::Infeasible) => {}
        Err(e) => return Err(TestCaseError::fail(format!("{spec:?}: {e}"))),
    }
    Ok(())
}

/// What LMG's best move from `sol` is worth, recomputed from scratch.
fn best_materialization(g: &VersionGraph, sol: &Solution, visited: &[bool], budget: u64) -> Option<Rho> {
    let report = evaluate(g, sol).unwrap();
    let children = sol.children();
    let size = |v: NodeId| {
        let mut stack = vec![v];
        let mut k = 0u128;
        while let Some(x) = stack.pop() {
            k += 1;
            stack.extend(&children[x]);
        }
        k
    };
    let mut best: Option<Rho> = None;
    for v in 0..g.node_count() {
        let Some(p) = sol.parent(v) else { continue };
        if visited[v] {
            continue;
        }
        let extra = g.node_cost(v) as i128 - g.edge(p, v).unwrap().storage as i128;
        let saved = report.retrieval[v] as u128 * size(v);
        if saved == 0 || report.storage as i128 + extra > budget as i128 {
            continue;
        }
        let rho = if extra <= 0 { Rho::Infinite } else { Rho::Finite { num: saved, den: extra as u128 } };
        best = best.max(Some(rho));
    }
    best
}

/// Retrieval cost of the tree path `u -> v`.
fn path_cost(t: &BidirectionalTree, u: NodeId, v: NodeId) -> u64 {
    let n = t.node_count();
    let mut dist = vec![None; n];
    dist[u] = Some(0u64);
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for e in t.graph().out_edges(x) {
            if dist[e.dst].is_none() {
                dist[e.dst] = Some(dist[x].unwrap() + e.retrieval);
                queue.push_back(e.dst);
            }
        }
    }
    dist[v].unwrap()
}

fn subtree(t: &BidirectionalTree, v: NodeId) -> Vec<NodeId> {
    let mut out = vec![v];
    let mut i = 0;
    while i < out.len() {
        out.extend_from_slice(t.children(out[i]));
        i += 1;
    }
    out
}

/// Least storage of the subtree of `v` over all choices of its nodes in which
/// `v` is served from `u` and every node stays within `bound`; `None` if no
/// choice works. Nodes may use tree neighbours only; when `u` lies outside
/// the subtree, `v` keeps its tree parent and starts at the path cost `u -> v`.
fn subtree_optimum(t: &BidirectionalTree, v: NodeId, u: NodeId, bound: u64) -> Option<u64> {
    let nodes = subtree(t, v);
    let inside = |x: NodeId| nodes.contains(&x);
    let options: Vec<Vec<Option<NodeId>>> = nodes
        .iter()
        .map(|&x| {
            if x == v && !inside(u) {
                return vec![t.tree_parent(v)];
            }
            let mut o = vec![None];
            o.extend(t.children(x).iter().map(|&c| Some(c)));
            if x != v {
                o.push(t.tree_parent(x));
            }
            o
        })
        .collect();
    let mut pick = vec![0usize; nodes.len()];
    let mut best: Option<u64> = None;
    'outer: loop {
        let parent_of = |x: NodeId| options[nodes.iter().position(|&y| y == x).unwrap()][pick[nodes.iter().position(|&y| y == x).unwrap()]];
        let mut storage = 0;
        let mut ok = true;
        for &x in &nodes {
            // follow the chain to its source, summing retrieval
            let (mut cur, mut r, mut steps) = (x, 0u64, 0);
            let source = loop {
                match parent_of(cur) {
                    None => break cur,
                    Some(p) if !inside(p) => {
                        r += path_cost(t, u, cur);
                        break u;
                    }
                    Some(p) => {
                        r += t.edge(p, cur).retrieval;
                        cur = p;
                    }
                }
                steps += 1;
                if steps > nodes.len() {
                    ok = false;
                    break x;
                }
            };
            if !ok || r > bound || (x == v && source != u) {
                ok = false;
                break;
            }
            storage += match parent_of(x) {
                None => t.graph().node_cost(x),
                Some(p) => t.edge(p, x).storage,
            };
        }
        if ok {
            best = Some(best.map_or(storage, |b: u64| b.min(storage)));
        }
        for i in 0..nodes.len() {
            pick[i] += 1;
            if pick[i] < options[i].len() {
                continue 'outer;
            }
            pick[i] = 0;
        }
        break;
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn min_arborescence_is_the_least_storage_plan(seed in any::<u64>(), n in 1usize..=7, extra in 0usize..6) {
        let g = graph(seed, n, extra);
        let sol = min_arborescence(&g.extended(), Weight::Storage).unwrap();
        let storage = evaluate(&g, &sol).unwrap().storage;
        prop_assert_eq!(storage, arborescence_weight(&g, &sol));
        let least = SolutionEnumerator::new(&g, 7).unwrap().map(|s| evaluate(&g, &s).unwrap().storage).min().unwrap();
        prop_assert_eq!(storage, least);
    }

    #[test]
    fn evaluate_is_pure(seed in any::<u64>(), n in 1usize..=7) {
        let g = graph(seed, n, 3);
        for sol in SolutionEnumerator::new(&g, 7).unwrap().take(20) {
            prop_assert_eq!(evaluate(&g, &sol), evaluate(&g.clone(), &sol.clone()));
        }
    }

    #[test]
    fn greedy_outputs_are_feasible(seed in any::<u64>(), n in 1usize..=8, frac in 0u64..=8) {
        let g = graph(seed, n, n);
        let (lo, hi) = common::storage_range(&g);
        let budget = lo + (hi - lo) * frac / 8;
        for out in [lmg(&g, budget).unwrap(), lmg_all(&g, budget).unwrap()] {
            prop_assert!(out.report.storage <= budget);
        }
        let bound = g.max_retrieval() * frac / 4;
        let out = mp(&g, bound).unwrap();
        prop_assert!(out.report.retrieval_max <= bound);
    }

    #[test]
    fn lmg_trace_picks_the_best_ratio(seed in any::<u64>(), n in 2usize..=8, frac in 1u64..=8) {
        let g = graph(seed, n, n);
        let (lo, hi) = common::storage_range(&g);
        let budget = lo + (hi - lo) * frac / 8;
        let out = lmg(&g, budget).unwrap();
        let mut sol = min_arborescence(&g.extended(), Weight::Storage).unwrap();
        let mut visited = vec![false; n];
        for step in &out.trace.steps {
            let best = best_materialization(&g, &sol, &visited, budget);
            prop_assert_eq!(best.map(|b| b.cmp(&step.rho)), Some(std::cmp::Ordering::Equal), "{:?} vs {:?}", best, step.rho);
            let Move::Materialize(v) = step.action else { panic!("LMG only materializes") };
            sol.set_parent(v, None);
            visited[v] = true;
        }
        prop_assert_eq!(best_materialization(&g, &sol, &visited, budget), None::<Rho>);
        prop_assert_eq!(sol, out.solution);
    }

    #[test]
    fn lmg_all_opens_with_at_least_lmgs_ratio(seed in any::<u64>(), n in 2usize..=8, frac in 1u64..=8) {
        let g = graph(seed, n, n);
        let (lo, hi) = common::storage_range(&g);
        let budget = lo + (hi - lo) * frac / 8;
        if let Some(first) = lmg(&g, budget).unwrap().trace.steps.first() {
            let all = lmg_all(&g, budget).unwrap();
            prop_assert!(all.trace.steps[0].rho >= first.rho);
        }
    }

    #[test]
    fn tree_solvers_are_feasible(seed in any::<u64>(), n in 1usize..=8, frac in 0u64..=4) {
        let t = tree(seed, n);
        let g = t.graph();
        let (lo, hi) = common::storage_range(g);
        let budget = lo.saturating_sub(1) + (hi - lo + 1) * frac / 4;
        let bound = g.max_retrieval() * frac / 2;
        feasible_or_infeasible(g, ProblemSpec::new(Problem::Msr, budget), dp_msr_tree_fptas(&t, budget, Ratio::new(1, 4)), |o| &o.solution)?;
        feasible_or_infeasible(g, ProblemSpec::new(Problem::Mmr, budget), mmr_via_bmr(&t, budget), |o| &o.solution)?;
        feasible_or_infeasible(g, ProblemSpec::new(Problem::Bmr, bound), dp_bmr_exact(&t, bound), |o| &o.solution)?;
        feasible_or_infeasible(g, ProblemSpec::new(Problem::Bmr, bound), dp_bmr_heuristic(g, 0, bound), |o| &o.solution)?;
    }

    #[test]
    fn bmr_table_entries_are_subtree_optima(seed in any::<u64>(), n in 1usize..=6, bound in 0u64..40) {
        let t = tree(seed, n);
        let out = dp_bmr_exact(&t, bound);
        let Ok(out) = out else { return Ok(()) };
        for v in 0..n {
            for u in 0..n {
                let expected = if path_cost(&t, u, v) > bound { None } else { subtree_optimum(&t, v, u, bound) };
                let got = out.table.is_finite(v, u).then(|| out.table.dp[v][u]);
                prop_assert_eq!(got, expected, "v {} u {}", v, u);
            }
        }
    }

    #[test]
    fn oracle_is_monotone_and_dual(seed in any::<u64>(), n in 1usize..=6) {
        let g = graph(seed, n, 2);
        let (lo, hi) = common::storage_range(&g);
        let mut last = u64::MAX;
        for budget in common::sweep(lo, hi, 6) {
            let rho = brute_force(&g, &ProblemSpec::new(Problem::Msr, budget), 8).unwrap().objective;
            prop_assert!(rho <= last);
            last = rho;
            let bsr = |r: u64| match brute_force(&g, &ProblemSpec::new(Problem::Bsr, r), 8) {
                Ok(o) => o.objective,
                Err(SolveError::Infeasible) => u64::MAX,
                Err(e) => panic!("{e}"),
            };
            prop_assert!(bsr(rho) <= budget);
            if rho > 0 {
                prop_assert!(bsr(rho - 1) > budget);
            }
        }
        let mut last = u64::MAX;
        for bound in 0..=g.max_retrieval() * 2 {
            let s = brute_force(&g, &ProblemSpec::new(Problem::Bmr, bound), 8).unwrap().objective;
            prop_assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn heuristic_frontier_is_feasible_and_monotone(seed in any::<u64>(), n in 1usize..=8, extra in 0usize..5, eps in 0u64..3) {
        let g = reachable(seed, n, extra);
        let epsilon = (eps > 0).then(|| Ratio::new(1, 2 * eps));
        let frontier = match dp_msr_heuristic(&g, 0, epsilon, Some(Ratio::new(3, 1))) {
            Ok(f) => f,
            Err(SolveError::Infeasible) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for p in &frontier.points {
            let report = evaluate(&g, &p.solution).unwrap();
            prop_assert_eq!((report.storage, report.retrieval_sum), (p.storage, p.retrieval_sum));
        }
        for w in frontier.points.windows(2) {
            prop_assert!(w[0].storage < w[1].storage && w[0].retrieval_sum > w[1].retrieval_sum);
        }
    }

    #[test]
    fn bmr_heuristic_storage_falls_with_the_bound(seed in any::<u64>(), n in 1usize..=8, extra in 0usize..5) {
        let g = reachable(seed, n, extra);
        let mut last = u64::MAX;
        for bound in (0..=g.max_retrieval() * 3).step_by(3) {
            let storage = match dp_bmr_heuristic(&g, 0, bound) {
                Ok(p) => {
                    prop_assert!(p.report.retrieval_max <= bound);
                    p.report.storage
                }
                Err(SolveError::Infeasible) => u64::MAX,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            prop_assert!(storage <= last, "bound {}", bound);
            last = storage;
        }
    }
}
