//! Fixture generators shared by the benchmarks.

use verstore::arborescence::{min_arborescence, Weight};
use verstore::ingest::{er_construction, uniform_delta, DatasetRng};
use verstore::tree::BidirectionalTree;
use verstore::{evaluate, VersionGraph};

/// Random bidirectional tree on `n` versions, node sizes in `[1000, 5000]`
/// and delta costs in `[10, 200]`.
pub fn tree(n: usize, seed: u64) -> BidirectionalTree {
    let mut rng = DatasetRng::new(seed);
    let costs = (0..n).map(|_| rng.integer(1000, 5000)).collect();
    let mut g = VersionGraph::new(costs);
    for v in 1..n {
        let p = rng.integer(0, v as u64 - 1) as usize;
        for (a, b) in [(p, v), (v, p)] {
            let c = rng.integer(10, 200);
            g.add_edge(a, b, c, c).unwrap();
        }
    }
    BidirectionalTree::new(g, 0).unwrap()
}

/// A tree with a few cross edges between nearby versions, like a history
/// with merges.
pub fn history(n: usize, seed: u64) -> VersionGraph {
    let mut g = tree(n, seed).graph().clone();
    let mut rng = DatasetRng::new(seed ^ 0x5eed);
    for v in 2..n {
        if rng.unit() < 0.1 {
            let u = rng.integer(v.saturating_sub(6) as u64, v as u64 - 2) as usize;
            for (a, b) in [(u, v), (v, u)] {
                let c = rng.integer(10, 200);
                let _ = g.add_edge(a, b, c, c);
            }
        }
    }
    g
}

/// ER graph with edge probability `p` over `n` versions.
pub fn er(n: usize, p: f64, seed: u64) -> VersionGraph {
    let mut rng = DatasetRng::new(seed);
    let costs: Vec<u64> = (0..n).map(|_| rng.integer(1000, 5000)).collect();
    let delta = uniform_delta(&costs);
    er_construction(&costs, p, seed, delta).unwrap()
}

/// Budget a fraction `num/den` of the way from minimum storage to
/// materializing everything.
pub fn budget(g: &VersionGraph, num: u64, den: u64) -> u64 {
    let sol = min_arborescence(&g.extended(), Weight::Storage).unwrap();
    let lo = evaluate(g, &sol).unwrap().storage;
    let hi: u64 = g.node_costs().iter().sum();
    lo + (hi - lo) * num / den
}
