#![allow(dead_code)]

pub mod lp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verstore::tree::BidirectionalTree;
use verstore::VersionGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bidirectional tree on `n` nodes, rooted at 0.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> BidirectionalTree {
    let costs = (0..n).map(|_| rng.gen_range(10..=60)).collect();
    let mut g = VersionGraph::new(costs);
    for v in 1..n {
        let p = rng.gen_range(0..v);
        g.add_edge(p, v, rng.gen_range(1..=20), rng.gen_range(1..=20)).unwrap();
        g.add_edge(v, p, rng.gen_range(1..=20), rng.gen_range(1..=20)).unwrap();
    }
    BidirectionalTree::new(g, 0).unwrap()
}

/// Random graph on `n` nodes whose underlying undirected graph is connected:
/// a random spanning tree plus `extra` further pairs, each pair present in one
/// or both directions.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> VersionGraph {
    let costs = (0..n).map(|_| rng.gen_range(10..=60)).collect();
    let mut g = VersionGraph::new(costs);
    let add_pair = |g: &mut VersionGraph, rng: &mut ChaCha8Rng, a: usize, b: usize| {
        let dir = rng.gen_range(0..3);
        if dir != 1 {
            let _ = g.add_edge(a, b, rng.gen_range(1..=20), rng.gen_range(1..=20));
        }
        if dir != 0 {
            let _ = g.add_edge(b, a, rng.gen_range(1..=20), rng.gen_range(1..=20));
        }
    };
    for v in 1..n {
        let p = rng.gen_range(0..v);
        add_pair(&mut g, rng, p, v);
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && g.edge(a, b).is_none() && g.edge(b, a).is_none() {
            add_pair(&mut g, rng, a, b);
        }
    }
    g
}

/// Storage of the cheapest plan and of materializing everything.
pub fn storage_range(g: &VersionGraph) -> (u64, u64) {
    let sol = verstore::arborescence::min_arborescence(&g.extended(), verstore::arborescence::Weight::Storage).unwrap();
    let lo = verstore::evaluate(g, &sol).unwrap().storage;
    (lo, g.node_costs().iter().sum())
}

/// `points` budgets evenly spread over `[lo, hi]`.
pub fn sweep(lo: u64, hi: u64, points: u64) -> Vec<u64> {
    (0..points).map(|i| lo + (hi - lo) * i / (points - 1).max(1)).collect()
}
