//! Minimum-weight spanning arborescence (Chu-Liu/Edmonds).

use std::collections::VecDeque;

use crate::error::SolveError;
use crate::graph::{Edge, ExtendedGraph, NodeId, VersionGraph};
use crate::solution::Solution;

/// Edge weight used by the arborescence search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Storage,
    Retrieval,
    Sum,
}

impl Weight {
    fn of(self, e: &Edge) -> u128 {
        match self {
            Weight::Storage => e.storage as u128,
            Weight::Retrieval => e.retrieval as u128,
            Weight::Sum => e.storage as u128 + e.retrieval as u128,
        }
    }
}

#[derive(Clone, Copy)]
struct Arc {
    u: usize,
    v: usize,
    w: u128,
    // original (src, dst): among equal weights the lexicographically smaller pair wins
    tie: (NodeId, NodeId),
    // edge id at the top level, index into the parent level's arcs below it
    id: usize,
}

impl Arc {
    fn key(&self) -> (u128, NodeId, NodeId) {
        (self.w, self.tie.0, self.tie.1)
    }
}

/// Minimum arborescence of `g` rooted at `root`; returns the chosen in-edge id
/// of every node (`None` for the root).
pub fn min_arborescence_edges(
    g: &VersionGraph,
    root: NodeId,
    weight: Weight,
) -> Result<Vec<Option<usize>>, SolveError> {
    let n = g.node_count();
    if root >= n {
        return Err(SolveError::InvalidInput(format!("root {root} is out of range")));
    }
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for e in g.out_edges(u) {
            if !seen[e.dst] {
                seen[e.dst] = true;
                queue.push_back(e.dst);
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(SolveError::UnreachableNode(v));
    }

    let arcs: Vec<Arc> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.dst != root)
        .map(|(id, e)| Arc { u: e.src, v: e.dst, w: weight.of(e), tie: (e.src, e.dst), id })
        .collect();
    let mut result = vec![None; n];
    for i in edmonds(n, root, &arcs) {
        result[arcs[i].v] = Some(arcs[i].id);
    }
    Ok(result)
}

/// Returns indices into `arcs`, one entering arc per non-root node.
fn edmonds(n: usize, root: usize, arcs: &[Arc]) -> Vec<usize> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (i, a) in arcs.iter().enumerate() {
        if a.v == root || a.u == a.v {
            continue;
        }
        if best[a.v].is_none_or(|b| a.key() < arcs[b].key()) {
            best[a.v] = Some(i);
        }
    }

    // Look for cycles among the chosen arcs.
    let mut comp = vec![usize::MAX; n];
    let mut in_cycle = vec![false; n];
    let mut walk_mark = vec![usize::MAX; n];
    let mut n_comp = 0;
    for start in 0..n {
        let mut v = start;
        while v != root && walk_mark[v] == usize::MAX && comp[v] == usize::MAX {
            walk_mark[v] = start;
            v = arcs[best[v].expect("reachability checked")].u;
        }
        if v != root && walk_mark[v] == start && comp[v] == usize::MAX {
            let mut x = v;
            loop {
                comp[x] = n_comp;
                in_cycle[x] = true;
                x = arcs[best[x].unwrap()].u;
                if x == v {
                    break;
                }
            }
            n_comp += 1;
        }
    }
    if n_comp == 0 {
        return best.iter().flatten().copied().collect();
    }
    for c in comp.iter_mut().filter(|c| **c == usize::MAX) {
        *c = n_comp;
        n_comp += 1;
    }

    let mut contracted = Vec::new();
    for (i, a) in arcs.iter().enumerate() {
        let (cu, cv) = (comp[a.u], comp[a.v]);
        if cu == cv {
            continue;
        }
        let w = if in_cycle[a.v] { a.w - arcs[best[a.v].unwrap()].w } else { a.w };
        contracted.push(Arc { u: cu, v: cv, w, tie: a.tie, id: i });
    }
    let sub = edmonds(n_comp, comp[root], &contracted);

    let mut entered = vec![false; n];
    let mut chosen = Vec::with_capacity(n);
    for s in sub {
        let i = contracted[s].id;
        entered[arcs[i].v] = true;
        chosen.push(i);
    }
    for v in 0..n {
        if in_cycle[v] && !entered[v] {
            chosen.push(best[v].unwrap());
        }
    }
    chosen
}

/// Minimum arborescence of the extended graph rooted at the auxiliary root.
pub fn min_arborescence(g: &ExtendedGraph, weight: Weight) -> Result<Solution, SolveError> {
    let aux = g.aux_root();
    let edges = min_arborescence_edges(g.graph(), aux, weight)?;
    let parent = (0..g.base_node_count())
        .map(|v| {
            let e = g.graph().edge_by_id(edges[v].expect("every base node has an in-edge"));
            (e.src != aux).then_some(e.src)
        })
        .collect();
    Ok(Solution::new(parent))
}
