//! Storage/retrieval frontier DP over a binary bidirectional tree.
//!
//! For each node `v` the table holds partial plans of the subtree of `v`,
//! summarized by
//!
//! * whether `v` is materialized inside the subtree (`rooted`), in which case
//!   the parent may later retrieve `v` instead: the plan's `s_v` is swapped
//!   for the delta cost and every node counted in `deps` pays the extra path;
//! * otherwise `gamma`, the retrieval cost of `v` through one of its children;
//! * `rho`, the retrieval sum of counted nodes in the subtree, and `storage`.
//!
//! Plans with equal summary keep only the `(rho, storage)` Pareto frontier:
//! every later step adds to both costs monotonically, so a dominated plan can
//! never become the better one.

use std::fmt::Write as _;

use crate::error::SolveError;
use crate::graph::{GraphError, NodeId};
use crate::solution::Solution;
use crate::tree::BidirectionalTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// The child's plan is taken as is.
    Independent,
    /// The child is retrieved from `v`.
    Dependent,
    /// `v` is retrieved from the child.
    Source,
}

#[derive(Debug, Clone, Copy)]
struct Pick {
    role: Role,
    entry: u32,
}

#[derive(Debug, Clone)]
pub struct FrontierEntry {
    pub rooted: bool,
    /// Counted nodes retrieved through `v`, `v` included (only kept when rooted).
    pub deps: u64,
    /// Retrieval cost of `v` (zero when rooted).
    pub gamma: u64,
    pub rho: u64,
    pub storage: u64,
    picks: [Option<Pick>; 2],
}

impl FrontierEntry {
    fn key(&self) -> (bool, u64, u64) {
        (self.rooted, self.deps, self.gamma)
    }
}

/// Geometric storage buckets `[base * ratio^i, base * ratio^(i+1))`; storage
/// below `base` shares one bucket.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StorageBuckets {
    pub ratio: f64,
    pub base: u64,
}

impl StorageBuckets {
    fn index(&self, storage: u64) -> i64 {
        if storage < self.base.max(1) {
            return -1;
        }
        ((storage as f64 / self.base.max(1) as f64).ln() / self.ratio.ln()).floor() as i64
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct EngineOptions {
    /// Merge same-key plans whose storage falls in one bucket, keeping the
    /// least retrieval.
    pub storage_bucket: Option<StorageBuckets>,
    /// Drop partial plans whose storage exceeds this.
    pub prune_above: Option<u64>,
}

pub(crate) struct Engine<'a> {
    tree: &'a BidirectionalTree,
    table: Vec<Vec<FrontierEntry>>,
    // per node: entry indices on the (rho, storage) frontier regardless of key
    free: Vec<Vec<u32>>,
}

fn ck(x: Option<u64>) -> Result<u64, SolveError> {
    x.ok_or(SolveError::Graph(GraphError::Overflow))
}

/// One way of handling a non-source child: extra retrieval, extra storage,
/// extra dependents of `v`.
type ChildOption = (u64, u64, u64, Pick);

impl<'a> Engine<'a> {
    pub fn run(tree: &'a BidirectionalTree, opts: EngineOptions) -> Result<Self, SolveError> {
        let n = tree.node_count();
        if let Some(v) = (0..n).find(|&v| tree.children(v).len() > 2) {
            return Err(SolveError::InvalidInput(format!("node {v} has more than two children; binarize first")));
        }
        let mut engine = Engine { tree, table: vec![Vec::new(); n], free: vec![Vec::new(); n] };
        for &v in tree.preorder().iter().rev() {
            let cands = engine.candidates(v)?;
            let entries = reduce(cands, &opts);
            engine.free[v] = frontier(&entries, 0..entries.len() as u32);
            engine.table[v] = entries;
        }
        Ok(engine)
    }

    fn non_source_options(&self, v: NodeId, c: NodeId, gamma_v: u64) -> Result<Vec<ChildOption>, SolveError> {
        let t = self.tree;
        let mut opts = Vec::new();
        for &i in &self.free[c] {
            let e = &self.table[c][i as usize];
            opts.push((e.rho, e.storage, 0, Pick { role: Role::Independent, entry: i }));
        }
        let down = t.edge(v, c);
        let step = ck(gamma_v.checked_add(down.retrieval))?;
        let s_c = t.graph().node_cost(c);
        for (i, e) in self.table[c].iter().enumerate().filter(|(_, e)| e.rooted) {
            let rho = ck(e.deps.checked_mul(step).and_then(|x| x.checked_add(e.rho)))?;
            let storage = ck((e.storage - s_c).checked_add(down.storage))?;
            opts.push((rho, storage, e.deps, Pick { role: Role::Dependent, entry: i as u32 }));
        }
        Ok(opts)
    }

    fn candidates(&self, v: NodeId) -> Result<Vec<FrontierEntry>, SolveError> {
        let t = self.tree;
        let ch = t.children(v);
        let weight = u64::from(t.counted()[v]);
        let mut out = Vec::new();

        // v materialized
        let lists: Vec<Vec<ChildOption>> =
            ch.iter().map(|&c| self.non_source_options(v, c, 0)).collect::<Result<_, _>>()?;
        let base = FrontierEntry {
            rooted: true,
            deps: weight,
            gamma: 0,
            rho: 0,
            storage: t.graph().node_cost(v),
            picks: [None, None],
        };
        combine(&base, &lists, 0, &mut out)?;

        // v retrieved from child `si`
        for (si, &src) in ch.iter().enumerate() {
            let up = t.edge(src, v);
            for (i, e) in self.table[src].iter().enumerate() {
                let gamma = ck(e.gamma.checked_add(up.retrieval))?;
                let mut base = FrontierEntry {
                    rooted: false,
                    deps: 0,
                    gamma,
                    rho: ck(weight.checked_mul(gamma).and_then(|x| x.checked_add(e.rho)))?,
                    storage: ck(e.storage.checked_add(up.storage))?,
                    picks: [None, None],
                };
                base.picks[si] = Some(Pick { role: Role::Source, entry: i as u32 });
                match ch.iter().enumerate().find(|&(j, _)| j != si) {
                    None => out.push(base),
                    Some((oj, &other)) => {
                        let list = self.non_source_options(v, other, gamma)?;
                        for &(rho, storage, _, pick) in &list {
                            let mut e = base.clone();
                            e.rho = ck(e.rho.checked_add(rho))?;
                            e.storage = ck(e.storage.checked_add(storage))?;
                            e.picks[oj] = Some(pick);
                            out.push(e);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Root plans on the `(rho, storage)` Pareto frontier, by increasing rho.
    pub fn root_frontier(&self) -> Vec<u32> {
        let root = self.tree.root();
        frontier(&self.table[root], 0..self.table[root].len() as u32)
    }

    /// Least-retrieval root plan within `budget`, ties to lower storage.
    pub fn best_within(&self, budget: u64) -> Option<u32> {
        self.root_frontier().into_iter().find(|&i| self.table[self.tree.root()][i as usize].storage <= budget)
    }

    pub fn root_entry(&self, i: u32) -> &FrontierEntry {
        &self.table[self.tree.root()][i as usize]
    }

    pub fn reconstruct(&self, entry: u32) -> Solution {
        let t = self.tree;
        let mut parent = vec![None; t.node_count()];
        let mut stack = vec![(t.root(), entry, false)];
        while let Some((v, idx, dependent)) = stack.pop() {
            let e = &self.table[v][idx as usize];
            if dependent {
                parent[v] = t.tree_parent(v);
            }
            for (i, pick) in e.picks.iter().enumerate() {
                let Some(pick) = pick else { continue };
                let c = t.children(v)[i];
                if pick.role == Role::Source {
                    parent[v] = Some(c);
                }
                stack.push((c, pick.entry, pick.role == Role::Dependent));
            }
        }
        Solution::new(parent)
    }

    pub fn table(&self) -> MsrTable {
        MsrTable {
            rows: (0..self.table.len())
                .flat_map(|v| {
                    self.table[v].iter().map(move |e| (v, e.rooted, e.deps, e.gamma, e.rho, e.storage))
                })
                .collect(),
        }
    }
}

fn combine(
    base: &FrontierEntry,
    lists: &[Vec<ChildOption>],
    at: usize,
    out: &mut Vec<FrontierEntry>,
) -> Result<(), SolveError> {
    if at == lists.len() {
        out.push(base.clone());
        return Ok(());
    }
    for &(rho, storage, deps, pick) in &lists[at] {
        let mut e = base.clone();
        e.rho = ck(e.rho.checked_add(rho))?;
        e.storage = ck(e.storage.checked_add(storage))?;
        e.deps += deps;
        e.picks[at] = Some(pick);
        combine(&e, lists, at + 1, out)?;
    }
    Ok(())
}

fn reduce(mut cands: Vec<FrontierEntry>, opts: &EngineOptions) -> Vec<FrontierEntry> {
    if let Some(limit) = opts.prune_above {
        cands.retain(|e| e.storage <= limit);
    }
    if let Some(b) = opts.storage_bucket {
        cands.sort_by_key(|e| (e.key(), b.index(e.storage), e.rho, e.storage));
        cands.dedup_by(|later, kept| kept.key() == later.key() && b.index(kept.storage) == b.index(later.storage));
    }
    cands.sort_by_key(|e| (e.key(), e.rho, e.storage));
    let mut out: Vec<FrontierEntry> = Vec::with_capacity(cands.len());
    for e in cands {
        match out.last() {
            Some(last) if last.key() == e.key() && last.storage <= e.storage => {}
            _ => out.push(e),
        }
    }
    out
}

/// Indices of `(rho, storage)`-Pareto entries, by increasing rho.
fn frontier(entries: &[FrontierEntry], idx: impl Iterator<Item = u32>) -> Vec<u32> {
    let mut order: Vec<u32> = idx.collect();
    order.sort_by_key(|&i| (entries[i as usize].rho, entries[i as usize].storage));
    let mut out = Vec::new();
    let mut best = u64::MAX;
    for i in order {
        if entries[i as usize].storage < best {
            best = entries[i as usize].storage;
            out.push(i);
        }
    }
    out
}

/// Flattened DP table: `(node, rooted, deps, gamma, rho, storage)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrTable {
    pub rows: Vec<(NodeId, bool, u64, u64, u64, u64)>,
}

impl MsrTable {
    /// `v,mode,k,gamma,rho,storage` with mode `root` or `inner`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,mode,k,gamma,rho,storage\n");
        for &(v, rooted, k, gamma, rho, storage) in &self.rows {
            let mode = if rooted { "root" } else { "inner" };
            let _ = writeln!(out, "{v},{mode},{k},{gamma},{rho},{storage}");
        }
        out
    }
}
