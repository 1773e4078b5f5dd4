//! Join and introduce bookkeeping on explicit state tuples.
//!
//! These work on [`StateTuple`]s that name actual parents, as opposed to the
//! compact states inside the DP. They split a glued state into the two
//! sides' restrictions, count dependents reached only through forgotten
//! vertices, and recover the retrieval added by a join, and they undo an
//! introduce step. Tests use them to check the DP's transitions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::SolveError;
use crate::graph::{GraphError, NodeId, VersionGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TupleParent {
    SelfRoot,
    Node(NodeId),
}

/// Per bag vertex (bag sorted): parent, subtree size, retrieval in the partial
/// forest, and ancestors inside the bag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTuple {
    pub bag: Vec<NodeId>,
    pub par: Vec<TupleParent>,
    pub dep: Vec<u64>,
    pub ret: Vec<u64>,
    pub anc: Vec<BTreeSet<NodeId>>,
}

impl StateTuple {
    fn index(&self, v: NodeId) -> usize {
        self.bag.binary_search(&v).expect("vertex in bag")
    }

    /// The same tuple ignoring `dep`.
    fn shape(&self) -> (&[TupleParent], &[u64], &[BTreeSet<NodeId>]) {
        (&self.par, &self.ret, &self.anc)
    }

    /// Nearest bag ancestor of position `i`.
    fn nearest(&self, i: usize) -> Option<usize> {
        self.anc[i].iter().map(|&a| self.index(a)).max_by_key(|&j| self.anc[j].len())
    }
}

/// State tuple, retrieval sum and storage of a partial forest.
///
/// `parent` lists every vertex of the forest (`None` for its roots); retrieval
/// and storage come from `g`.
pub fn forest_summary(
    g: &VersionGraph,
    parent: &BTreeMap<NodeId, Option<NodeId>>,
    bag: &[NodeId],
) -> Result<(StateTuple, u64, u64), SolveError> {
    let mut bag = bag.to_vec();
    bag.sort_unstable();
    let mut ret = BTreeMap::new();
    let mut size: BTreeMap<NodeId, u64> = parent.keys().map(|&v| (v, 0)).collect();
    let (mut rho, mut sigma) = (0u64, 0u64);
    for (&v, &p) in parent {
        let mut r = 0u64;
        let mut cur = v;
        let mut steps = 0;
        *size.get_mut(&v).expect("listed") += 1;
        while let Some(u) = parent[&cur] {
            r += g.edge(u, cur).ok_or(GraphError::MissingEdge(u, cur))?.retrieval;
            *size.get_mut(&u).ok_or(GraphError::UnknownNode(u))? += 1;
            cur = u;
            steps += 1;
            if steps > parent.len() {
                return Err(GraphError::CyclicSolution(v).into());
            }
        }
        ret.insert(v, r);
        rho += r;
        sigma += match p {
            None => g.node_cost(v),
            Some(u) => g.edge(u, v).expect("checked above").storage,
        };
    }
    let mut t = StateTuple {
        bag: bag.clone(),
        par: Vec::new(),
        dep: Vec::new(),
        ret: Vec::new(),
        anc: Vec::new(),
    };
    for &v in &bag {
        t.par.push(parent[&v].map_or(TupleParent::SelfRoot, TupleParent::Node));
        t.dep.push(size[&v]);
        t.ret.push(ret[&v]);
        let mut anc = BTreeSet::new();
        let mut cur = v;
        while let Some(u) = parent[&cur] {
            if bag.binary_search(&u).is_ok() {
                anc.insert(u);
            }
            cur = u;
        }
        t.anc.push(anc);
    }
    Ok((t, rho, sigma))
}

/// Bag positions, ancestors first.
pub fn topological_order(t: &StateTuple) -> Result<Vec<usize>, SolveError> {
    let k = t.bag.len();
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    while order.len() < k {
        let before = order.len();
        for i in 0..k {
            if !placed[i] && t.anc[i].iter().all(|&a| a != t.bag[i] && placed[t.index(a)]) {
                placed[i] = true;
                order.push(i);
            }
        }
        if order.len() == before {
            return Err(SolveError::CyclicAnc);
        }
    }
    Ok(order)
}

/// Restrictions of a glued tuple to the two sides of a join.
///
/// `private_a` and `private_b` are the vertices below each child that are
/// not in the bag. A vertex whose parent is private to one side is a root
/// on the other side, and its bag descendants there lose its retrieval and
/// its ancestors. `dep` is copied unchanged.
pub fn external_retrieval(
    t: &StateTuple,
    private_a: &BTreeSet<NodeId>,
    private_b: &BTreeSet<NodeId>,
) -> Result<(StateTuple, StateTuple), SolveError> {
    let order = topological_order(t)?;
    let restrict = |other: &BTreeSet<NodeId>| {
        let mut r = t.clone();
        for &i in &order {
            let TupleParent::Node(p) = r.par[i] else { continue };
            if !other.contains(&p) {
                continue;
            }
            let v = r.bag[i];
            let (ret_v, anc_v) = (r.ret[i], r.anc[i].clone());
            for j in 0..r.bag.len() {
                if r.anc[j].contains(&v) {
                    r.ret[j] -= ret_v;
                    r.anc[j].retain(|a| !anc_v.contains(a));
                }
            }
            r.par[i] = TupleParent::SelfRoot;
            r.ret[i] = 0;
            r.anc[i].clear();
        }
        r
    };
    Ok((restrict(private_b), restrict(private_a)))
}

/// Per bag vertex `v`: vertices outside the bag whose nearest bag ancestor is
/// `v`, that is `Dep(v) - 1` minus `Dep(w)` for each bag vertex `w` whose
/// nearest bag ancestor is `v`.
pub fn external_dependency(t: &StateTuple) -> Result<Vec<i64>, SolveError> {
    topological_order(t)?;
    let k = t.bag.len();
    let mut out: Vec<i64> = t.dep.iter().map(|&d| d as i64 - 1).collect();
    for w in 0..k {
        if let Some(v) = t.nearest(w) {
            out[v] -= t.dep[w] as i64;
        }
    }
    Ok(out)
}

/// Whether `ta` and `tb` can be the two sides of `tz`: the restrictions of
/// `tz` match them in parents, retrievals and ancestors, and the external
/// dependencies add up.
pub fn compatibility(
    tz: &StateTuple,
    ta: &StateTuple,
    tb: &StateTuple,
    private_a: &BTreeSet<NodeId>,
    private_b: &BTreeSet<NodeId>,
) -> Result<bool, SolveError> {
    let (ra, rb) = external_retrieval(tz, private_a, private_b)?;
    if ra.shape() != ta.shape() || rb.shape() != tb.shape() {
        return Ok(false);
    }
    let (ez, ea, eb) = (external_dependency(tz)?, external_dependency(ta)?, external_dependency(tb)?);
    Ok(ez.iter().zip(ea.iter().zip(&eb)).all(|(z, (a, b))| *z == a + b))
}

/// Retrieval a join adds on top of both sides' sums:
/// `sum over v of (1 + E_a + E_b) Ret_z - (1 + E_a) Ret_a - (1 + E_b) Ret_b`,
/// with `E` the external dependencies of the sides. Each vertex hanging
/// outside the bag below `v` moves with `v`.
pub fn distribute_retrieval(tz: &StateTuple, ta: &StateTuple, tb: &StateTuple) -> Result<i64, SolveError> {
    let (ea, eb) = (external_dependency(ta)?, external_dependency(tb)?);
    let mut delta = 0i64;
    for i in 0..tz.bag.len() {
        delta += (1 + ea[i] + eb[i]) * tz.ret[i] as i64 - (1 + ea[i]) * ta.ret[i] as i64 - (1 + eb[i]) * tb.ret[i] as i64;
    }
    Ok(delta)
}

/// Undoes introducing `v0`: drops it from the bag, turns its children into
/// roots, and removes its share of retrieval sum `rho` and storage `sigma`.
/// `v0`'s parent and children must all be bag vertices.
pub fn introduce_reverse(
    g: &VersionGraph,
    tz: &StateTuple,
    rho: u64,
    sigma: u64,
    v0: NodeId,
) -> Result<(StateTuple, u64, u64), SolveError> {
    let i0 = tz.index(v0);
    let kids: Vec<usize> = (0..tz.bag.len()).filter(|&j| tz.par[j] == TupleParent::Node(v0)).collect();
    if tz.dep[i0] != 1 + kids.iter().map(|&j| tz.dep[j]).sum::<u64>() {
        return Err(SolveError::InvalidInput(format!("vertex {v0} has children outside the bag")));
    }
    let mut rho = rho - tz.ret[i0];
    let mut sigma = sigma
        - match tz.par[i0] {
            TupleParent::SelfRoot => g.node_cost(v0),
            TupleParent::Node(u) => g.edge(u, v0).ok_or(GraphError::MissingEdge(u, v0))?.storage,
        };
    let mut t = tz.clone();
    let lost: BTreeSet<NodeId> = tz.anc[i0].iter().copied().chain([v0]).collect();
    for &w in &kids {
        let shift = tz.ret[w];
        rho -= tz.dep[w] * shift;
        let e = g.edge(v0, tz.bag[w]).ok_or(GraphError::MissingEdge(v0, tz.bag[w]))?;
        sigma = sigma + g.node_cost(tz.bag[w]) - e.storage;
        for x in 0..t.bag.len() {
            if x == w || tz.anc[x].contains(&tz.bag[w]) {
                t.ret[x] -= shift;
                t.anc[x].retain(|a| !lost.contains(a));
            }
        }
        t.par[w] = TupleParent::SelfRoot;
    }
    for a in &tz.anc[i0] {
        let ia = tz.index(*a);
        t.dep[ia] -= tz.dep[i0];
    }
    t.bag.remove(i0);
    t.par.remove(i0);
    t.dep.remove(i0);
    t.ret.remove(i0);
    t.anc.remove(i0);
    Ok((t, rho, sigma))
}
