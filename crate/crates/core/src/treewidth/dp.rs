//! The state DP over a nice tree decomposition.
//!
//! A state at bag `z` summarizes a partial plan on the vertices `V_[z]` seen
//! below `z`: for each bag vertex its parent (none yet, a bag vertex, or a
//! vertex already forgotten), its retrieval within the partial forest, its
//! ancestors inside the bag and, for retrieval sums, the size of its subtree.
//! Each state keeps the `(rho, sigma)` Pareto frontier of the partial plans
//! it summarizes, where `rho` is retrieval (sum, or max over finished trees)
//! and `sigma` storage.
//!
//! Transitions run child to parent. An introduced vertex may take a bag
//! vertex as parent and may adopt any bag vertex that is still the root of
//! its partial tree; a join glues two partial forests that agree on the bag.

use std::collections::{BTreeMap, HashMap};

use super::decomposition::{changed_vertex, BagKind, TreeDecomposition};
use crate::error::SolveError;
use crate::graph::{GraphError, NodeId, VersionGraph};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `rho` is the retrieval sum of `V_[z]`.
    Sum,
    /// `rho` is the largest retrieval among vertices whose tree can no longer change.
    Max,
}

/// Parent of a bag vertex in a partial plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateParent {
    /// No parent yet: materialized if it stays this way.
    Root,
    Bag(NodeId),
    /// A vertex of `V_[z]` outside the bag.
    Forgotten,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Slot {
    par: StateParent,
    /// Subtree size, the vertex included (sum mode only).
    dep: u64,
    ret: u64,
    /// Bag positions of the ancestors.
    anc: u64,
    /// Max mode: largest `ret(y) - ret(v)` over forgotten `y` whose nearest
    /// bag ancestor is `v`.
    ext: Option<u64>,
}

type Key = Vec<Slot>;

#[derive(Debug, Clone, Copy)]
struct Ref {
    key: u32,
    val: u32,
}

#[derive(Debug, Clone)]
enum Prov {
    Leaf,
    Introduce { child: Ref, parent: Option<NodeId>, hooked: Vec<NodeId> },
    Forget { child: Ref },
    Join { a: Ref, b: Ref },
}

#[derive(Debug, Clone)]
struct Val {
    rho: u64,
    sigma: u64,
    prov: Prov,
}

#[derive(Debug, Default)]
struct Table {
    keys: Vec<Key>,
    vals: Vec<Vec<Val>>,
}

fn ck<T>(x: Option<T>) -> Result<T, SolveError> {
    x.ok_or(SolveError::Graph(GraphError::Overflow))
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn pos(bag: &[NodeId], v: NodeId) -> usize {
    bag.binary_search(&v).expect("vertex in bag")
}

/// Re-expresses a position mask over `from` as one over `to`, dropping
/// vertices `to` lacks.
fn remap(mask: u64, from: &[NodeId], to: &[NodeId]) -> u64 {
    bits(mask).filter_map(|i| to.binary_search(&from[i]).ok()).fold(0, |m, j| m | 1 << j)
}

/// Nearest ancestor of position `i` inside the bag: the one with the most ancestors.
fn nearest(key: &Key, i: usize) -> Option<usize> {
    bits(key[i].anc).max_by_key(|&j| key[j].anc.count_ones())
}

/// A recorded state with one partial plan realizing it, for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedState {
    pub bag: Vec<NodeId>,
    pub par: Vec<StateParent>,
    pub dep: Vec<u64>,
    pub ret: Vec<u64>,
    pub anc: Vec<Vec<NodeId>>,
    pub ext: Vec<Option<u64>>,
    pub rho: u64,
    pub sigma: u64,
    /// Parent of every vertex of `V_[z]` in the partial plan.
    pub partial: BTreeMap<NodeId, Option<NodeId>>,
}

/// Filled DP tables for one graph (retrieval already in ticks) and one nice
/// decomposition.
pub struct BtwRun<'a> {
    g: &'a VersionGraph,
    td: &'a TreeDecomposition,
    mode: Mode,
    tables: Vec<Table>,
}

impl<'a> BtwRun<'a> {
    /// Runs the DP bottom-up. Fails with `StateLimit` when some bag stores
    /// more than `state_limit` partial plans.
    pub fn new(g: &'a VersionGraph, td: &'a TreeDecomposition, mode: Mode, state_limit: usize) -> Result<Self, SolveError> {
        if td.width() >= 64 {
            return Err(SolveError::WidthExceeded { width: td.width(), limit: 63 });
        }
        let mut run = BtwRun { g, td, mode, tables: (0..td.len()).map(|_| Table::default()).collect() };
        for z in td.postorder() {
            let cands = match td.bag(z).kind {
                BagKind::Leaf => run.leaf(z),
                BagKind::Introduce => run.introduce(z)?,
                BagKind::Forget => run.forget(z),
                BagKind::Join => run.join(z)?,
                BagKind::Plain if td.bag(z).children.is_empty() && td.bag(z).vertices.is_empty() => {
                    vec![(Vec::new(), Val { rho: 0, sigma: 0, prov: Prov::Leaf })]
                }
                BagKind::Plain => {
                    return Err(SolveError::InvalidDecomposition(format!("bag {z} is not in nice form")));
                }
            };
            let table = collect(cands);
            let stored: usize = table.vals.iter().map(Vec::len).sum();
            if stored > state_limit {
                return Err(SolveError::StateLimit { limit: state_limit });
            }
            run.tables[z] = table;
        }
        Ok(run)
    }

    fn leaf(&self, z: usize) -> Vec<(Key, Val)> {
        let v = self.td.bag(z).vertices[0];
        let dep = u64::from(self.mode == Mode::Sum);
        let slot = Slot { par: StateParent::Root, dep, ret: 0, anc: 0, ext: None };
        vec![(vec![slot], Val { rho: 0, sigma: self.g.node_cost(v), prov: Prov::Leaf })]
    }

    fn introduce(&self, z: usize) -> Result<Vec<(Key, Val)>, SolveError> {
        let g = self.g;
        let bag = &self.td.bag(z).vertices;
        let c = self.td.bag(z).children[0];
        let cbag = &self.td.bag(c).vertices;
        let v0 = changed_vertex(bag, cbag);
        let p0 = pos(bag, v0);
        let sum = self.mode == Mode::Sum;
        let mut out = Vec::new();
        for (ki, key) in self.tables[c].keys.iter().enumerate() {
            // the child state over the new bag positions
            let mut lifted: Vec<Slot> = Vec::with_capacity(bag.len());
            for (j, &v) in bag.iter().enumerate() {
                if j == p0 {
                    lifted.push(Slot { par: StateParent::Root, dep: 0, ret: 0, anc: 0, ext: None });
                } else {
                    let mut s = key[pos(cbag, v)].clone();
                    s.anc = remap(s.anc, cbag, bag);
                    lifted.push(s);
                }
            }
            let parents = std::iter::once(None).chain(cbag.iter().filter(|&&u| g.edge(u, v0).is_some()).map(|&u| Some(u)));
            for parent in parents {
                let (ret0, anc0, cost0) = match parent {
                    None => (0, 0, g.node_cost(v0)),
                    Some(u) => {
                        let pu = pos(bag, u);
                        let e = g.edge(u, v0).expect("checked");
                        (ck(lifted[pu].ret.checked_add(e.retrieval))?, 1 << pu | lifted[pu].anc, e.storage)
                    }
                };
                let hookable: Vec<usize> = (0..bag.len())
                    .filter(|&j| {
                        j != p0
                            && lifted[j].par == StateParent::Root
                            && anc0 >> j & 1 == 0
                            && Some(bag[j]) != parent
                            && g.edge(v0, bag[j]).is_some()
                    })
                    .collect();
                for subset in 0u32..1 << hookable.len() {
                    let mut slots = lifted.clone();
                    let mut rho_add = if sum { ret0 } else { 0 };
                    let mut sigma: i128 = i128::from(cost0);
                    let mut dep0 = 1u64;
                    let mut hooked = Vec::new();
                    for (h, &pw) in hookable.iter().enumerate() {
                        if subset >> h & 1 == 0 {
                            continue;
                        }
                        let w = bag[pw];
                        hooked.push(w);
                        let e = g.edge(v0, w).expect("checked");
                        let shift = ck(ret0.checked_add(e.retrieval))?;
                        for x in 0..bag.len() {
                            if x != p0 && (x == pw || slots[x].anc >> pw & 1 == 1) {
                                slots[x].ret = ck(slots[x].ret.checked_add(shift))?;
                                slots[x].anc |= 1 << p0 | anc0;
                            }
                        }
                        if sum {
                            rho_add = ck(slots[pw].dep.checked_mul(shift).and_then(|d| d.checked_add(rho_add)))?;
                            dep0 += slots[pw].dep;
                        }
                        slots[pw].par = StateParent::Bag(v0);
                        sigma += i128::from(e.storage) - i128::from(g.node_cost(w));
                    }
                    if sum {
                        for a in bits(anc0) {
                            slots[a].dep += dep0;
                        }
                    }
                    slots[p0] = Slot {
                        par: parent.map_or(StateParent::Root, StateParent::Bag),
                        dep: if sum { dep0 } else { 0 },
                        ret: ret0,
                        anc: anc0,
                        ext: None,
                    };
                    for (vi, val) in self.tables[c].vals[ki].iter().enumerate() {
                        let s = i128::from(val.sigma) + sigma;
                        out.push((
                            slots.clone(),
                            Val {
                                rho: ck(val.rho.checked_add(rho_add))?,
                                sigma: ck(u64::try_from(s).ok())?,
                                prov: Prov::Introduce {
                                    child: Ref { key: ki as u32, val: vi as u32 },
                                    parent,
                                    hooked: hooked.clone(),
                                },
                            },
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    fn forget(&self, z: usize) -> Vec<(Key, Val)> {
        let bag = &self.td.bag(z).vertices;
        let c = self.td.bag(z).children[0];
        let cbag = &self.td.bag(c).vertices;
        let x = changed_vertex(cbag, bag);
        let px = pos(cbag, x);
        let mut out = Vec::new();
        for (ki, key) in self.tables[c].keys.iter().enumerate() {
            let mut key = key.clone();
            let mut finished = None;
            if self.mode == Mode::Max {
                let reach = key[px].ret + key[px].ext.unwrap_or(0);
                match nearest(&key, px) {
                    Some(y) => {
                        let rel = reach - key[y].ret;
                        key[y].ext = Some(key[y].ext.map_or(rel, |e| e.max(rel)));
                    }
                    None => finished = Some(reach),
                }
            }
            let slots: Key = (0..cbag.len())
                .filter(|&j| j != px)
                .map(|j| {
                    let mut s = key[j].clone();
                    if s.par == StateParent::Bag(x) {
                        s.par = StateParent::Forgotten;
                    }
                    s.anc = remap(s.anc, cbag, bag);
                    s
                })
                .collect();
            for (vi, val) in self.tables[c].vals[ki].iter().enumerate() {
                let rho = finished.map_or(val.rho, |f| val.rho.max(f));
                let prov = Prov::Forget { child: Ref { key: ki as u32, val: vi as u32 } };
                out.push((slots.clone(), Val { rho, sigma: val.sigma, prov }));
            }
        }
        out
    }

    fn join(&self, z: usize) -> Result<Vec<(Key, Val)>, SolveError> {
        let [a, b] = self.td.bag(z).children[..] else { unreachable!("join has two children") };
        let bag = &self.td.bag(z).vertices;
        let (ta, tb) = (&self.tables[a], &self.tables[b]);
        let mut out = Vec::new();
        for (ka, keya) in ta.keys.iter().enumerate() {
            for (kb, keyb) in tb.keys.iter().enumerate() {
                let Some((key, rho_delta, double)) = self.join_keys(bag, keya, keyb)? else { continue };
                for (va, x) in ta.vals[ka].iter().enumerate() {
                    for (vb, y) in tb.vals[kb].iter().enumerate() {
                        let rho = match self.mode {
                            Mode::Sum => {
                                let r = i128::from(x.rho) + i128::from(y.rho) + rho_delta;
                                ck(u64::try_from(r).ok())?
                            }
                            Mode::Max => x.rho.max(y.rho),
                        };
                        let sigma = ck(x.sigma.checked_add(y.sigma))? - double;
                        let prov = Prov::Join {
                            a: Ref { key: ka as u32, val: va as u32 },
                            b: Ref { key: kb as u32, val: vb as u32 },
                        };
                        out.push((key.clone(), Val { rho, sigma, prov }));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Glued state, the change in retrieval sum against both sides' sums
    /// (bag vertices are counted on both sides), and doubly paid storage; or
    /// `None` when the two sides cannot come from one plan.
    fn join_keys(&self, bag: &[NodeId], ka: &Key, kb: &Key) -> Result<Option<(Key, i128, u64)>, SolveError> {
        #[derive(Clone, Copy, PartialEq)]
        enum From {
            Root,
            Bag(usize),
            A,
            B,
        }
        let k = bag.len();
        let mut from = Vec::with_capacity(k);
        for i in 0..k {
            from.push(match (ka[i].par, kb[i].par) {
                (StateParent::Root, StateParent::Root) => From::Root,
                (StateParent::Bag(u), StateParent::Bag(w)) if u == w => From::Bag(pos(bag, u)),
                (StateParent::Forgotten, StateParent::Root) => From::A,
                (StateParent::Root, StateParent::Forgotten) => From::B,
                _ => return Ok(None),
            });
        }
        let sp_a: Vec<Option<usize>> = (0..k).map(|i| nearest(ka, i)).collect();
        let sp_b: Vec<Option<usize>> = (0..k).map(|i| nearest(kb, i)).collect();
        let up: Vec<Option<usize>> = (0..k)
            .map(|i| match from[i] {
                From::Root => None,
                From::Bag(p) => Some(p),
                From::A => sp_a[i],
                From::B => sp_b[i],
            })
            .collect();

        // parents before children; a cycle means the sides disagree
        let mut order = Vec::with_capacity(k);
        let mut placed = vec![false; k];
        while order.len() < k {
            let before = order.len();
            for i in 0..k {
                if !placed[i] && up[i].is_none_or(|p| placed[p]) {
                    placed[i] = true;
                    order.push(i);
                }
            }
            if order.len() == before {
                return Ok(None);
            }
        }

        let mut key: Key = vec![Slot { par: StateParent::Root, dep: 0, ret: 0, anc: 0, ext: None }; k];
        for &i in &order {
            let v = bag[i];
            let (par, ret) = match from[i] {
                From::Root => (StateParent::Root, 0),
                From::Bag(p) => (StateParent::Bag(bag[p]), ck(key[p].ret.checked_add(self.g.edge(bag[p], v).expect("plan edge").retrieval))?),
                From::A | From::B => {
                    let (side, sp) = if from[i] == From::A { (ka, sp_a[i]) } else { (kb, sp_b[i]) };
                    let ret = match sp {
                        Some(w) => ck((side[i].ret - side[w].ret).checked_add(key[w].ret))?,
                        None => side[i].ret,
                    };
                    (StateParent::Forgotten, ret)
                }
            };
            key[i].par = par;
            key[i].ret = ret;
            key[i].anc = up[i].map_or(0, |p| 1 << p | key[p].anc);
        }

        let mut rho_delta: i128 = 0;
        match self.mode {
            Mode::Sum => {
                let ext_dep = |side: &Key, sp: &[Option<usize>], i: usize| -> u64 {
                    let below: u64 = (0..k).filter(|&j| sp[j] == Some(i)).map(|j| side[j].dep).sum();
                    side[i].dep - 1 - below
                };
                let ea: Vec<u64> = (0..k).map(|i| ext_dep(ka, &sp_a, i)).collect();
                let eb: Vec<u64> = (0..k).map(|i| ext_dep(kb, &sp_b, i)).collect();
                for &i in order.iter().rev() {
                    let below: u64 = (0..k).filter(|&j| up[j] == Some(i)).map(|j| key[j].dep).sum();
                    key[i].dep = 1 + ea[i] + eb[i] + below;
                }
                let mut total: i128 = 0;
                for i in 0..k {
                    let (ea, eb) = (i128::from(ea[i]), i128::from(eb[i]));
                    total += (1 + ea + eb) * i128::from(key[i].ret)
                        - (1 + ea) * i128::from(ka[i].ret)
                        - (1 + eb) * i128::from(kb[i].ret);
                }
                rho_delta = total;
            }
            Mode::Max => {
                for i in 0..k {
                    key[i].ext = ka[i].ext.max(kb[i].ext);
                }
            }
        }

        let mut double = 0u64;
        for i in 0..k {
            let v = bag[i];
            double += match from[i] {
                From::Bag(p) => self.g.edge(bag[p], v).expect("plan edge").storage,
                _ => self.g.node_cost(v),
            };
        }
        Ok(Some((key, rho_delta, double)))
    }

    /// Least-`rho` complete plan with storage within `budget`, ties to less
    /// storage.
    pub fn best_within(&self, budget: u64) -> Option<(u64, Solution)> {
        let root = self.td.root();
        let t = &self.tables[root];
        let mut best: Option<(u64, u64, Ref)> = None;
        for (ki, vals) in t.vals.iter().enumerate() {
            for (vi, v) in vals.iter().enumerate() {
                if v.sigma <= budget && best.is_none_or(|(r, s, _)| (v.rho, v.sigma) < (r, s)) {
                    best = Some((v.rho, v.sigma, Ref { key: ki as u32, val: vi as u32 }));
                }
            }
        }
        let (rho, _, at) = best?;
        let partial = self.partial(root, at);
        let mut parent = vec![None; self.g.node_count()];
        for (v, p) in partial {
            parent[v] = p;
        }
        Some((rho, Solution::new(parent)))
    }

    /// Parent of every vertex below bag `z` in the plan behind `at`.
    fn partial(&self, z: usize, at: Ref) -> BTreeMap<NodeId, Option<NodeId>> {
        let mut parent = BTreeMap::new();
        let mut stack = vec![(z, at)];
        while let Some((z, r)) = stack.pop() {
            let b = self.td.bag(z);
            for &v in &b.vertices {
                parent.entry(v).or_insert(None);
            }
            match &self.tables[z].vals[r.key as usize][r.val as usize].prov {
                Prov::Leaf => {}
                Prov::Introduce { child, parent: p, hooked } => {
                    let v0 = changed_vertex(&b.vertices, &self.td.bag(b.children[0]).vertices);
                    if let Some(u) = p {
                        parent.insert(v0, Some(*u));
                    }
                    for &w in hooked {
                        parent.insert(w, Some(v0));
                    }
                    stack.push((b.children[0], *child));
                }
                Prov::Forget { child } => stack.push((b.children[0], *child)),
                Prov::Join { a, b: rb } => {
                    stack.push((b.children[0], *a));
                    stack.push((b.children[1], *rb));
                }
            }
        }
        parent
    }

    /// Every stored state at bag `z`, each with a partial plan behind it.
    pub fn recorded_states(&self, z: usize) -> Vec<RecordedState> {
        let bag = &self.td.bag(z).vertices;
        let t = &self.tables[z];
        let mut out = Vec::new();
        for (ki, key) in t.keys.iter().enumerate() {
            for (vi, val) in t.vals[ki].iter().enumerate() {
                out.push(RecordedState {
                    bag: bag.clone(),
                    par: key.iter().map(|s| s.par).collect(),
                    dep: key.iter().map(|s| s.dep).collect(),
                    ret: key.iter().map(|s| s.ret).collect(),
                    anc: key.iter().map(|s| bits(s.anc).map(|j| bag[j]).collect()).collect(),
                    ext: key.iter().map(|s| s.ext).collect(),
                    rho: val.rho,
                    sigma: val.sigma,
                    partial: self.partial(z, Ref { key: ki as u32, val: vi as u32 }),
                });
            }
        }
        out
    }

    /// Number of partial plans stored at bag `z`.
    pub fn stored(&self, z: usize) -> usize {
        self.tables[z].vals.iter().map(Vec::len).sum()
    }
}

/// Groups candidates by state and keeps each state's `(rho, sigma)` frontier.
fn collect(cands: Vec<(Key, Val)>) -> Table {
    let mut by_key: HashMap<Key, Vec<Val>> = HashMap::new();
    for (k, v) in cands {
        by_key.entry(k).or_default().push(v);
    }
    let mut keys: Vec<Key> = by_key.keys().cloned().collect();
    keys.sort();
    let mut vals = Vec::with_capacity(keys.len());
    for k in &keys {
        let mut list = by_key.remove(k).expect("present");
        list.sort_by_key(|v| (v.rho, v.sigma));
        let mut front: Vec<Val> = Vec::new();
        for v in list {
            if front.last().is_none_or(|l| v.sigma < l.sigma) {
                front.push(v);
            }
        }
        vals.push(front);
    }
    Table { keys, vals }
}
