//! Bidirectional trees, the binary-tree reduction, and retrieval discretization.

use num_rational::Ratio;

use crate::error::SolveError;
use crate::graph::{Edge, NodeId, VersionGraph};
use crate::solution::Solution;

/// A version graph whose underlying undirected graph is a tree and in which
/// every tree edge is present in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidirectionalTree {
    graph: VersionGraph,
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    preorder: Vec<NodeId>,
    counted: Vec<bool>,
}

impl BidirectionalTree {
    pub fn new(graph: VersionGraph, root: NodeId) -> Result<Self, SolveError> {
        let n = graph.node_count();
        Self::with_counted(graph, root, vec![true; n])
    }

    /// `counted[v] == false` marks nodes whose retrieval does not enter the
    /// objectives (helpers introduced by [`binarize_tree`]).
    pub fn with_counted(graph: VersionGraph, root: NodeId, counted: Vec<bool>) -> Result<Self, SolveError> {
        let n = graph.node_count();
        if n == 0 {
            return Err(SolveError::NotATree("empty graph".into()));
        }
        if root >= n {
            return Err(SolveError::InvalidInput(format!("root {root} is out of range")));
        }
        if graph.edge_count() != 2 * (n - 1) {
            return Err(SolveError::NotATree(format!(
                "{} edges, a bidirectional tree on {n} nodes has {}",
                graph.edge_count(),
                2 * (n - 1)
            )));
        }
        if let Some(e) = graph.edges().iter().find(|e| graph.edge(e.dst, e.src).is_none()) {
            return Err(SolveError::NotATree(format!("edge {} -> {} has no reverse", e.src, e.dst)));
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            let mut next: Vec<NodeId> = graph.out_edges(v).map(|e| e.dst).filter(|&c| !seen[c]).collect();
            next.sort_unstable();
            for &c in &next {
                seen[c] = true;
                parent[c] = Some(v);
            }
            children[v] = next.clone();
            stack.extend(next.into_iter().rev());
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(SolveError::NotATree(format!("node {v} is disconnected")));
        }
        Ok(Self { graph, root, parent, children, preorder, counted })
    }

    /// Same shape with different costs; `graph` must have the same edge set.
    pub fn with_graph(&self, graph: VersionGraph) -> Self {
        debug_assert_eq!(graph.edge_count(), self.graph.edge_count());
        Self { graph, ..self.clone() }
    }

    pub fn graph(&self) -> &VersionGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn tree_parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn preorder(&self) -> &[NodeId] {
        &self.preorder
    }

    pub fn counted(&self) -> &[bool] {
        &self.counted
    }

    /// The delta `u -> v`; both must be tree neighbours.
    pub fn edge(&self, u: NodeId, v: NodeId) -> &Edge {
        self.graph.edge(u, v).expect("tree neighbours are joined both ways")
    }
}

/// A binarized tree together with the node it stands for in the source tree.
#[derive(Debug, Clone)]
pub struct Binarized {
    pub tree: BidirectionalTree,
    /// `origin[x]` is the source node that `x` copies; identity on source nodes.
    pub origin: Vec<NodeId>,
    pub source_nodes: usize,
}

impl Binarized {
    /// Translates a plan on the binarized tree back to the source tree.
    ///
    /// A source node is materialized when it or one of its helper copies is;
    /// every other node takes the first node outside its own copy group on its
    /// retrieval chain as parent. Neither storage nor any retrieval cost grows.
    pub fn map_back(&self, sol: &Solution) -> Solution {
        let n = self.source_nodes;
        let mut materialized = vec![false; n];
        for x in sol.materialized() {
            materialized[self.origin[x]] = true;
        }
        let parent = (0..n)
            .map(|x| {
                if materialized[x] {
                    return None;
                }
                let mut y = sol.parent(x).expect("not materialized");
                while self.origin[y] == x {
                    y = sol.parent(y).expect("helper chain ends in a materialized copy");
                }
                Some(self.origin[y])
            })
            .collect();
        Solution::new(parent)
    }
}

/// Rewrites the tree so that every node has at most two children.
///
/// A node `v` with children `c_1..c_k`, `k > 2`, keeps `c_1` and gets a helper
/// child `v'` that adopts `c_2..c_k`. The helper is joined to `v` by free
/// deltas in both directions, copies `v`'s deltas to and from the adopted
/// children, and costs `s_v` to materialize. Helpers are split again while they
/// have more than two children, so the result has fewer than `2n` nodes.
pub fn binarize_tree(t: &BidirectionalTree) -> Binarized {
    let n = t.node_count();
    let mut costs = t.graph().node_costs().to_vec();
    let mut origin: Vec<NodeId> = (0..n).collect();
    let mut parent: Vec<Option<NodeId>> = (0..n).map(|v| t.tree_parent(v)).collect();
    for &v in t.preorder() {
        let mut anchor = v;
        let mut rest: &[NodeId] = t.children(v);
        while rest.len() > 2 {
            let h = costs.len();
            costs.push(t.graph().node_cost(v));
            origin.push(v);
            parent.push(Some(anchor));
            for &c in &rest[1..] {
                parent[c] = Some(h);
            }
            anchor = h;
            rest = &rest[1..];
        }
    }
    let mut g = VersionGraph::new(costs);
    for x in 0..parent.len() {
        let Some(p) = parent[x] else { continue };
        if x >= n {
            g.add_edge(p, x, 0, 0).unwrap();
            g.add_edge(x, p, 0, 0).unwrap();
        } else {
            let src = origin[p];
            let down = t.edge(src, x);
            let up = t.edge(x, src);
            g.add_edge(p, x, down.storage, down.retrieval).unwrap();
            g.add_edge(x, p, up.storage, up.retrieval).unwrap();
        }
    }
    let counted = (0..parent.len()).map(|x| x < n && t.counted()[x]).collect();
    let tree = BidirectionalTree::with_counted(g, t.root(), counted).expect("binarization keeps a tree");
    Binarized { tree, origin, source_nodes: n }
}

/// Rounding of retrieval costs to integer multiples of a tick length.
///
/// With `t = n^4 / eps` ticks the tick length is `l = n^2 r_max / t =
/// eps r_max / n^2`, and every retrieval cost `r` becomes `ceil(r / l)` ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discretization {
    pub epsilon: Ratio<u64>,
    pub n: usize,
    pub r_max: u64,
    /// `t`
    pub ticks: Ratio<u128>,
    /// `l`
    pub tick: Ratio<u128>,
    /// `r_max == 0`: nothing to round, ticks equal costs.
    pub degenerate: bool,
}

impl Discretization {
    pub fn new(n: usize, r_max: u64, epsilon: Ratio<u64>) -> Self {
        let n2 = (n.max(1) as u128).pow(2);
        let (p, q) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
        let ticks = Ratio::new(n2 * n2 * q, p);
        if r_max == 0 {
            return Self { epsilon, n, r_max, ticks, tick: Ratio::from_integer(1), degenerate: true };
        }
        let tick = Ratio::new(r_max as u128 * p, n2 * q);
        Self { epsilon, n, r_max, ticks, tick, degenerate: false }
    }

    /// Tick length 1: costs are kept as they are.
    pub fn identity() -> Self {
        Self {
            epsilon: Ratio::from_integer(0),
            n: 0,
            r_max: 0,
            ticks: Ratio::from_integer(0),
            tick: Ratio::from_integer(1),
            degenerate: true,
        }
    }

    /// `ceil(r / l)`
    pub fn scale(&self, r: u64) -> u64 {
        let num = r as u128 * self.tick.denom();
        let den = *self.tick.numer();
        let q = num.div_ceil(den);
        u64::try_from(q).expect("tick count fits u64")
    }

    /// `ticks * l`
    pub fn unscale(&self, ticks: u64) -> Ratio<u128> {
        self.tick * Ratio::from_integer(ticks as u128)
    }

    /// How far a retrieval sum over `n` nodes can drift: `n^2 l`.
    pub fn sum_error_bound(&self) -> Ratio<u128> {
        self.tick * Ratio::from_integer((self.n as u128).pow(2))
    }
}

/// Discretizes every edge of `g` with `l = eps r_max / n^2` for `n = |V(g)|`.
pub fn discretize(g: &VersionGraph, epsilon: Ratio<u64>) -> (VersionGraph, Discretization) {
    let d = Discretization::new(g.node_count(), g.max_retrieval(), epsilon);
    let scaled = g.map_edge_costs(|_, e| (e.storage, d.scale(e.retrieval)));
    (scaled, d)
}
