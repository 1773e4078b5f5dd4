//! Version graphs, their auxiliary-root extension, and structural validation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index, `0..n`.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge {0} -> {1} is not in the graph")]
    MissingEdge(NodeId, NodeId),
    #[error("solution covers {found} nodes, graph has {expected}")]
    SolutionSize { expected: usize, found: usize },
    #[error("retrieval chain through node {0} is cyclic")]
    CyclicSolution(NodeId),
    #[error("cost arithmetic overflowed u64")]
    Overflow,
}

/// A stored delta: `src` can reconstruct `dst` from `storage` bytes in `retrieval` time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub storage: u64,
    pub retrieval: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VersionGraph {
    node_costs: Vec<u64>,
    edges: Vec<Edge>,
    index: HashMap<(NodeId, NodeId), usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl VersionGraph {
    /// Graph with one node per entry of `node_costs` and no edges.
    pub fn new(node_costs: Vec<u64>) -> Self {
        let n = node_costs.len();
        Self {
            node_costs,
            edges: Vec::new(),
            index: HashMap::new(),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, storage: u64, retrieval: u64) -> Result<usize, GraphError> {
        self.check_endpoints(src, dst)?;
        if self.index.contains_key(&(src, dst)) {
            return Err(GraphError::DuplicateEdge(src, dst));
        }
        Ok(self.push_edge(Edge { src, dst, storage, retrieval }))
    }

    /// Like [`add_edge`](Self::add_edge), but a parallel edge replaces the
    /// existing one when it is lexicographically cheaper in `(storage, retrieval)`.
    pub fn add_edge_keep_cheaper(
        &mut self,
        src: NodeId,
        dst: NodeId,
        storage: u64,
        retrieval: u64,
    ) -> Result<usize, GraphError> {
        self.check_endpoints(src, dst)?;
        if let Some(&id) = self.index.get(&(src, dst)) {
            let e = &mut self.edges[id];
            if (storage, retrieval) < (e.storage, e.retrieval) {
                e.storage = storage;
                e.retrieval = retrieval;
            }
            return Ok(id);
        }
        Ok(self.push_edge(Edge { src, dst, storage, retrieval }))
    }

    fn check_endpoints(&self, src: NodeId, dst: NodeId) -> Result<(), GraphError> {
        let n = self.node_count();
        if src >= n {
            return Err(GraphError::UnknownNode(src));
        }
        if dst >= n {
            return Err(GraphError::UnknownNode(dst));
        }
        if src == dst {
            return Err(GraphError::SelfLoop(src));
        }
        Ok(())
    }

    fn push_edge(&mut self, e: Edge) -> usize {
        let id = self.edges.len();
        self.index.insert((e.src, e.dst), id);
        self.out_edges[e.src].push(id);
        self.in_edges[e.dst].push(id);
        self.edges.push(e);
        id
    }

    pub fn node_count(&self) -> usize {
        self.node_costs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_cost(&self, v: NodeId) -> u64 {
        self.node_costs[v]
    }

    pub fn node_costs(&self) -> &[u64] {
        &self.node_costs
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_by_id(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_id(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        self.index.get(&(src, dst)).copied()
    }

    pub fn edge(&self, src: NodeId, dst: NodeId) -> Option<&Edge> {
        self.edge_id(src, dst).map(|id| &self.edges[id])
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.out_edges[v].iter().map(move |&id| &self.edges[id])
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edges[v].iter().map(move |&id| &self.edges[id])
    }

    /// Largest edge retrieval cost, `r_max`; zero for an edgeless graph.
    pub fn max_retrieval(&self) -> u64 {
        self.edges.iter().map(|e| e.retrieval).max().unwrap_or(0)
    }

    /// Copy of the graph with every edge's costs replaced by `f(edge_id, edge)`.
    pub fn map_edge_costs(&self, mut f: impl FnMut(usize, &Edge) -> (u64, u64)) -> Self {
        let mut g = self.clone();
        for (id, e) in g.edges.iter_mut().enumerate() {
            let (s, r) = f(id, e);
            e.storage = s;
            e.retrieval = r;
        }
        g
    }

    /// Copy of the graph with node costs replaced.
    pub fn with_node_costs(&self, node_costs: Vec<u64>) -> Self {
        assert_eq!(node_costs.len(), self.node_count());
        let mut g = self.clone();
        g.node_costs = node_costs;
        g
    }

    /// Adds the auxiliary root `v_aux` (index `n`) with an edge `(v_aux, v)` of
    /// cost `(s_v, 0)` for every node.
    pub fn extended(&self) -> ExtendedGraph {
        let n = self.node_count();
        let mut costs = self.node_costs.clone();
        costs.push(0);
        let mut g = VersionGraph::new(costs);
        for e in &self.edges {
            g.push_edge(*e);
        }
        for v in 0..n {
            g.push_edge(Edge { src: n, dst: v, storage: self.node_costs[v], retrieval: 0 });
        }
        ExtendedGraph { graph: g, base_nodes: n }
    }
}

/// A version graph plus the auxiliary root; materializing `v` is storing `(v_aux, v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    graph: VersionGraph,
    base_nodes: usize,
}

impl ExtendedGraph {
    pub fn aux_root(&self) -> NodeId {
        self.base_nodes
    }

    /// Number of real versions (the auxiliary root excluded).
    pub fn base_node_count(&self) -> usize {
        self.base_nodes
    }

    pub fn graph(&self) -> &VersionGraph {
        &self.graph
    }
}

/// Which cost rule a triple breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleViolation {
    pub u: NodeId,
    pub w: NodeId,
    pub v: NodeId,
    pub storage: bool,
    pub retrieval: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub triangle_violations: Vec<TriangleViolation>,
    /// Edges `(u, v)` with `s_u + s_{u,v} < s_v`.
    pub generalized_violations: Vec<(NodeId, NodeId)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.triangle_violations.is_empty() && self.generalized_violations.is_empty()
    }
}

/// Lists cost-rule violations. Self-loops and parallel edges cannot exist in a
/// constructed [`VersionGraph`]; they are rejected when edges are added.
///
/// The triangle check looks at every two-edge path `u -> w -> v` whose shortcut
/// `u -> v` is present, so it costs `O(sum of in-degree * out-degree)`.
pub fn validate_graph(g: &VersionGraph, check_triangle: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    if check_triangle {
        for first in g.edges() {
            let (u, w) = (first.src, first.dst);
            for second in g.out_edges(w) {
                let v = second.dst;
                if v == u {
                    continue;
                }
                let Some(short) = g.edge(u, v) else { continue };
                let storage = short.storage > first.storage.saturating_add(second.storage);
                let retrieval = short.retrieval > first.retrieval.saturating_add(second.retrieval);
                if storage || retrieval {
                    report.triangle_violations.push(TriangleViolation { u, w, v, storage, retrieval });
                }
            }
        }
        report.triangle_violations.sort_by_key(|t| (t.u, t.w, t.v));
    }
    for e in g.edges() {
        if g.node_cost(e.src).saturating_add(e.storage) < g.node_cost(e.dst) {
            report.generalized_violations.push((e.src, e.dst));
        }
    }
    report
}
