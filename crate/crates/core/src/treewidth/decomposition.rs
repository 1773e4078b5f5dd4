//! Tree decompositions of the underlying undirected graph: validation,
//! min-degree construction, conversion to nice form, and a line-based file
//! format.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::SolveError;
use crate::graph::{NodeId, VersionGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BagKind {
    Leaf,
    Introduce,
    Forget,
    Join,
    /// A bag of a decomposition that is not (yet) nice.
    Plain,
}

impl fmt::Display for BagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BagKind::Leaf => "leaf",
            BagKind::Introduce => "introduce",
            BagKind::Forget => "forget",
            BagKind::Join => "join",
            BagKind::Plain => "bag",
        })
    }
}

impl FromStr for BagKind {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "leaf" => BagKind::Leaf,
            "introduce" => BagKind::Introduce,
            "forget" => BagKind::Forget,
            "join" => BagKind::Join,
            "bag" => BagKind::Plain,
            other => return Err(SolveError::InvalidDecomposition(format!("unknown bag kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bag {
    /// Sorted.
    pub vertices: Vec<NodeId>,
    pub kind: BagKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Bag>,
    root: usize,
}

fn invalid(msg: impl Into<String>) -> SolveError {
    SolveError::InvalidDecomposition(msg.into())
}

impl TreeDecomposition {
    /// Builds the tree from per-bag `(kind, parent, vertices)`; exactly one
    /// bag has no parent.
    pub fn from_parts(parts: Vec<(BagKind, Option<usize>, Vec<NodeId>)>) -> Result<Self, SolveError> {
        let m = parts.len();
        if m == 0 {
            return Err(invalid("no bags"));
        }
        let mut bags: Vec<Bag> = parts
            .into_iter()
            .map(|(kind, parent, mut vertices)| {
                vertices.sort_unstable();
                vertices.dedup();
                Bag { vertices, kind, parent, children: Vec::new() }
            })
            .collect();
        let mut root = None;
        for i in 0..m {
            match bags[i].parent {
                None if root.is_some() => return Err(invalid("more than one root bag")),
                None => root = Some(i),
                Some(p) if p >= m => return Err(invalid(format!("bag {i} has unknown parent {p}"))),
                Some(p) if p == i => return Err(invalid(format!("bag {i} is its own parent"))),
                Some(p) => bags[p].children.push(i),
            }
        }
        let root = root.ok_or_else(|| invalid("no root bag"))?;
        let td = Self { bags, root };
        if td.postorder().len() != m {
            return Err(invalid("bag tree is cyclic"));
        }
        Ok(td)
    }

    pub fn bags(&self) -> &[Bag] {
        &self.bags
    }

    pub fn bag(&self, i: usize) -> &Bag {
        &self.bags[i]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one (0 when every bag is empty).
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.vertices.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Bags reachable from the root, children before parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.bags.len());
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![(self.root, false)];
        while let Some((b, done)) = stack.pop() {
            if done {
                out.push(b);
                continue;
            }
            if std::mem::replace(&mut seen[b], true) {
                continue;
            }
            stack.push((b, true));
            for &c in self.bags[b].children.iter().rev() {
                stack.push((c, false));
            }
        }
        out
    }

    /// Lines `bag <id> <kind> <parent|-> <v>...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.bags.iter().enumerate() {
            let parent = b.parent.map_or("-".to_string(), |p| p.to_string());
            let _ = write!(out, "bag {i} {} {parent}", b.kind);
            for v in &b.vertices {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Bag ids may be any distinct
    /// integers; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, SolveError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| invalid(format!("line {}: {what}", lineno + 1));
            let mut it = line.split_whitespace();
            if it.next() != Some("bag") {
                return Err(bad("expected `bag`"));
            }
            let id: u64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad bag id"))?;
            let kind: BagKind = it.next().ok_or_else(|| bad("missing kind"))?.parse()?;
            let parent = match it.next() {
                Some("-") => None,
                Some(t) => Some(t.parse::<u64>().map_err(|_| bad("bad parent id"))?),
                None => return Err(bad("missing parent")),
            };
            let vertices = it.map(|t| t.parse::<NodeId>().map_err(|_| bad("bad vertex"))).collect::<Result<_, _>>()?;
            rows.push((id, kind, parent, vertices));
        }
        let mut index = std::collections::HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            if index.insert(row.0, i).is_some() {
                return Err(invalid(format!("bag id {} appears twice", row.0)));
            }
        }
        let parts = rows
            .into_iter()
            .map(|(_, kind, parent, vertices)| {
                let parent = match parent {
                    None => None,
                    Some(p) => Some(*index.get(&p).ok_or_else(|| invalid(format!("unknown parent bag {p}")))?),
                };
                Ok((kind, parent, vertices))
            })
            .collect::<Result<_, SolveError>>()?;
        Self::from_parts(parts)
    }
}

/// Checks the three tree-decomposition conditions for the underlying
/// undirected graph of `g`: (i) every vertex is in a bag, (ii) the bags
/// holding a vertex form a connected subtree, (iii) every edge is inside a bag.
pub fn validate(g: &VersionGraph, td: &TreeDecomposition) -> Result<(), SolveError> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    // bags holding v whose parent does not: exactly one when (ii) holds
    let mut tops = vec![0usize; n];
    for b in td.bags() {
        let parent_bag: &[NodeId] = b.parent.map_or(&[], |p| &td.bag(p).vertices);
        for &v in &b.vertices {
            if v >= n {
                return Err(invalid(format!("vertex {v} is not in the graph")));
            }
            seen[v] = true;
            if parent_bag.binary_search(&v).is_err() {
                tops[v] += 1;
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(invalid(format!("condition (i): vertex {v} is in no bag")));
    }
    if let Some(v) = tops.iter().position(|&t| t > 1) {
        return Err(invalid(format!("condition (ii): bags holding vertex {v} are not connected")));
    }
    let mut pairs: BTreeSet<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.src.min(e.dst), e.src.max(e.dst))).collect();
    for b in td.bags() {
        for (i, &u) in b.vertices.iter().enumerate() {
            for &v in &b.vertices[i + 1..] {
                pairs.remove(&(u, v));
            }
        }
    }
    if let Some(&(u, v)) = pairs.iter().next() {
        return Err(invalid(format!("condition (iii): edge {u} - {v} is in no bag")));
    }
    Ok(())
}

/// Checks the nice-form rules: leaves hold one vertex, an introduce bag is
/// its only child's bag plus one vertex, a forget bag is its only child's bag
/// minus one vertex, and a join bag equals both of its two children's bags.
pub fn validate_nice(td: &TreeDecomposition) -> Result<(), SolveError> {
    for (i, b) in td.bags().iter().enumerate() {
        let child = |k: usize| &td.bag(b.children[k]).vertices;
        let ok = match b.kind {
            BagKind::Leaf => b.children.is_empty() && b.vertices.len() == 1,
            BagKind::Introduce => b.children.len() == 1 && differs_by_one(&b.vertices, child(0)),
            BagKind::Forget => b.children.len() == 1 && differs_by_one(child(0), &b.vertices),
            BagKind::Join => b.children.len() == 2 && child(0) == &b.vertices && child(1) == &b.vertices,
            BagKind::Plain => false,
        };
        if !ok {
            return Err(invalid(format!("bag {i} breaks the {} rule", b.kind)));
        }
    }
    Ok(())
}

/// `big` is `small` plus exactly one vertex.
fn differs_by_one(big: &[NodeId], small: &[NodeId]) -> bool {
    big.len() == small.len() + 1 && small.iter().all(|v| big.binary_search(v).is_ok())
}

/// The vertex an introduce or forget bag adds or drops.
pub(crate) fn changed_vertex(big: &[NodeId], small: &[NodeId]) -> NodeId {
    *big.iter().find(|v| small.binary_search(v).is_err()).expect("bags differ")
}

/// Decomposition from min-degree elimination (ties to the smaller id).
pub fn min_degree_decomposition(g: &VersionGraph) -> TreeDecomposition {
    let n = g.node_count();
    if n == 0 {
        return TreeDecomposition::from_parts(vec![(BagKind::Plain, None, Vec::new())]).expect("one bag");
    }
    let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        adj[e.src].insert(e.dst);
        adj[e.dst].insert(e.src);
    }
    let mut alive = vec![true; n];
    let mut position = vec![0usize; n];
    let mut bags: Vec<(NodeId, Vec<NodeId>)> = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (adj[v].len(), v)).expect("a vertex is left");
        let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        alive[v] = false;
        position[v] = step;
        let mut bag = nbrs;
        bag.push(v);
        bags.push((v, bag));
    }
    // a bag's parent is the bag of its earliest-eliminated neighbour; the
    // roots of further components hang below the last bag
    let last = n - 1;
    let parts = bags
        .iter()
        .enumerate()
        .map(|(step, (v, bag))| {
            let parent = bag.iter().filter(|&u| u != v).map(|&u| position[u]).min();
            let parent = match parent {
                Some(p) => Some(p),
                None if step == last => None,
                None => Some(last),
            };
            (BagKind::Plain, parent, bag.clone())
        })
        .collect();
    TreeDecomposition::from_parts(parts).expect("elimination tree is a tree")
}

/// Nice decomposition of the same width with an empty root bag.
pub fn make_nice(td: &TreeDecomposition) -> TreeDecomposition {
    let mut out: Vec<(BagKind, Vec<usize>, Vec<NodeId>)> = Vec::new();
    let push = |out: &mut Vec<(BagKind, Vec<usize>, Vec<NodeId>)>, kind, children, bag| {
        out.push((kind, children, bag));
        out.len() - 1
    };
    // walks from node `id` to bag `to`: forgets first, then introduces
    let chain = |out: &mut Vec<(BagKind, Vec<usize>, Vec<NodeId>)>, mut id: usize, to: &[NodeId]| {
        let mut cur = out[id].2.clone();
        for v in cur.clone() {
            if to.binary_search(&v).is_err() {
                cur.retain(|&x| x != v);
                out.push((BagKind::Forget, vec![id], cur.clone()));
                id = out.len() - 1;
            }
        }
        for &v in to {
            if let Err(at) = cur.binary_search(&v) {
                cur.insert(at, v);
                out.push((BagKind::Introduce, vec![id], cur.clone()));
                id = out.len() - 1;
            }
        }
        id
    };

    let mut built: Vec<Option<usize>> = vec![None; td.len()];
    for b in td.postorder() {
        let bag = &td.bag(b).vertices;
        let subs: Vec<usize> = td.bag(b).children.iter().filter_map(|&c| built[c]).collect();
        built[b] = if subs.is_empty() {
            match bag.first() {
                None => None,
                Some(&first) => {
                    let leaf = push(&mut out, BagKind::Leaf, Vec::new(), vec![first]);
                    Some(chain(&mut out, leaf, bag))
                }
            }
        } else {
            let adapted: Vec<usize> = subs.into_iter().map(|s| chain(&mut out, s, bag)).collect();
            let mut acc = adapted[0];
            for &next in &adapted[1..] {
                acc = push(&mut out, BagKind::Join, vec![acc, next], bag.clone());
            }
            Some(acc)
        };
    }
    let root = match built[td.root()] {
        Some(top) => chain(&mut out, top, &[]),
        None => push(&mut out, BagKind::Plain, Vec::new(), Vec::new()),
    };

    let mut parent = vec![None; out.len()];
    for (i, (_, children, _)) in out.iter().enumerate() {
        for &c in children {
            parent[c] = Some(i);
        }
    }
    debug_assert!(parent[root].is_none());
    let parts = out.into_iter().zip(parent).map(|((kind, _, bag), p)| (kind, p, bag)).collect();
    TreeDecomposition::from_parts(parts).expect("nice tree is a tree")
}

/// Validated nice decomposition: `provided` (any form) or min-degree
/// elimination, converted to nice form with an empty root bag.
pub fn build_decomposition(
    g: &VersionGraph,
    provided: Option<&TreeDecomposition>,
) -> Result<TreeDecomposition, SolveError> {
    let raw = match provided {
        Some(td) => {
            validate(g, td)?;
            td.clone()
        }
        None => min_degree_decomposition(g),
    };
    let nice = make_nice(&raw);
    debug_assert!(validate_nice(&nice).is_ok() || g.node_count() == 0);
    Ok(nice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> VersionGraph {
        let mut g = VersionGraph::new(vec![1; n]);
        for &(u, v) in edges {
            g.add_edge(u, v, 1, 1).unwrap();
        }
        g
    }

    #[test]
    fn tree_has_width_one() {
        let g = undirected(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        let nice = build_decomposition(&g, None).unwrap();
        assert_eq!(nice.width(), 1);
        validate(&g, &nice).unwrap();
        validate_nice(&nice).unwrap();
        assert!(nice.bag(nice.root()).vertices.is_empty());
    }

    #[test]
    fn triangle_has_width_two() {
        let g = undirected(3, &[(0, 1), (1, 2), (2, 0)]);
        let nice = build_decomposition(&g, None).unwrap();
        assert_eq!(nice.width(), 2);
        validate_nice(&nice).unwrap();
    }

    #[test]
    fn missing_edge_bag_is_condition_three() {
        let g = undirected(3, &[(0, 1), (1, 2), (2, 0)]);
        let td = TreeDecomposition::parse("bag 0 bag - 0 1\nbag 1 bag 0 1 2\n").unwrap();
        let err = validate(&g, &td).unwrap_err();
        assert!(matches!(err, SolveError::InvalidDecomposition(ref m) if m.contains("condition (iii)")), "{err}");
    }

    #[test]
    fn disconnected_occurrences_are_condition_two() {
        let g = undirected(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::parse("bag 0 bag - 0 1\nbag 1 bag 0 1 2\nbag 2 bag 1 0\n").unwrap();
        assert!(matches!(validate(&g, &td), Err(SolveError::InvalidDecomposition(m)) if m.contains("condition (ii)")));
    }

    #[test]
    fn text_round_trip() {
        let g = undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let nice = build_decomposition(&g, None).unwrap();
        assert_eq!(TreeDecomposition::parse(&nice.to_text()).unwrap(), nice);
    }

    #[test]
    fn provided_decomposition_is_normalized() {
        let g = undirected(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::parse("bag 7 bag - 0 1\nbag 3 bag 7 1 2\n").unwrap();
        let nice = build_decomposition(&g, Some(&td)).unwrap();
        validate_nice(&nice).unwrap();
        validate(&g, &nice).unwrap();
        assert_eq!(nice.width(), 1);
    }
}
