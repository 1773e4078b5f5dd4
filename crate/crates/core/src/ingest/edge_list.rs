//! The plain-text graph format: `node <id> <s_v>` and
//! `edge <src> <dst> <s_e> <r_e>`, one record per line, `#` starts a comment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::IngestError;
use crate::graph::{GraphError, NodeId, VersionGraph};

fn field<T: FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, IngestError> {
    let tok = tok.ok_or_else(|| IngestError::Parse { line, message: format!("missing {what}") })?;
    tok.parse()
        .map_err(|_| IngestError::Parse { line, message: format!("bad {what} {tok:?}") })
}

pub fn parse_edge_list(text: &str) -> Result<VersionGraph, IngestError> {
    let mut nodes: Vec<Option<u64>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "node" => {
                let id: NodeId = field(line, toks.next(), "node id")?;
                let cost: u64 = field(line, toks.next(), "node cost")?;
                if id >= nodes.len() {
                    nodes.resize(id + 1, None);
                }
                if nodes[id].replace(cost).is_some() {
                    return Err(IngestError::DuplicateNode { line, id });
                }
            }
            "edge" => {
                let src: NodeId = field(line, toks.next(), "source")?;
                let dst: NodeId = field(line, toks.next(), "target")?;
                let s: u64 = field(line, toks.next(), "storage cost")?;
                let r: u64 = field(line, toks.next(), "retrieval cost")?;
                edges.push((line, src, dst, s, r));
            }
            other => return Err(IngestError::Parse { line, message: format!("unknown record {other:?}") }),
        }
        if let Some(extra) = toks.next() {
            return Err(IngestError::Parse { line, message: format!("trailing token {extra:?}") });
        }
    }
    let costs = nodes
        .iter()
        .enumerate()
        .map(|(id, c)| c.ok_or(IngestError::SparseIds { count: nodes.len(), missing: id }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut g = VersionGraph::new(costs);
    for (line, src, dst, s, r) in edges {
        g.add_edge(src, dst, s, r).map_err(|e| match e {
            GraphError::UnknownNode(id) => IngestError::UnknownNode { line, id },
            GraphError::DuplicateEdge(src, dst) => IngestError::DuplicateEdge { line, src, dst },
            other => IngestError::Parse { line, message: other.to_string() },
        })?;
    }
    Ok(g)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<VersionGraph, IngestError> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &VersionGraph) -> String {
    let mut out = String::new();
    for (v, s) in g.node_costs().iter().enumerate() {
        writeln!(out, "node {v} {s}").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "edge {} {} {} {}", e.src, e.dst, e.storage, e.retrieval).unwrap();
    }
    out
}

pub fn save_edge_list(g: &VersionGraph, path: impl AsRef<Path>) -> Result<(), IngestError> {
    Ok(fs::write(path, write_edge_list(g))?)
}
