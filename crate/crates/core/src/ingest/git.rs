//! Version graphs from commit histories.
//!
//! The library reads a JSON dump; `scripts/git_dump.py` produces one from a
//! real repository.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::graph::VersionGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commit {
    pub id: String,
    pub bytes: u64,
    #[serde(default)]
    pub parents: Vec<String>,
}

/// Size of the delta that rebuilds `to` from `from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub from: String,
    pub to: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitDump {
    pub commits: Vec<Commit>,
    #[serde(default)]
    pub deltas: Vec<Delta>,
}

impl CommitDump {
    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestedHistory {
    pub graph: VersionGraph,
    /// Commit id of each node.
    pub ids: Vec<String>,
}

/// One node per commit, numbered so that parents precede children (ties in
/// dump order), and both deltas of every parent/child pair as edges with
/// `s_e = r_e = bytes`.
pub fn ingest_git(dump: &CommitDump) -> Result<IngestedHistory, IngestError> {
    let mut pos = HashMap::new();
    for (i, c) in dump.commits.iter().enumerate() {
        if pos.insert(c.id.as_str(), i).is_some() {
            return Err(IngestError::DuplicateCommit(c.id.clone()));
        }
    }
    let parents: Vec<Vec<usize>> = dump
        .commits
        .iter()
        .map(|c| {
            c.parents
                .iter()
                .map(|p| pos.get(p.as_str()).copied().ok_or_else(|| IngestError::UnknownCommit(p.clone())))
                .collect()
        })
        .collect::<Result<_, _>>()?;

    // Kahn's algorithm, always taking the earliest ready commit.
    let n = dump.commits.len();
    let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&c| pending[c] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(c) = ready.pop_first() {
        order.push(c);
        for &ch in &children[c] {
            pending[ch] -= 1;
            if pending[ch] == 0 {
                ready.insert(ch);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&c| pending[c] > 0).unwrap();
        return Err(IngestError::CyclicHistory(dump.commits[stuck].id.clone()));
    }
    let mut node = vec![0; n];
    for (i, &c) in order.iter().enumerate() {
        node[c] = i;
    }

    let mut delta = HashMap::new();
    for d in &dump.deltas {
        let key = (d.from.as_str(), d.to.as_str());
        for id in [key.0, key.1] {
            if !pos.contains_key(id) {
                return Err(IngestError::UnknownCommit(id.to_string()));
            }
        }
        if delta.insert(key, d.bytes).is_some() {
            return Err(IngestError::UnexpectedDelta { from: d.from.clone(), to: d.to.clone() });
        }
    }

    let mut g = VersionGraph::new(order.iter().map(|&c| dump.commits[c].bytes).collect());
    let mut used = HashSet::new();
    for &c in &order {
        let child = &dump.commits[c];
        for &p in &parents[c] {
            let parent = &dump.commits[p];
            for (a, b, u, v) in [(parent, child, node[p], node[c]), (child, parent, node[c], node[p])] {
                let key = (a.id.as_str(), b.id.as_str());
                let bytes = *delta
                    .get(&key)
                    .ok_or_else(|| IngestError::MissingDelta { from: a.id.clone(), to: b.id.clone() })?;
                if !used.insert(key) {
                    continue;
                }
                g.add_edge(u, v, bytes, bytes).expect("endpoints exist and pairs are distinct");
            }
        }
    }
    if let Some(d) = dump.deltas.iter().find(|d| !used.contains(&(d.from.as_str(), d.to.as_str()))) {
        return Err(IngestError::UnexpectedDelta { from: d.from.clone(), to: d.to.clone() });
    }
    let ids = order.iter().map(|&c| dump.commits[c].id.clone()).collect();
    Ok(IngestedHistory { graph: g, ids })
}
