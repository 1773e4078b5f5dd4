//! MSR as an integer program in CPLEX LP text form.
//!
//! Works on the extended graph: `x_e` counts the versions retrieved through
//! edge `e`, binary `I_e` says whether `e` is stored, and materializing `v`
//! is storing `(v_aux, v)`. Variable names are `x_<src>_<dst>` and
//! `I_<src>_<dst>` with the auxiliary root written `a`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IngestError;
use crate::graph::{NodeId, VersionGraph};

const TERMS_PER_LINE: usize = 8;

fn name(aux: NodeId, v: NodeId) -> String {
    if v == aux {
        "a".to_string()
    } else {
        v.to_string()
    }
}

fn push_sum(out: &mut String, head: &str, terms: &[(i128, String)], tail: &str) {
    out.push(' ');
    out.push_str(head);
    for (i, (coef, var)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0 { "-" } else { "+" };
        if i > 0 || *coef < 0 {
            write!(out, " {sign}").unwrap();
        }
        match coef.unsigned_abs() {
            1 => write!(out, " {var}").unwrap(),
            c => write!(out, " {c} {var}").unwrap(),
        }
    }
    out.push_str(tail);
    out.push('\n');
}

/// LP text of MSR with storage budget `storage_budget`.
pub fn export_ilp(g: &VersionGraph, storage_budget: u64) -> String {
    let n = g.node_count();
    let x = g.extended();
    let ext = x.graph();
    let aux = x.aux_root();
    let edge_name = |src, dst| format!("{}_{}", name(aux, src), name(aux, dst));
    let names: Vec<String> = ext.edges().iter().map(|e| edge_name(e.src, e.dst)).collect();

    let mut out = String::new();
    writeln!(out, "\\ MSR on {n} versions, storage budget {storage_budget}").unwrap();
    out.push_str("Minimize\n");
    let obj: Vec<_> = ext.edges().iter().zip(&names).map(|(e, nm)| (i128::from(e.retrieval), format!("x_{nm}"))).collect();
    push_sum(&mut out, "obj:", &obj, "");

    out.push_str("Subject To\n");
    for nm in &names {
        writeln!(out, " ind_{nm}: x_{nm} - {n} I_{nm} <= 0").unwrap();
    }
    let storage: Vec<_> = ext.edges().iter().zip(&names).map(|(e, nm)| (i128::from(e.storage), format!("I_{nm}"))).collect();
    push_sum(&mut out, "storage:", &storage, &format!(" <= {storage_budget}"));
    for v in 0..n {
        let mut terms: Vec<_> = ext.in_edges(v).map(|e| (1, format!("x_{}", edge_name(e.src, e.dst)))).collect();
        terms.extend(ext.out_edges(v).map(|e| (-1, format!("x_{}", edge_name(e.src, e.dst)))));
        push_sum(&mut out, &format!("sink_{v}:"), &terms, " = 1");
    }

    out.push_str("Bounds\n");
    for nm in &names {
        writeln!(out, " 0 <= x_{nm} <= {}", n + 1).unwrap();
    }
    out.push_str("Generals\n");
    for chunk in names.chunks(TERMS_PER_LINE) {
        let line: Vec<_> = chunk.iter().map(|nm| format!("x_{nm}")).collect();
        writeln!(out, " {}", line.join(" ")).unwrap();
    }
    out.push_str("Binaries\n");
    for chunk in names.chunks(TERMS_PER_LINE) {
        let line: Vec<_> = chunk.iter().map(|nm| format!("I_{nm}")).collect();
        writeln!(out, " {}", line.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

pub fn write_ilp(g: &VersionGraph, storage_budget: u64, path: impl AsRef<Path>) -> Result<(), IngestError> {
    Ok(fs::write(path, export_ilp(g, storage_budget))?)
}
