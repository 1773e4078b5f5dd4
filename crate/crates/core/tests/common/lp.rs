//! Reads the LP text back and checks an assignment against it, without a solver.

use std::collections::{BTreeMap, BTreeSet};

use verstore::{Solution, VersionGraph};

/// `(name, terms, op, rhs)`.
pub type Constraint = (String, Vec<(i128, String)>, String, i128);

#[derive(Debug, Default)]
pub struct LpModel {
    pub objective: Vec<(i128, String)>,
    pub constraints: Vec<Constraint>,
    pub bounds: BTreeMap<String, (i128, i128)>,
    pub generals: BTreeSet<String>,
    pub binaries: BTreeSet<String>,
}

fn terms(tokens: &[&str]) -> Vec<(i128, String)> {
    let mut out = Vec::new();
    let mut sign = 1;
    let mut coef: Option<i128> = None;
    for t in tokens {
        match *t {
            "+" => sign = 1,
            "-" => sign = -1,
            t => match t.parse::<i128>() {
                Ok(c) => coef = Some(c),
                Err(_) => {
                    out.push((sign * coef.take().unwrap_or(1), t.to_string()));
                    sign = 1;
                }
            },
        }
    }
    out
}

pub fn parse(text: &str) -> LpModel {
    let mut model = LpModel::default();
    let mut section = "";
    let mut statements: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with('\\') || t.is_empty() {
            continue;
        }
        match t {
            "Minimize" | "Subject To" | "Bounds" | "Generals" | "Binaries" | "End" => {
                section = match t {
                    "Minimize" => "min",
                    "Subject To" => "st",
                    "Bounds" => "bounds",
                    "Generals" => "gen",
                    "Binaries" => "bin",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        let starts_statement = match section {
            "min" | "st" => t.contains(':'),
            _ => true,
        };
        if starts_statement {
            statements.push((section.to_string(), t.to_string()));
        } else {
            let last = statements.last_mut().expect("continuation without a statement");
            last.1.push(' ');
            last.1.push_str(t);
        }
    }
    for (section, body) in statements {
        match section.as_str() {
            "min" => {
                let (_, expr) = body.split_once(':').unwrap();
                model.objective = terms(&expr.split_whitespace().collect::<Vec<_>>());
            }
            "st" => {
                let (name, expr) = body.split_once(':').unwrap();
                let toks: Vec<_> = expr.split_whitespace().collect();
                let k = toks.len();
                model.constraints.push((name.to_string(), terms(&toks[..k - 2]), toks[k - 2].to_string(), toks[k - 1].parse().unwrap()));
            }
            "bounds" => {
                let toks: Vec<_> = body.split_whitespace().collect();
                assert_eq!((toks.len(), toks[1], toks[3]), (5, "<=", "<="), "{body}");
                model.bounds.insert(toks[2].to_string(), (toks[0].parse().unwrap(), toks[4].parse().unwrap()));
            }
            "gen" => model.generals.extend(body.split_whitespace().map(String::from)),
            "bin" => model.binaries.extend(body.split_whitespace().map(String::from)),
            _ => panic!("text after End: {body}"),
        }
    }
    model
}

impl LpModel {
    /// Objective value of `values`, or the first constraint it breaks.
    pub fn check(&self, values: &BTreeMap<String, i128>) -> Result<i128, String> {
        let val = |v: &String| values.get(v).copied().unwrap_or(0);
        for v in values.keys() {
            if !self.generals.contains(v) && !self.binaries.contains(v) {
                return Err(format!("{v} is not declared"));
            }
        }
        for b in &self.binaries {
            if !(0..=1).contains(&val(b)) {
                return Err(format!("{b} is not binary"));
            }
        }
        for (v, &(lo, hi)) in &self.bounds {
            if !(lo..=hi).contains(&val(v)) {
                return Err(format!("{v} outside [{lo}, {hi}]"));
            }
        }
        for (name, ts, op, rhs) in &self.constraints {
            let lhs: i128 = ts.iter().map(|(c, v)| c * val(v)).sum();
            let ok = match op.as_str() {
                "<=" => lhs <= *rhs,
                ">=" => lhs >= *rhs,
                "=" => lhs == *rhs,
                _ => panic!("operator {op}"),
            };
            if !ok {
                return Err(format!("{name}: {lhs} {op} {rhs} fails"));
            }
        }
        Ok(self.objective.iter().map(|(c, v)| c * val(v)).sum())
    }
}

/// `x_e` and `I_e` of a plan: the flow on a stored edge is the size of the
/// subtree it feeds.
pub fn incidence(g: &VersionGraph, sol: &Solution) -> BTreeMap<String, i128> {
    let n = g.node_count();
    let mut subtree = vec![1i128; n];
    // parents are walked to their roots, adding each node once to every ancestor
    for v in 0..n {
        let mut cur = v;
        while let Some(p) = sol.parent(cur) {
            subtree[p] += 1;
            cur = p;
        }
    }
    let mut values = BTreeMap::new();
    for v in 0..n {
        let src = sol.parent(v).map_or("a".to_string(), |p| p.to_string());
        values.insert(format!("x_{src}_{v}"), subtree[v]);
        values.insert(format!("I_{src}_{v}"), 1);
    }
    values
}
