use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const CHAIN3: &str = "node 0 1000\nnode 1 10\nnode 2 100\nedge 0 1 9 9\nedge 1 2 90 90\n";
const TWO: &str = "node 0 10\nnode 1 8\nedge 0 1 3 2\nedge 1 0 4 1\n";

fn verstore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verstore")).args(args).env_remove("VERSTORE_JOBS").output().unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The data row of a `solve` run as numbers, runtime dropped.
fn solve_row(o: &Output) -> Vec<u64> {
    let text = stdout(o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("objective,storage,retrieval_sum,retrieval_max,runtime_ms"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    fields[..4].iter().map(|f| f.parse().unwrap()).collect()
}

#[test]
fn solve_chain3() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "chain3.el", CHAIN3);
    let sol = dir.path().join("plan.txt");
    let o = verstore(&["solve", "--problem", "msr", "--algo", "oracle", "--graph", s(&g), "--bound", "1109", "--out", s(&sol)]);
    assert!(o.status.success());
    assert_eq!(solve_row(&o), [9, 1109, 9, 9]);
    assert_eq!(fs::read_to_string(&sol).unwrap(), "materialize 0\nstore 0 1\nmaterialize 2\n");

    let o = verstore(&["solve", "--problem", "msr", "--algo", "lmg-all", "--graph", s(&g), "--bound", "1109"]);
    assert!(o.status.success());
    assert_eq!(solve_row(&o), [90, 1100, 90, 90]);

    let o = verstore(&["solve", "--problem", "msr", "--algo", "dp-extracted", "--graph", s(&g), "--bound", "1109"]);
    assert_eq!(solve_row(&o)[0], 9);
}

#[test]
fn solve_two_node_bmr() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "two.el", TWO);
    let table = dir.path().join("dp.csv");
    let o = verstore(&["solve", "--problem", "bmr", "--algo", "dp-tree", "--graph", s(&g), "--bound", "1", "--table-out", s(&table)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(solve_row(&o), [12, 12, 1, 1]);
    assert!(fs::read_to_string(&table).unwrap().starts_with("v,u,dp\n"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "chain3.el", CHAIN3);
    let big: String = (0..9).map(|v| format!("node {v} 5\n")).collect();
    let big = file(&dir, "big.el", &big);
    let o = verstore(&["solve", "--problem", "msr", "--algo", "oracle", "--graph", s(&big), "--bound", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("limit is 8"));

    let o = verstore(&["solve", "--problem", "msr", "--algo", "lmg", "--graph", s(&g), "--bound", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = verstore(&["solve", "--problem", "msr", "--algo", "mp", "--graph", s(&g), "--bound", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = verstore(&["solve", "--problem", "msr", "--algo", "lmg", "--graph", "/nonexistent.el", "--bound", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = verstore(&["solve", "--problem", "msr", "--algo", "quantum", "--graph", s(&g), "--bound", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = verstore(&["solve", "--problem", "msr", "--algo", "dp-extracted", "--graph", s(&g), "--bound", "1109", "--prune", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
}

fn strip_runtime(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn bench_rows() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "chain3.el", CHAIN3);
    let run = |jobs: &str| {
        let o = verstore(&[
            "bench", "--graph", s(&g), "--problem", "msr", "--algos", "lmg,lmg-all,oracle", "--bounds", "1090:1110:5", "--jobs", jobs,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let one = run("1");
    let rows = strip_runtime(&one);
    assert_eq!(rows.len(), 1 + 15);
    assert_eq!(rows[0], "algo,dataset,budget,objective");
    assert_eq!(rows[1], "lmg,chain3,1090,infeasible");
    assert_eq!(rows[3], "lmg,chain3,1100,90");
    assert_eq!(rows[15], "oracle,chain3,1110,0");
    assert_eq!(strip_runtime(&run("4")), rows);

    let o = verstore(&["bench", "--graph", s(&g), "--problem", "msr", "--algos", "dp-extracted", "--bounds", "1100:1110:2"]);
    let rows = strip_runtime(&stdout(&o));
    assert_eq!(
        rows[1..],
        [
            "dp-extracted,chain3,1100,90",
            "dp-extracted,chain3,1110,0",
            "dp-extracted-frontier,chain3,1099,108",
            "dp-extracted-frontier,chain3,1100,90",
            "dp-extracted-frontier,chain3,1109,9",
            "dp-extracted-frontier,chain3,1110,0",
        ]
    );
    let text = stdout(&o);
    let shared: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit_once(',').unwrap().1).collect();
    assert!(shared.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn jobs_default_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "two.el", TWO);
    let o = Command::new(env!("CARGO_BIN_EXE_verstore"))
        .args(["bench", "--graph", s(&g), "--problem", "bmr", "--algos", "mp,dp-tree", "--bounds", "0:3:4"])
        .env("VERSTORE_JOBS", "0x")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_verstore"))
        .args(["bench", "--graph", s(&g), "--problem", "bmr", "--algos", "mp,dp-tree", "--bounds", "0:3:4"])
        .env("VERSTORE_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(strip_runtime(&stdout(&o)).len(), 9);
}

#[test]
fn transforms_are_seeded() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "in.el", TWO);
    let a = dir.path().join("a.el");
    let b = dir.path().join("b.el");
    for out in [&a, &b] {
        assert!(verstore(&["transform", "--compress", "--seed", "7", s(&input), s(out)]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    // r = 2 becomes round(2.4) = 2, r = 1 becomes 1
    assert!(text.lines().any(|l| l.starts_with("edge 0 1 ") && l.ends_with(" 2")));
    assert!(text.lines().any(|l| l.starts_with("edge 1 0 ") && l.ends_with(" 1")));

    let nodes: String = (0..246).map(|v| format!("node {v} 700\n")).collect();
    let nodes = file(&dir, "nodes.el", &nodes);
    let er = dir.path().join("er1.el");
    assert!(verstore(&["transform", "--er", "1", "--seed", "3", s(&nodes), s(&er)]).status.success());
    let o = verstore(&["stats", "--graph", s(&er)]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[..3], ["246", "60270", "700"]);
    assert_eq!(verstore(&["transform", s(&input), s(&a)]).status.code(), Some(1));
}

#[test]
fn export_ilp_golden() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "chain3.el", CHAIN3);
    let lp = dir.path().join("chain3.lp");
    assert!(verstore(&["export-ilp", "--graph", s(&g), "--budget", "1109", "--out", s(&lp)]).status.success());
    assert_eq!(fs::read_to_string(&lp).unwrap(), include_str!("../../core/tests/golden/chain3.lp"));
}

#[test]
fn ingest_dump() {
    let dir = TempDir::new().unwrap();
    let dump = file(
        &dir,
        "dump.json",
        r#"{"commits":[{"id":"a","bytes":100,"parents":[]},{"id":"b","bytes":120,"parents":["a"]}],
            "deltas":[{"from":"a","to":"b","bytes":30},{"from":"b","to":"a","bytes":25}]}"#,
    );
    let out = dir.path().join("g.el");
    let ids = dir.path().join("ids.txt");
    assert!(verstore(&["ingest", "--dump", s(&dump), "--out", s(&out), "--ids", s(&ids)]).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "node 0 100\nnode 1 120\nedge 0 1 30 30\nedge 1 0 25 25\n");
    assert_eq!(fs::read_to_string(&ids).unwrap(), "a\nb\n");
    let bad = file(&dir, "bad.json", r#"{"commits":[{"id":"a","bytes":1,"parents":["a"]}],"deltas":[]}"#);
    assert_eq!(verstore(&["ingest", "--dump", s(&bad), "--out", s(&out)]).status.code(), Some(1));
}
