//! `verstore`: solve, sweep, ingest and export version graphs from the shell.

mod bench;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use verstore::ingest::{
    er_construction, export_ilp, ingest_git, load_edge_list, random_compression, save_edge_list, stats,
    uniform_delta, write_results_csv, CommitDump,
};
use verstore::rational::parse_ratio;
use verstore::treewidth::TreeDecomposition;
use verstore::{NodeId, Problem, SolveError, VersionGraph};

use run::{Algo, Params, RunError};

#[derive(Parser)]
#[command(name = "verstore", version, about = "Storage/retrieval trade-offs for version graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print `objective,storage,retrieval_sum,retrieval_max,runtime_ms`.
    Solve(SolveArgs),
    /// Sweep bounds for several algorithms; prints `algo,dataset,budget,objective,runtime_ms`.
    Bench(BenchArgs),
    /// Build an edge-list graph from a commit dump (see scripts/git_dump.py).
    Ingest {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the commit id of every node, one per line.
        #[arg(long)]
        ids: Option<PathBuf>,
    },
    /// Random compression of the edges, or an ER graph on the input's versions.
    Transform {
        #[arg(long, conflicts_with = "er", required_unless_present = "er")]
        compress: bool,
        /// Edge probability of the ER construction.
        #[arg(long, value_name = "P")]
        er: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        input: PathBuf,
        output: PathBuf,
    },
    /// Write the MSR integer program in LP format.
    ExportIlp {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print node/edge counts and mean costs as CSV.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    problem: Problem,
    #[arg(long)]
    graph: PathBuf,
    /// Approximation parameter (`p/q` or decimal); 1/4 for the DP solvers,
    /// exact storage for dp-extracted when omitted.
    #[arg(long, value_parser = parse_ratio)]
    epsilon: Option<Ratio<u64>>,
    /// Pruning factor of dp-extracted (`p/q` or decimal, at least 1).
    #[arg(long, value_parser = parse_ratio)]
    prune: Option<Ratio<u64>>,
    /// Root of the tree used by dp-tree and dp-extracted.
    #[arg(long, default_value_t = 0)]
    root: NodeId,
    /// Tree decomposition file for dp-btw; computed when omitted.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Largest decomposition width dp-btw accepts.
    #[arg(long)]
    k_max: Option<usize>,
    /// Accepted for reproducible command lines; the solvers draw no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: SolverArgs,
    #[arg(long)]
    algo: Algo,
    /// Storage budget (MSR, MMR) or retrieval bound (BSR, BMR).
    #[arg(long)]
    bound: u64,
    /// Write the plan as `materialize v` / `store u v` lines.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the solver's table (DP table, greedy trace or frontier) as CSV.
    #[arg(long)]
    table_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: SolverArgs,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<Algo>,
    /// `start:stop:steps`, inclusive and evenly spaced.
    #[arg(long)]
    bounds: String,
    /// Dataset column value; the graph file stem by default.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, env = "VERSTORE_JOBS", default_value_t = 1)]
    jobs: usize,
}

enum Failure {
    Input(String),
    Infeasible(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Solve(SolveError::Infeasible) => Failure::Infeasible(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_graph(path: &Path) -> Result<VersionGraph, String> {
    load_edge_list(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn params(a: &SolverArgs) -> Result<Params, String> {
    let decomposition = match &a.decomposition {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Some(TreeDecomposition::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?)
        }
        None => None,
    };
    Ok(Params { epsilon: a.epsilon, prune: a.prune, root: a.root, decomposition, k_max: a.k_max })
}

fn solve(a: &SolveArgs) -> Result<(), Failure> {
    let g = read_graph(&a.common.graph)?;
    let p = params(&a.common)?;
    let out = run::run(&g, a.common.problem, a.algo, a.bound, &p, a.table_out.is_some())?;
    println!("objective,storage,retrieval_sum,retrieval_max,runtime_ms");
    println!(
        "{},{},{},{},{:.3}",
        out.objective,
        out.report.storage,
        out.report.retrieval_sum,
        out.report.retrieval_max,
        out.runtime.as_secs_f64() * 1e3
    );
    if let Some(path) = &a.out {
        write(path, &run::solution_text(&out.solution))?;
    }
    if let Some(path) = &a.table_out {
        let table = out.table.ok_or_else(|| format!("{} produces no table", a.algo.name()))?;
        write(path, &table)?;
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<(), Failure> {
    let g = read_graph(&a.common.graph)?;
    let p = params(&a.common)?;
    let bounds = bench::parse_bounds(&a.bounds)?;
    let dataset = a.dataset.clone().unwrap_or_else(|| {
        a.common.graph.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    });
    let rows = bench::sweep(&g, &dataset, a.common.problem, &a.algos, &bounds, &p, a.jobs.max(1))?;
    print!("{}", write_results_csv(&rows));
    Ok(())
}

fn execute(cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Ingest { dump, out, ids } => {
            let d = CommitDump::load(dump).map_err(|e| format!("{}: {e}", dump.display()))?;
            let h = ingest_git(&d).map_err(|e| e.to_string())?;
            save_edge_list(&h.graph, out).map_err(|e| e.to_string())?;
            if let Some(path) = ids {
                write(path, &(h.ids.join("\n") + "\n"))?;
            }
            Ok(())
        }
        Command::Transform { compress, er, seed, input, output } => {
            let g = read_graph(input)?;
            let out = match (compress, er) {
                (true, _) => random_compression(&g, *seed).map_err(|e| e.to_string())?,
                (false, Some(p)) => er_construction(g.node_costs(), *p, *seed, uniform_delta(g.node_costs()))
                    .map_err(|e| e.to_string())?,
                (false, None) => unreachable!("clap requires one of --compress and --er"),
            };
            save_edge_list(&out, output).map_err(|e| e.to_string())?;
            Ok(())
        }
        Command::ExportIlp { graph, budget, out } => {
            let g = read_graph(graph)?;
            write(out, &export_ilp(&g, *budget))?;
            Ok(())
        }
        Command::Stats { graph } => {
            print!("{}", stats(&read_graph(graph)?).to_csv());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}
