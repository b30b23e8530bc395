//! `antisort`: sort, enumerate, check and benchmark antimatroid instances.
//!
//! Exit codes: 0 success, 1 failed verdict or stuck run, 2 usage or parse
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "antisort", version, about = "Sorting under antimatroid constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover a hidden order with topological heapsort.
    Sort(SortArgs),
    /// Print every permutation of the instance, sorted.
    Enumerate(InstanceArgs),
    /// Check axioms and the backend against the explicit system.
    Check(InstanceArgs),
    /// Print the layers and the bottleneck sequence.
    Layers(InstanceArgs),
    /// Run the measured-constant suites and emit CSV.
    Bench(BenchArgs),
    /// Check Dijkstra against vertex search.
    Dijkstra(DijkstraArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest alphabet for brute-force enumeration.
    #[arg(long, default_value_t = 10)]
    pub bf_limit: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Plain,
    Optimal,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Validate {
    /// No checks.
    Off,
    /// Enforce the structure's contract during the run.
    Contract,
    /// Contract plus a replay against the explicit system and a check
    /// that the output is a permutation of the instance.
    Full,
}

#[derive(Args, Debug)]
pub struct SortArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Plain)]
    pub mode: Mode,
    /// File holding the hidden order as a word.
    #[arg(long, conflicts_with = "order")]
    pub order_file: Option<PathBuf>,
    /// Hidden order given inline; without either, one is sampled from the
    /// instance using `--seed`.
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long, value_enum, default_value_t = Validate::Contract)]
    pub validate: Validate,
    /// Print the queue contents after each extraction.
    #[arg(long)]
    pub transcript: bool,
    /// Include wall-clock timings (not deterministic).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    All,
    BruteForce,
    Chain,
    Chordal,
    Heap,
    Limits,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SuiteName::All)]
    pub suite: SuiteName,
    /// Instances in the brute-force suite.
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DijkstraArgs {
    /// A weighted-digraph instance; without it, random suites run.
    pub file: Option<PathBuf>,
    /// Random graphs per suite.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Print the queue contents after each extraction.
    #[arg(long)]
    pub transcript: bool,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sort(a) => commands::sort(&a),
        Command::Enumerate(a) => commands::enumerate(&a),
        Command::Check(a) => commands::check(&a),
        Command::Layers(a) => commands::layers(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Dijkstra(a) => commands::dijkstra(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
