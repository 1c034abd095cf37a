//! `mapda`: build, verify, inspect and simulate multi-antenna placement
//! delivery arrays for combinatorial multi-access networks.
//!
//! Exit status: 0 success, 1 invalid array, 2 usage error, 3 violated
//! constraint, 4 I/O or parse failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mapda", version, about = "Multi-antenna placement delivery arrays for multi-access coded caching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an array and print its metrics.
    Construct(ConstructArgs),
    /// Check conditions C1-C4 of an array file.
    Verify(VerifyArgs),
    /// Print the knapsack instance of the canonical anchor and its solution.
    Knapsack(KnapsackArgs),
    /// Simulate zero-forcing delivery over an array file.
    Simulate(SimulateArgs),
    /// Comparison table of schemes.
    Compare(CompareArgs),
    /// Metrics of schemes over every placement size of a network.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct NetworkArgs {
    /// Number of cache nodes.
    #[arg(long)]
    lambda: usize,
    /// Cache nodes accessed by each user.
    #[arg(long)]
    r: usize,
    /// Cache nodes storing each packet.
    #[arg(long)]
    t: usize,
    /// Shift parameter, `0 <= b < r`.
    #[arg(long, default_value_t = 0)]
    b: usize,
    /// Server antennas.
    #[arg(long = "L")]
    antennas: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    /// Knapsack construction.
    Thm1,
    /// Complementary-anchor merge.
    Thm4,
    /// Sub-network construction.
    Thm5,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SolverArg {
    Dp,
    Greedy,
    Optimal,
}

impl From<SolverArg> for mapda::Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Dp => mapda::Solver::Dp,
            SolverArg::Greedy => mapda::Solver::Greedy,
            SolverArg::Optimal => mapda::Solver::Optimal,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ShiftMode {
    /// Use `--b` as given.
    Fixed,
    /// Try every shift and keep the best sum-DoF (smallest F, then smallest b, on ties).
    Auto,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ArrayFormat {
    /// Every row and cell written out.
    Expanded,
    /// Base array plus per-cell fill vectors.
    Compact,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, value_enum, default_value_t = Method::Thm1)]
    method: Method,
    /// Knapsack solver for thm1 [default: dp].
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long = "b-mode", value_enum, default_value_t = ShiftMode::Fixed)]
    b_mode: ShiftMode,
    /// Sub-network size for thm5.
    #[arg(long = "lambda-prime")]
    lambda_prime: Option<usize>,
    /// Where to write the array.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ArrayFormat::Expanded)]
    format: ArrayFormat,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Array file, expanded or compact.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct KnapsackArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, value_enum, default_value_t = SolverArg::Dp)]
    solver: SolverArg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Array file, expanded or compact.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent demand and channel draws.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Fixed demand, one 1-based file index per user.
    #[arg(long, value_delimiter = ',')]
    demand: Option<Vec<usize>>,
    /// Library size for random demands; defaults to the number of users.
    #[arg(long)]
    files: Option<usize>,
    /// Largest decoding residual accepted.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// JSON array of row descriptions; the built-in reference rows when absent.
    #[arg(long)]
    rows: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated schemes: thm1, co1, co2, co3, co4, ywcc, npr, wcc, pr.
    #[arg(long, value_delimiter = ',', required = true)]
    scheme: Vec<String>,
    #[arg(long)]
    lambda: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "L")]
    antennas: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed run and the exit status it maps to.
#[derive(Debug)]
enum Failure {
    InvalidArray(String),
    Usage(String),
    Constraint(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::InvalidArray(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Constraint(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::InvalidArray(m) | Failure::Usage(m) | Failure::Constraint(m) | Failure::Io(m) => m,
        }
    }
}

impl From<mapda::Error> for Failure {
    fn from(e: mapda::Error) -> Self {
        use mapda::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter(_) => Failure::Usage(msg),
            E::Parse(_) => Failure::Io(msg),
            E::InvalidArray(_) | E::UnknownSymbol(_) | E::NonUniformFill(_) => Failure::InvalidArray(msg),
            E::Constraint(_) | E::Overflow(_) | E::OracleLimit { .. } | E::InvalidSolution(_) | E::ChannelDegeneracy(_) | E::Internal(_) => {
                Failure::Constraint(msg)
            }
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    match std::env::var("MAPDA_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                mapda::exec::configure_threads(n);
                Ok(())
            }
            _ => Err(Failure::Usage(format!("MAPDA_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Construct(a) => commands::construct(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Knapsack(a) => commands::knapsack(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Sweep(a) => commands::sweep(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
