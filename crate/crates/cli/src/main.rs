//! `balancekit`: balance matrices, chart their convergence, decide unique
//! balance, benchmark operation counts and replay recorded traces.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "balancekit", version, about = "Max-norm matrix balancing by diagonal scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Balance a matrix and write the scaled matrix, trace and summary.
    /// Exit 0 when the target is reached, 2 when it is not, 1 on input errors.
    Balance(BalanceArgs),
    /// Chart heights and levels, audit the convergence inequalities and
    /// sample the potentials. Exit 0 iff every audit passes, 2 on a failed
    /// audit, 3 when the raising limit cannot be computed.
    Analyze(AnalyzeArgs),
    /// Decide whether the balanced form is unique. Exit 0 = UB, 4 = NotUB,
    /// 5 = Indeterminate.
    Ubcheck(UbArgs),
    /// Count two-phase operations over an instance family and fit the growth exponent.
    Bench(BenchArgs),
    /// Replay a trace against its input and check the recorded summary bit for bit.
    /// Exit 0 on match, 2 on mismatch, 1 on unreadable files.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Matrix Market (.mtx), dense CSV (.csv) or graph JSON (.json) file.
    input: PathBuf,
    /// Input format when the extension is not enough: mtx, csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ScheduleArgs {
    #[arg(long, value_enum, default_value_t = ScheduleArg::Random)]
    schedule: ScheduleArg,
    /// First vertex of a cyclic schedule, counted from 1 like matrix rows.
    #[arg(long, default_value_t = 1)]
    start: usize,
    /// Random seed; falls back to BALANCEKIT_SEED, then 0.
    #[arg(long, env = "BALANCEKIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ScheduleArg {
    Random,
    Cyclic,
    Greedy,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    TwoPhase,
    Classic,
}

#[derive(Args, Debug)]
struct BalanceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Algo::TwoPhase)]
    algo: Algo,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Target max-norm imbalance (log domain).
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Failure probability used for the two-phase budget; default 1/n.
    #[arg(long)]
    delta: Option<f64>,
    /// Operation budget: per phase for two-phase, total for classic.
    #[arg(long)]
    max_ops: Option<u64>,
    /// Check after each raising or lowering step that the opposite imbalances did not grow.
    #[arg(long)]
    audit_steps: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Target of the raising run whose potentials are sampled.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Accuracy of the raising-limit oracle; default 1e-12 relative to the weight scale.
    #[arg(long)]
    oracle_epsilon: Option<f64>,
    /// Raising operations between samples; default n.
    #[arg(long)]
    sample_every: Option<u64>,
    /// Also evaluate the factorial-weighted potential (at most 18 edges).
    #[arg(long)]
    phi: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Perturb the chart before auditing, to exercise the failure path.
    #[arg(long, hide = true)]
    corrupt_chart: bool,
}

#[derive(Args, Debug)]
struct UbArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Balancing target; default 1e-10 relative to the weight scale.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Grouping tolerance for edge weights; default 1000·epsilon.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, env = "BALANCEKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Treat the input as already balanced and skip balancing.
    #[arg(long)]
    assume_balanced: bool,
    /// Also search for two classic-balancing runs with different limits, trying this many schedules.
    #[arg(long, default_value_t = 0)]
    find_distinct: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// cycle, two-cycles-shared-vertex or sparse-random.
    #[arg(long, default_value = "cycle")]
    family: String,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Imbalance of the generated instances.
    #[arg(long, default_value_t = 4.0)]
    rho: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, env = "BALANCEKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Trace file written by `balance`.
    #[arg(long)]
    trace: PathBuf,
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
    let result = match cli.command {
        Command::Balance(a) => commands::balance(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Ubcheck(a) => commands::ubcheck(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Replay(a) => commands::replay(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
