mod bench;
mod estimate;
mod generate;
mod io;
mod oracle;
mod solve;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Find many short vectors `c` with `c A = 0 mod q` by sort-and-merge.
#[derive(Debug, Parser)]
#[command(name = "multisis", version, about)]
struct Cli {
    /// Debug logging on stderr. `RUST_LOG` overrides.
    #[arg(short, long, global = true)]
    verbose: bool,

    /// Only warnings and errors on stderr.
    #[arg(long, global = true, conflicts_with = "verbose")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random full-rank instance.
    Generate(generate::Args),
    /// Plan the merge depth and print the heuristic solution counts.
    Estimate(estimate::Args),
    /// Run the solver and write verified solutions.
    Solve(solve::Args),
    /// Check every row of a solution file.
    Verify(verify::Args),
    /// Exhaustively enumerate short solutions of a small instance.
    Oracle(oracle::Args),
    /// Solve a grid of random instances and append one CSV row per run.
    Bench(bench::Args),
}

/// Process outcome. Usage and I/O errors exit with 1 through `anyhow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Infeasible,
    Starved,
    Rejected,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Infeasible => 2,
            Status::Starved => 3,
            Status::Rejected => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match (cli.verbose, cli.quiet) {
        (true, _) => "debug",
        (_, true) => "warn",
        _ => "info",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Estimate(a) => estimate::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
