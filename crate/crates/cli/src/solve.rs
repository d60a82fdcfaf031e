use std::path::PathBuf;

use anyhow::Result;
use multisis_core::estimator::{plan_parameters, EstimatorError};
use multisis_core::format::write_solutions;
use multisis_core::merge::{solve_with_plan, SolveReport};
use multisis_core::seed::SeedOrder;
use multisis_core::{SisInstance, SolveConfig, SolveError};

use crate::io::{emit, load_instance};
use crate::Status;

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Order {
    Lex,
    Random,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    instance: PathBuf,
    /// Euclidean norm bound.
    #[arg(long)]
    nu: f64,
    /// Number of distinct solutions wanted.
    #[arg(long)]
    count: u64,
    /// Cap on rows held at any level.
    #[arg(long, default_value_t = 1 << 20)]
    max_rows: u64,
    /// Seeds the random seed order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Order::Random)]
    seed_order: Order,
    /// Keep intermediate rows longer than nu.
    #[arg(long)]
    no_prune: bool,
    /// Recompute every residual after each level.
    #[arg(long)]
    check_levels: bool,
    /// Per-level statistics CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Solution file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl Args {
    pub fn config(&self) -> SolveConfig {
        SolveConfig {
            max_rows: self.max_rows,
            prune: !self.no_prune,
            seed_order: match self.seed_order {
                Order::Lex => SeedOrder::Lex,
                Order::Random => SeedOrder::Random(self.seed),
            },
            threads: self.threads,
            check_levels: self.check_levels || cfg!(debug_assertions),
        }
    }
}

pub fn run(args: Args) -> Result<Status> {
    let cfg = args.config();
    log::info!("solve: {args:?}");
    log::info!("solver config: {cfg:?}");
    let inst = load_instance(&args.instance)?;

    let plan = match plan_parameters(inst.n(), inst.m(), inst.q(), args.nu, args.count, args.max_rows) {
        Ok(p) => p,
        Err(EstimatorError::Infeasible(why)) => {
            eprintln!("infeasible: {why}");
            return Ok(Status::Infeasible);
        }
        Err(e) => return Err(e.into()),
    };
    log::info!("plan: {plan:?}");

    match solve_with_plan(&inst, &plan, &cfg) {
        Ok(report) => {
            if !write_outputs(&args, &inst, &report)? {
                return Ok(Status::Rejected);
            }
            if report.is_complete() {
                Ok(Status::Success)
            } else {
                eprintln!(
                    "incomplete: found {} of {} requested solutions",
                    report.solutions.len(),
                    report.requested()
                );
                Ok(Status::Starved)
            }
        }
        Err(SolveError::Starved { level, report }) => {
            if !write_outputs(&args, &inst, &report)? {
                return Ok(Status::Rejected);
            }
            eprintln!(
                "starved at level {level}: wrote {} of {} requested solutions",
                report.solutions.len(),
                report.requested()
            );
            Ok(Status::Starved)
        }
        Err(SolveError::Verification { vector, reason }) => {
            eprintln!("refusing to write output: {vector} failed verification ({reason})");
            Ok(Status::Rejected)
        }
        Err(e) => Err(e.into()),
    }
}

/// Audit the solution set, then write it and the statistics. Returns false
/// (writing nothing) if any vector fails the audit.
fn write_outputs(args: &Args, inst: &SisInstance, report: &SolveReport) -> Result<bool> {
    if let Err((c, reason)) = report.solutions.audit(inst, report.plan.norm_bound_sq()) {
        eprintln!("refusing to write output: {c} failed verification ({reason})");
        return Ok(false);
    }
    log::info!(
        "{} solutions, {} rows processed, max norm^2 {}",
        report.solutions.len(),
        report.rows_processed(),
        report.solutions.max_norm_sq()
    );
    if let Some(path) = &args.stats {
        emit(Some(path), &report.stats_csv())?;
    }
    emit(args.out.as_deref(), &write_solutions(inst.m(), &report.solutions))?;
    Ok(true)
}
