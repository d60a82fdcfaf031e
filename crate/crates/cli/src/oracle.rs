use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use multisis_core::format::write_solutions;
use multisis_core::oracle::{brute_force_ball, brute_force_pm1, DEFAULT_BUDGET};

use crate::io::{emit, load_instance};
use crate::Status;

pub const BUDGET_ENV: &str = "MULTISIS_BUDGET";

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Mode {
    /// Every {-1, 0, 1} vector with at most `d` nonzeros.
    Pm1,
    /// Every integer vector of norm at most `nu`.
    Ball,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Support bound for `pm1`.
    #[arg(long, required_if_eq("mode", "pm1"))]
    d: Option<usize>,
    /// Norm bound for `ball`.
    #[arg(long, required_if_eq("mode", "ball"))]
    nu: Option<f64>,
    /// Maximum candidates to examine. Defaults to $MULTISIS_BUDGET, then 1e8.
    #[arg(long)]
    budget: Option<u128>,
    /// Solution file for the enumerated solutions.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn budget(flag: Option<u128>) -> Result<u128> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{BUDGET_ENV}={v:?} is not a nonnegative integer")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => bail!("{BUDGET_ENV}: {e}"),
    }
}

pub fn run(args: Args) -> Result<Status> {
    let budget = budget(args.budget)?;
    log::info!("oracle: {args:?}, resolved budget {budget}");
    let inst = load_instance(&args.instance)?;
    let run = match args.mode {
        Mode::Pm1 => brute_force_pm1(&inst, args.d.unwrap(), budget)?,
        Mode::Ball => brute_force_ball(&inst, args.nu.unwrap(), budget)?,
    };
    log::info!("enumeration took {:?}", run.report.wall_time);
    let r = &run.report;
    emit(
        None,
        &format!(
            "exact_count {}\nnorm_bound {}\nenumerated {}\n",
            r.exact_count, r.norm_bound, r.enumerated
        ),
    )?;
    if let Some(path) = &args.out {
        emit(Some(path), &write_solutions(inst.m(), &run.solutions))?;
    }
    Ok(Status::Success)
}
