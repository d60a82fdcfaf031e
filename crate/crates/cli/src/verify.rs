use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Result;
use multisis_core::zq::verify_solution;

use crate::io::{emit, load_instance, load_solutions};
use crate::Status;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solutions: PathBuf,
    #[arg(long)]
    nu: f64,
    /// Report file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<Status> {
    log::info!("verify: {args:?}");
    let inst = load_instance(&args.instance)?;
    let (m, sols) = load_solutions(&args.solutions)?;
    if m != inst.m() {
        log::warn!("solution file has m = {m}, instance has m = {}", inst.m());
    }

    let mut report = String::new();
    let mut first_seen = BTreeMap::new();
    let (mut ok, mut failed, mut duplicate) = (0usize, 0usize, 0usize);
    for (i, c) in sols.iter().enumerate() {
        let row = i + 1;
        match verify_solution(c, &inst, args.nu).reason {
            Some(reason) => {
                failed += 1;
                writeln!(report, "row {row}: FAIL {reason}")?;
            }
            None => match first_seen.get(&c.clone().canonical()) {
                Some(&first) => {
                    duplicate += 1;
                    writeln!(report, "row {row}: DUPLICATE of row {first}")?;
                }
                None => {
                    ok += 1;
                    first_seen.insert(c.clone().canonical(), row);
                    writeln!(report, "row {row}: ok")?;
                }
            },
        }
    }
    writeln!(
        report,
        "{} rows: {ok} ok, {failed} failed, {duplicate} duplicate",
        sols.len()
    )?;
    emit(args.out.as_deref(), &report)?;

    Ok(if failed + duplicate == 0 {
        Status::Success
    } else {
        Status::Rejected
    })
}
