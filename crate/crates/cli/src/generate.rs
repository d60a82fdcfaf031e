use std::path::PathBuf;

use anyhow::Result;
use multisis_core::format::write_instance;
use multisis_core::zq::gen_instance;

use crate::io::emit;
use crate::Status;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Columns of A.
    #[arg(short)]
    n: usize,
    /// Rows of A.
    #[arg(short)]
    m: usize,
    /// Prime modulus.
    #[arg(short)]
    q: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<Status> {
    log::info!("generate: {args:?}");
    let inst = gen_instance(args.n, args.m, args.q, args.seed)?;
    emit(args.out.as_deref(), &write_instance(&inst))?;
    Ok(Status::Success)
}
