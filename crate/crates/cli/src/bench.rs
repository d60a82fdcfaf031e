use std::fs::OpenOptions;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use itertools::iproduct;
use multisis_core::estimator::{plan_parameters, EstimatorError};
use multisis_core::merge::{solve_with_plan, SolveReport};
use multisis_core::seed::SeedOrder;
use multisis_core::zq::gen_instance;
use multisis_core::{SolveConfig, SolveError};
use serde::Serialize;

use crate::Status;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Comma-separated values of n.
    #[arg(short, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(short, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(short, value_delimiter = ',', required = true)]
    q: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    nu: Vec<f64>,
    /// Solutions requested per run.
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Random instances per grid point.
    #[arg(long, default_value_t = 1)]
    reps: u64,
    /// Instance `r` of each grid point uses seed `seed + r`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1 << 20)]
    max_rows: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// CSV file to append to (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave `wall_ms` empty so that reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    n: usize,
    m: usize,
    q: u64,
    nu: f64,
    seed: u64,
    status: &'static str,
    t: Option<usize>,
    k: Option<usize>,
    s: Option<usize>,
    requested: u64,
    found: usize,
    rows_processed: Option<u64>,
    /// Rows entering each level, `;`-separated.
    level_rows: String,
    max_level_rows: Option<u64>,
    predicted_log_cost: Option<f64>,
    measured_log_work: Option<f64>,
    wall_ms: Option<u128>,
}

fn row_from_report(row: &mut BenchRow, report: &SolveReport) {
    row.found = report.solutions.len();
    let processed = report.rows_processed();
    row.rows_processed = Some(processed);
    row.measured_log_work = Some((processed as f64).ln());
    row.level_rows = report
        .levels
        .iter()
        .map(|l| l.rows_in.to_string())
        .collect::<Vec<_>>()
        .join(";");
    row.max_level_rows = report.levels.iter().map(|l| l.rows_in as u64).max();
}

fn bench_one(n: usize, m: usize, q: u64, nu: f64, seed: u64, args: &Args) -> Result<BenchRow> {
    let mut row = BenchRow {
        n,
        m,
        q,
        nu,
        seed,
        status: "infeasible",
        t: None,
        k: None,
        s: None,
        requested: args.count,
        found: 0,
        rows_processed: None,
        level_rows: String::new(),
        max_level_rows: None,
        predicted_log_cost: None,
        measured_log_work: None,
        wall_ms: None,
    };
    let plan = match plan_parameters(n, m, q, nu, args.count, args.max_rows) {
        Ok(p) => p,
        Err(EstimatorError::Infeasible(why)) => {
            log::info!("n={n} m={m} q={q} nu={nu}: infeasible: {why}");
            return Ok(row);
        }
        Err(e) => return Err(e.into()),
    };
    row.t = Some(plan.t);
    row.k = Some(plan.k);
    row.s = Some(plan.s);
    row.predicted_log_cost = Some(plan.predicted_cost);

    let inst = gen_instance(n, m, q, seed)?;
    let cfg = SolveConfig {
        max_rows: args.max_rows,
        seed_order: SeedOrder::Random(seed),
        threads: args.threads,
        ..SolveConfig::default()
    };
    let start = Instant::now();
    let result = solve_with_plan(&inst, &plan, &cfg);
    if !args.no_timing {
        row.wall_ms = Some(start.elapsed().as_millis());
    }
    match result {
        Ok(report) => {
            row.status = if report.is_complete() { "ok" } else { "incomplete" };
            row_from_report(&mut row, &report);
        }
        Err(SolveError::Starved { report, .. }) => {
            row.status = "starved";
            row_from_report(&mut row, &report);
        }
        Err(SolveError::Verification { .. }) => row.status = "rejected",
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

pub fn run(args: Args) -> Result<Status> {
    log::info!("bench: {args:?}");
    let mut rows = Vec::new();
    for (&n, &m, &q, &nu) in iproduct!(&args.n, &args.m, &args.q, &args.nu) {
        for r in 0..args.reps {
            let seed = args.seed.wrapping_add(r);
            let row = bench_one(n, m, q, nu, seed, &args)
                .with_context(|| format!("n={n} m={m} q={q} nu={nu} seed={seed}"))?;
            log::info!("{row:?}");
            rows.push(row);
        }
    }

    let rejected = rows.iter().any(|r| r.status == "rejected");
    match &args.out {
        Some(path) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            let fresh = file.metadata()?.len() == 0;
            let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(if rejected { Status::Rejected } else { Status::Success })
}
