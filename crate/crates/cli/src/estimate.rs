use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Result;
use multisis_core::estimator::{
    asymptotic_t, capacity, delta, eta, plan_parameters, EstimatorError, HeuristicCounts, Plan,
};
use serde::Serialize;

use crate::io::{emit, load_instance};
use crate::Status;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Take n, m and q from an instance file.
    #[arg(long, conflicts_with_all = ["n", "m", "q"])]
    instance: Option<PathBuf>,
    #[arg(short, required_unless_present = "instance")]
    n: Option<usize>,
    #[arg(short, required_unless_present = "instance")]
    m: Option<usize>,
    #[arg(short, required_unless_present = "instance")]
    q: Option<u64>,
    /// Euclidean norm bound.
    #[arg(long)]
    nu: f64,
    /// Number of solutions wanted.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 1 << 20)]
    max_rows: u64,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct Estimate {
    n: usize,
    m: usize,
    q: u64,
    nu: f64,
    count: u64,
    counts: HeuristicCounts,
    delta: f64,
    eta: f64,
    asymptotic_t: Option<f64>,
    plan: Option<Plan>,
    /// `capacity(m, k)` in decimal.
    capacity: Option<String>,
    log2_predicted_cost: Option<f64>,
    infeasible: Option<String>,
}

pub fn run(args: Args) -> Result<Status> {
    log::info!("estimate: {args:?}");
    let (n, m, q) = match &args.instance {
        Some(path) => {
            let inst = load_instance(path)?;
            (inst.n(), inst.m(), inst.q())
        }
        None => (args.n.unwrap(), args.m.unwrap(), args.q.unwrap()),
    };
    multisis_core::zq::check_parameters(n, m, q)?;
    if args.nu.is_nan() || args.nu <= 0.0 {
        anyhow::bail!("nu must be positive");
    }

    let mut est = Estimate {
        n,
        m,
        q,
        nu: args.nu,
        count: args.count,
        counts: HeuristicCounts::compute(m, args.nu, n, q)?,
        delta: delta(n, m, q),
        eta: eta(n, q, args.nu),
        asymptotic_t: asymptotic_t(n, m, q, args.nu).ok(),
        plan: None,
        capacity: None,
        log2_predicted_cost: None,
        infeasible: None,
    };
    match plan_parameters(n, m, q, args.nu, args.count, args.max_rows) {
        Ok(plan) => {
            est.capacity = Some(capacity(m, plan.k)?.to_string());
            est.log2_predicted_cost = Some(plan.predicted_cost / std::f64::consts::LN_2);
            est.plan = Some(plan);
        }
        Err(EstimatorError::Infeasible(why)) => est.infeasible = Some(why),
        Err(e) => return Err(e.into()),
    }

    let text = if args.json {
        serde_json::to_string_pretty(&est)? + "\n"
    } else {
        table(&est)
    };
    emit(None, &text)?;
    match &est.infeasible {
        Some(why) => {
            eprintln!("infeasible: {why}");
            Ok(Status::Infeasible)
        }
        None => Ok(Status::Success),
    }
}

fn table(e: &Estimate) -> String {
    let mut s = String::new();
    let mut row = |k: &str, v: String| writeln!(s, "{k:<20} {v}").unwrap();
    row("n", e.n.to_string());
    row("m", e.m.to_string());
    row("q", e.q.to_string());
    row("nu", e.nu.to_string());
    row("count", e.count.to_string());
    row("gaussian_count_log", format!("{:.6}", e.counts.gaussian_log));
    row(
        &format!("pm1_count_log(d={})", e.counts.d),
        format!("{:.6}", e.counts.pm1_log),
    );
    row("delta", format!("{:.6}", e.delta));
    row("eta", format!("{:.6}", e.eta));
    row(
        "asymptotic_t",
        e.asymptotic_t.map_or("n/a (delta <= 1)".into(), |t| format!("{t:.6}")),
    );
    if let Some(p) = &e.plan {
        row("t", p.t.to_string());
        row("k", p.k.to_string());
        row("d", p.d.to_string());
        row("s", p.s.to_string());
        row("block_widths", join(&p.block_widths));
        row("n_targets", join(&p.n_targets));
        row("achieved_nu", format!("{:.6}", p.achieved_nu()));
        row("capacity", e.capacity.clone().unwrap_or_default());
        row(
            "log2_predicted_cost",
            format!("{:.6}", e.log2_predicted_cost.unwrap_or(f64::NAN)),
        );
    }
    if let Some(why) = &e.infeasible {
        row("plan", format!("infeasible: {why}"));
    }
    s
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
