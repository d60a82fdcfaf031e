//! The level loop: zero one block of columns per level by pairing rows that
//! agree up to sign, tracking the combination vectors as we go.

mod collisions;

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

pub use collisions::{canonicalize_sign, find_collisions, CanonicalKey, CollisionIndex, MergeRecipe, RecipeIter};

use num_traits::ToPrimitive;

use crate::estimator::{capacity, plan_parameters, EstimatorError, Plan};
use crate::seed::{enumerate_seeds, materialize_level0, Level0, SeedOrder, TrackedRow};
use crate::zq::{norm_bound_sq, verify_solution_sq, CombinationVector, Rejection, SisInstance, SolutionSet};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Plan(#[from] EstimatorError),
    #[error("starved at level {level}: no rows survived")]
    Starved { level: usize, report: Box<SolveReport> },
    #[error("plan covers {plan_cols} columns with k = {k}, instance has n = {n}, m = {m}")]
    PlanMismatch {
        plan_cols: usize,
        k: usize,
        n: usize,
        m: usize,
    },
    #[error("output vector failed verification: {reason}")]
    Verification {
        vector: CombinationVector,
        reason: Rejection,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    /// Memory cap on rows held at any level.
    pub max_rows: u64,
    /// Drop intermediate rows whose squared norm already exceeds `nu^2`.
    pub prune: bool,
    pub seed_order: SeedOrder,
    /// Worker threads; results do not depend on this.
    pub threads: usize,
    /// Recompute every residual from its combination after each level.
    pub check_levels: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_rows: 1 << 20,
            prune: true,
            seed_order: SeedOrder::Random(0),
            threads: 1,
            check_levels: cfg!(debug_assertions),
        }
    }
}

/// Per-level counters. Level `i` zeroes block `i` of the columns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub rows_in: usize,
    /// Nonzero keys shared by at least two rows.
    pub groups: usize,
    /// Pair recipes available (before the row budget applies).
    pub pairs: u64,
    pub zeros: usize,
    pub recipes_used: usize,
    pub dropped_trivial: usize,
    pub dropped_duplicate: usize,
    pub dropped_norm: usize,
    pub rows_out: usize,
    pub max_norm_sq: u64,
    pub norm_histogram: BTreeMap<u64, usize>,
}

impl LevelStats {
    pub const CSV_HEADER: &'static str = "level,rows_in,groups,pairs,zeros,rows_out,max_norm_sq";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.level, self.rows_in, self.groups, self.pairs, self.zeros, self.rows_out, self.max_norm_sq
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub plan: Plan,
    pub solutions: SolutionSet,
    pub levels: Vec<LevelStats>,
    /// Level-0 rows (seeds) generated.
    pub seeds: usize,
    /// Seeds that were already solutions.
    pub immediate: usize,
}

impl SolveReport {
    pub fn requested(&self) -> u64 {
        self.plan.requested()
    }

    pub fn is_complete(&self) -> bool {
        self.solutions.len() as u64 >= self.requested()
    }

    /// Seeds plus every row fed into a level.
    pub fn rows_processed(&self) -> u64 {
        self.seeds as u64 + self.levels.iter().map(|l| l.rows_in as u64).sum::<u64>()
    }

    pub fn stats_csv(&self) -> String {
        let mut s = String::from(LevelStats::CSV_HEADER);
        s.push('\n');
        for l in &self.levels {
            s.push_str(&l.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Counts of what [`apply_recipes`] discarded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApplyOutcome {
    pub rows: Vec<TrackedRow>,
    pub recipes_used: usize,
    pub dropped_trivial: usize,
    pub dropped_duplicate: usize,
    pub dropped_norm: usize,
}

/// Build next-level rows from `recipes` until `budget` rows are produced.
///
/// Each output drops the `block` columns (which must be a prefix of the
/// residual) and is put in canonical sign form. Outputs whose combination
/// is divisible by `q` (zero included), is already in `dedup`, or has
/// squared norm above `norm_cap_sq` are discarded.
///
/// Panics if a recipe does not cancel its block.
pub fn apply_recipes<I>(
    rows: &[TrackedRow],
    recipes: I,
    block: Range<usize>,
    norm_cap_sq: u64,
    dedup: &mut HashSet<crate::seed::SparseCombo>,
    budget: usize,
    q: u64,
) -> ApplyOutcome
where
    I: IntoIterator<Item = MergeRecipe>,
{
    assert_eq!(block.start, 0, "blocks are consumed from the front of the residual");
    let mut out = ApplyOutcome::default();
    if budget == 0 {
        return out;
    }
    for recipe in recipes {
        out.recipes_used += 1;
        let row = match recipe {
            MergeRecipe::ZeroRow(i) => {
                let src = &rows[i];
                assert!(
                    src.residual[block.clone()].iter().all(|&x| x == 0),
                    "zero-row recipe on a nonzero block"
                );
                TrackedRow {
                    residual: src.residual[block.end..].to_vec(),
                    combo: src.combo.clone(),
                }
            }
            MergeRecipe::Pair { a, b, sign } => {
                assert!(a != b, "pair recipe with a single source");
                let (ra, rb) = (&rows[a].residual, &rows[b].residual);
                let combine = |x: u64, y: u64| {
                    if sign > 0 {
                        crate::zq::add_mod(x, y, q)
                    } else {
                        crate::zq::sub_mod(x, y, q)
                    }
                };
                assert!(
                    block.clone().all(|j| combine(ra[j], rb[j]) == 0),
                    "recipe {recipe:?} does not cancel its block"
                );
                let combo = rows[a].combo.combine(&rows[b].combo, sign as i64);
                if combo.is_zero_mod(q) {
                    out.dropped_trivial += 1;
                    continue;
                }
                let residual = (block.end..ra.len()).map(|j| combine(ra[j], rb[j])).collect();
                let mut row = TrackedRow { residual, combo };
                row.canonicalize(q);
                row
            }
        };
        if row.combo.norm_sq() > norm_cap_sq {
            out.dropped_norm += 1;
            continue;
        }
        if !dedup.insert(row.combo.clone()) {
            out.dropped_duplicate += 1;
            continue;
        }
        out.rows.push(row);
        if out.rows.len() == budget {
            break;
        }
    }
    out
}

fn saturating_budget(x: u64) -> usize {
    usize::try_from(x).unwrap_or(usize::MAX)
}

/// Run every level of `plan` starting from `level0`.
///
/// Intermediate levels stop at `plan.n_targets[i + 1]` rows; the last level
/// stops once the solution set reaches the requested count. Every output is
/// verified against `4^t k` before insertion.
pub fn run_levels(
    level0: Level0,
    plan: &Plan,
    inst: &SisInstance,
    cfg: &SolveConfig,
) -> Result<SolveReport, SolveError> {
    let q = inst.q();
    let bound_sq = plan.norm_bound_sq();
    let cap = if cfg.prune {
        u64::try_from(norm_bound_sq(plan.nu)).unwrap_or(u64::MAX)
    } else {
        u64::MAX
    };
    let mut solutions = SolutionSet::new(inst);
    let immediate = level0.immediate.len();
    let seeds = level0.rows.len() + immediate;
    for c in level0.immediate {
        insert_verified(&mut solutions, inst, c, bound_sq)?;
    }

    let mut rows = level0.rows;
    let mut levels = Vec::with_capacity(plan.t);
    let mut offset = 0;
    for level in 0..plan.t {
        let width = plan.block_widths[level];
        let last = level + 1 == plan.t;
        let budget = if last {
            saturating_budget(plan.requested().saturating_sub(solutions.len() as u64))
        } else {
            saturating_budget(plan.n_targets[level + 1])
        };

        let index = find_collisions(&rows, 0..width, q);
        let mut dedup = HashSet::new();
        let out = apply_recipes(&rows, index.recipes(), 0..width, cap, &mut dedup, budget, q);

        let level_bound = (1u64 << (2 * (level + 1))) * plan.k as u64;
        let mut hist = BTreeMap::new();
        for r in &out.rows {
            assert!(
                r.combo.norm_sq() <= level_bound,
                "norm doubling bound violated at level {level}"
            );
            *hist.entry(r.combo.norm_sq()).or_insert(0) += 1;
        }
        offset += width;
        if cfg.check_levels {
            for r in &out.rows {
                assert!(r.check(inst, offset), "residual out of sync with combination");
            }
        }
        let stats = LevelStats {
            level,
            rows_in: rows.len(),
            groups: index.group_count(),
            pairs: index.pair_count(),
            zeros: index.zero_rows().len(),
            recipes_used: out.recipes_used,
            dropped_trivial: out.dropped_trivial,
            dropped_duplicate: out.dropped_duplicate,
            dropped_norm: out.dropped_norm,
            rows_out: out.rows.len(),
            max_norm_sq: hist.keys().next_back().copied().unwrap_or(0),
            norm_histogram: hist,
        };
        log::debug!("level {level}: {stats:?}");
        levels.push(stats);
        rows = out.rows;

        if rows.is_empty() && budget > 0 {
            let report = SolveReport {
                plan: plan.clone(),
                solutions,
                levels,
                seeds,
                immediate,
            };
            return Err(SolveError::Starved {
                level,
                report: Box::new(report),
            });
        }
    }

    for row in rows {
        debug_assert!(row.residual.is_empty());
        insert_verified(&mut solutions, inst, row.combo.to_dense(inst.m()), bound_sq)?;
    }
    solutions.truncate(saturating_budget(plan.requested()));
    Ok(SolveReport {
        plan: plan.clone(),
        solutions,
        levels,
        seeds,
        immediate,
    })
}

fn insert_verified(
    set: &mut SolutionSet,
    inst: &SisInstance,
    c: CombinationVector,
    bound_sq: u128,
) -> Result<(), SolveError> {
    if let Some(reason) = verify_solution_sq(&c, inst, bound_sq).reason {
        return Err(SolveError::Verification { vector: c, reason });
    }
    set.insert_bounded(inst, c, bound_sq)
        .expect("verified vector is accepted");
    Ok(())
}

/// Plan, seed, and merge in one call, on a pool of `cfg.threads` workers.
pub fn solve(inst: &SisInstance, nu: f64, count: u64, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    let plan = plan_parameters(inst.n(), inst.m(), inst.q(), nu, count, cfg.max_rows)?;
    solve_with_plan(inst, &plan, cfg)
}

/// Run `plan`, and while the result is short (or a level starves) double
/// every intermediate level target and run again, up to `cfg.max_rows` and
/// the seed capacity. The returned report carries the plan actually used.
pub fn solve_with_plan(inst: &SisInstance, plan: &Plan, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .expect("thread pool");
    let plan_cols: usize = plan.block_widths.iter().sum();
    if plan_cols != inst.n()
        || plan.k == 0
        || plan.k >= inst.m()
        || plan.block_widths.len() != plan.t
        || plan.n_targets.len() != plan.t + 1
    {
        return Err(SolveError::PlanMismatch {
            plan_cols,
            k: plan.k,
            n: inst.n(),
            m: inst.m(),
        });
    }
    let seed_cap = capacity(inst.m(), plan.k)
        .ok()
        .and_then(|c| c.to_u64())
        .unwrap_or(u64::MAX);
    let mut plan = plan.clone();
    loop {
        let result = pool.install(|| {
            let limit = saturating_budget(plan.n_targets[0]);
            let seeds = enumerate_seeds(inst.m(), plan.k, limit, cfg.seed_order);
            let level0 = materialize_level0(seeds, inst);
            run_levels(level0, &plan, inst, cfg)
        });
        let short = match &result {
            Ok(report) => !report.is_complete(),
            Err(SolveError::Starved { .. }) => true,
            Err(_) => false,
        };
        if !short || !escalate(&mut plan, cfg.max_rows, seed_cap) {
            return result;
        }
        log::info!(
            "result short; retrying with level targets {:?}",
            &plan.n_targets[..plan.t]
        );
    }
}

/// Double the targets of levels `0..t`; false when nothing can grow.
fn escalate(plan: &mut Plan, max_rows: u64, seed_cap: u64) -> bool {
    let mut grew = false;
    for (i, n) in plan.n_targets[..plan.t].iter_mut().enumerate() {
        let cap = if i == 0 { max_rows.min(seed_cap) } else { max_rows };
        let next = n.saturating_mul(2).min(cap).max(*n);
        grew |= next > *n;
        *n = next;
    }
    grew
}
