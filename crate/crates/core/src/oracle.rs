//! Exhaustive ground truth for small instances.
//!
//! Nothing here calls into the solver's arithmetic: candidates are tested
//! with a schoolbook signed dot product over `i128`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::zq::{CombinationVector, SisInstance, SolutionSet};

/// Default cap on candidates examined.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {required} candidates, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("solver vector {0} is not in the oracle set")]
    Unsound(CombinationVector),
    #[error("oracle bound {oracle_bound_sq} is below solver bound {solver_bound_sq}")]
    BoundTooSmall {
        oracle_bound_sq: u128,
        solver_bound_sq: u128,
    },
    #[error("solver output and oracle list have different lengths")]
    LengthMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    /// Solutions found, counted up to sign.
    pub exact_count: u64,
    pub norm_bound: f64,
    /// Candidates examined, counted up to sign.
    pub enumerated: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Result of one exhaustive run. Solutions are canonical and sorted.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub report: OracleReport,
    pub solutions: Vec<CombinationVector>,
    /// Squared-norm bound of the enumerated family. Only `brute_force_ball`
    /// is complete for the whole ball of this radius.
    pub bound_sq: u128,
}

fn in_kernel(c: &[i64], inst: &SisInstance) -> bool {
    let q = inst.q() as i128;
    (0..inst.n()).all(|j| {
        let mut s: i128 = 0;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                s += ci as i128 * inst.matrix().get(i, j) as i128;
                s %= q;
            }
        }
        s == 0
    })
}

fn all_multiples_of_q(c: &[i64], q: u64) -> bool {
    c.iter().all(|&x| x % q as i64 == 0)
}

/// `sum_{r=1}^{d} C(m, r) 2^(r-1)` in plain `u128`, saturating.
fn pm1_candidates(m: usize, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for r in 1..=d.min(m) {
        binom = binom.saturating_mul((m - r + 1) as u128) / r as u128;
        total = total.saturating_add(binom.saturating_mul(1 << (r - 1)));
    }
    total
}

/// Every `{-1, 0, 1}` vector with between 1 and `d` nonzeros (first nonzero
/// positive) that lies in the kernel.
pub fn brute_force_pm1(inst: &SisInstance, d: usize, budget: u128) -> Result<OracleRun, OracleError> {
    brute_force_pm1_ordered(inst, d, budget, None)
}

/// As [`brute_force_pm1`], visiting rows in a shuffled order when
/// `shuffle_seed` is given. The returned set does not depend on the order.
pub fn brute_force_pm1_ordered(
    inst: &SisInstance,
    d: usize,
    budget: u128,
    shuffle_seed: Option<u64>,
) -> Result<OracleRun, OracleError> {
    let m = inst.m();
    let required = pm1_candidates(m, d);
    if required > budget {
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    let start = Instant::now();
    let mut order: Vec<usize> = (0..m).collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let mut found = BTreeSet::new();
    let mut enumerated = 0u64;
    let mut c = vec![0i64; m];
    // Depth-first over positions of `order`; signs of all but the first
    // chosen position range over +-1, and canonical form is fixed afterwards.
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        inst: &SisInstance,
        order: &[usize],
        from: usize,
        left: usize,
        first: bool,
        c: &mut [i64],
        found: &mut BTreeSet<CombinationVector>,
        enumerated: &mut u64,
    ) {
        for pos in from..order.len() {
            let i = order[pos];
            let signs: &[i64] = if first { &[1] } else { &[1, -1] };
            for &s in signs {
                c[i] = s;
                *enumerated += 1;
                if in_kernel(c, inst) {
                    found.insert(CombinationVector::new(c.to_vec()).canonical());
                }
                if left > 1 {
                    dfs(inst, order, pos + 1, left - 1, false, c, found, enumerated);
                }
                c[i] = 0;
            }
        }
    }
    if d >= 1 {
        dfs(inst, &order, 0, d, true, &mut c, &mut found, &mut enumerated);
    }

    let solutions: Vec<_> = found.into_iter().collect();
    Ok(OracleRun {
        report: OracleReport {
            exact_count: solutions.len() as u64,
            norm_bound: (d as f64).sqrt(),
            enumerated,
            wall_time: start.elapsed(),
        },
        solutions,
        bound_sq: d as u128,
    })
}

/// Number of points of `Z^dims` with squared norm at most `b`.
fn lattice_points(dims: usize, b: u64, memo: &mut Vec<Vec<Option<u128>>>) -> u128 {
    if dims == 0 {
        return 1;
    }
    if let Some(v) = memo[dims][b as usize] {
        return v;
    }
    let mut total: u128 = 0;
    let mut x: u64 = 0;
    while x * x <= b {
        let sub = lattice_points(dims - 1, b - x * x, memo);
        total = total.saturating_add(if x == 0 { sub } else { sub.saturating_mul(2) });
        x += 1;
    }
    memo[dims][b as usize] = Some(total);
    total
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Every nonzero integer vector with squared norm at most `floor(nu^2)`,
/// up to sign, that lies in the kernel and is not componentwise divisible
/// by `q`.
pub fn brute_force_ball(inst: &SisInstance, nu: f64, budget: u128) -> Result<OracleRun, OracleError> {
    let m = inst.m();
    let bound = crate::zq::norm_bound_sq(nu);
    let b = u64::try_from(bound).unwrap_or(u64::MAX);
    if b > 1 << 24 {
        return Err(OracleError::BudgetExceeded {
            required: u128::MAX,
            budget,
        });
    }
    let mut memo = vec![vec![None; b as usize + 1]; m + 1];
    let required = (lattice_points(m, b, &mut memo) - 1) / 2;
    if required > budget {
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    let start = Instant::now();
    let mut found = BTreeSet::new();
    let mut enumerated = 0u64;
    let mut c = vec![0i64; m];

    // `seen_nonzero` enforces a positive first nonzero entry.
    fn dfs(
        inst: &SisInstance,
        pos: usize,
        left: u64,
        seen_nonzero: bool,
        c: &mut [i64],
        found: &mut BTreeSet<CombinationVector>,
        enumerated: &mut u64,
    ) {
        if pos == c.len() {
            if seen_nonzero {
                *enumerated += 1;
                if !all_multiples_of_q(c, inst.q()) && in_kernel(c, inst) {
                    found.insert(CombinationVector::new(c.to_vec()));
                }
            }
            return;
        }
        let r = isqrt(left) as i64;
        let lo = if seen_nonzero { -r } else { 0 };
        for x in lo..=r {
            c[pos] = x;
            dfs(
                inst,
                pos + 1,
                left - (x * x) as u64,
                seen_nonzero || x != 0,
                c,
                found,
                enumerated,
            );
        }
        c[pos] = 0;
    }
    dfs(inst, 0, b, false, &mut c, &mut found, &mut enumerated);
    debug_assert_eq!(enumerated as u128, required);

    let solutions: Vec<_> = found.into_iter().collect();
    Ok(OracleRun {
        report: OracleReport {
            exact_count: solutions.len() as u64,
            norm_bound: nu,
            enumerated,
            wall_time: start.elapsed(),
        },
        solutions,
        bound_sq: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossReport {
    pub solver_count: usize,
    /// Oracle solutions within the solver's norm bound.
    pub oracle_in_ball: usize,
    pub recall: f64,
}

/// Check that every solver vector appears in an exhaustive oracle list and
/// report recall against the oracle vectors within `solver_bound_sq`.
///
/// `oracle_bound_sq` is the squared norm the oracle list is complete for.
pub fn cross_validate(
    solver_output: &SolutionSet,
    oracle: &[CombinationVector],
    oracle_bound_sq: u128,
    solver_bound_sq: u128,
) -> Result<CrossReport, OracleError> {
    if oracle_bound_sq < solver_bound_sq {
        return Err(OracleError::BoundTooSmall {
            oracle_bound_sq,
            solver_bound_sq,
        });
    }
    let oracle: BTreeSet<CombinationVector> = oracle.iter().map(|c| c.clone().canonical()).collect();
    for c in solver_output {
        if c.len() != solver_output.m() || oracle.first().is_some_and(|o| o.len() != c.len()) {
            return Err(OracleError::LengthMismatch);
        }
        if !oracle.contains(&c.clone().canonical()) {
            return Err(OracleError::Unsound(c.clone()));
        }
    }
    let oracle_in_ball = oracle.iter().filter(|c| c.norm_sq() <= solver_bound_sq).count();
    let recall = if oracle_in_ball == 0 {
        0.0
    } else {
        solver_output.len() as f64 / oracle_in_ball as f64
    };
    Ok(CrossReport {
        solver_count: solver_output.len(),
        oracle_in_ball,
        recall,
    })
}
