//! Counting heuristics and merge-depth planning.
//!
//! Everything that decides feasibility is done in exact big-integer
//! arithmetic; logarithms are only reported.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::zq::{check_parameters, norm_bound_sq, ZqError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("need 1 <= k < m (got k = {k}, m = {m})")]
    OutOfRange { m: usize, k: usize },
    #[error("norm bound must be positive (got {0})")]
    NonPositiveNorm(f64),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("asymptotic depth undefined: delta = {0} <= 1")]
    Domain(f64),
    #[error(transparent)]
    Parameters(#[from] ZqError),
}

/// `sum_{i=1}^{k} C(m, i) 2^(i-1)`: the number of `{-1, 0, 1}` vectors of
/// length `m` with between 1 and `k` nonzero entries, counted up to sign.
pub fn capacity(m: usize, k: usize) -> Result<BigUint, EstimatorError> {
    if k < 1 || k >= m {
        return Err(EstimatorError::OutOfRange { m, k });
    }
    let mut binom = BigUint::one();
    let mut pow2 = BigUint::one();
    let mut total = BigUint::zero();
    for i in 1..=k {
        binom = binom * (m - i + 1) / i;
        total += &binom * &pow2;
        pow2 <<= 1;
    }
    Ok(total)
}

/// Natural log of a big integer, accurate to double precision.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit value fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `q^e` as a big integer.
pub fn big_pow(q: u64, e: usize) -> BigUint {
    num_traits::pow(BigUint::from(q), e)
}

/// Log of the Gaussian-heuristic solution count
/// `pi^(m/2) nu^m / (Gamma(m/2 + 1) q^n)`.
pub fn gaussian_count_log(m: usize, nu: f64, n: usize, q: u64) -> Result<f64, EstimatorError> {
    if nu.is_nan() || nu <= 0.0 {
        return Err(EstimatorError::NonPositiveNorm(nu));
    }
    let mf = m as f64;
    Ok(0.5 * mf * std::f64::consts::PI.ln() + mf * nu.ln() - ln_gamma(0.5 * mf + 1.0) - n as f64 * (q as f64).ln())
}

/// Log of the `+-1` combination count `capacity(m, d) / q^n`.
pub fn pm1_count_log(m: usize, d: usize, n: usize, q: u64) -> Result<f64, EstimatorError> {
    Ok(big_ln(&capacity(m, d)?) - n as f64 * (q as f64).ln())
}

/// `(n / t) ln q`, the log of the predicted work for depth `t`.
pub fn predicted_cost_log(n: usize, q: u64, t: usize) -> f64 {
    assert!(t >= 1, "depth must be positive");
    n as f64 / t as f64 * (q as f64).ln()
}

/// `delta = m / (n ln q)`.
pub fn delta(n: usize, m: usize, q: u64) -> f64 {
    m as f64 / (n as f64 * (q as f64).ln())
}

/// `eta = nu^2 / (n ln q)`.
pub fn eta(n: usize, q: u64, nu: f64) -> f64 {
    nu * nu / (n as f64 * (q as f64).ln())
}

/// Large-parameter estimate of the merge depth, `log2 sqrt(eta ln delta)`.
/// Informational only; the solver is driven by [`plan_parameters`].
pub fn asymptotic_t(n: usize, m: usize, q: u64, nu: f64) -> Result<f64, EstimatorError> {
    asymptotic_t_from(delta(n, m, q), eta(n, q, nu))
}

pub fn asymptotic_t_from(delta: f64, eta: f64) -> Result<f64, EstimatorError> {
    if delta.is_nan() || delta <= 1.0 {
        return Err(EstimatorError::Domain(delta));
    }
    Ok(0.5 * (eta * delta.ln()).log2())
}

/// Both heuristic solution counts for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeuristicCounts {
    pub gaussian_log: f64,
    pub pm1_log: f64,
    /// Support bound used for `pm1_log`: `min(floor(nu^2), m - 1)`.
    pub d: usize,
}

impl HeuristicCounts {
    pub fn compute(m: usize, nu: f64, n: usize, q: u64) -> Result<Self, EstimatorError> {
        let gaussian_log = gaussian_count_log(m, nu, n, q)?;
        let d = (norm_bound_sq(nu).min(u128::from(m as u64 - 1))) as usize;
        let pm1_log = if d >= 1 {
            pm1_count_log(m, d, n, q)?
        } else {
            f64::NEG_INFINITY
        };
        Ok(Self {
            gaussian_log,
            pm1_log,
            d,
        })
    }

    /// True if either heuristic predicts at least `count` solutions.
    pub fn feasible_for(&self, count: u64) -> bool {
        let want = (count as f64).ln();
        self.gaussian_log >= want || self.pm1_log >= want
    }
}

/// Parameters for one solver run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    /// Number of merge levels.
    pub t: usize,
    /// Seed weight bound: level-0 rows have squared norm at most `k`.
    pub k: usize,
    /// `2^t`.
    pub d: u64,
    /// Widest block, `ceil(n / t)`.
    pub s: usize,
    /// Columns zeroed at each level, wider blocks first.
    pub block_widths: Vec<usize>,
    /// Row budget per level; entry `t` is the requested solution count.
    pub n_targets: Vec<u64>,
    pub nu: f64,
    /// `(n / t) ln q`.
    pub predicted_cost: f64,
}

impl Plan {
    /// `4^t k`, the squared norm every output is guaranteed to respect.
    pub fn norm_bound_sq(&self) -> u128 {
        (1u128 << (2 * self.t)) * self.k as u128
    }

    /// `2^t sqrt(k) <= nu`.
    pub fn achieved_nu(&self) -> f64 {
        self.d as f64 * (self.k as f64).sqrt()
    }

    /// Column range `[start, end)` zeroed at `level`.
    pub fn block(&self, level: usize) -> std::ops::Range<usize> {
        let start: usize = self.block_widths[..level].iter().sum();
        start..start + self.block_widths[level]
    }

    pub fn requested(&self) -> u64 {
        self.n_targets[self.t]
    }
}

/// Split `n` columns into `t` blocks as evenly as possible, wider first.
pub fn block_widths(n: usize, t: usize) -> Vec<usize> {
    let (base, extra) = (n / t, n % t);
    (0..t).map(|i| base + usize::from(i < extra)).collect()
}

/// Multiplier on the birthday estimate `sqrt(2 N q^w)` for level sizes, to
/// absorb duplicate and trivial merges.
pub const TARGET_SLACK: f64 = 2.0;

/// Choose the deepest `t` such that `k = floor(nu^2 / 4^t)` (capped at
/// `m - 1`) satisfies `capacity(m, k) >= q^ceil(n / t)`.
///
/// Level targets follow the birthday relation `N_(i+1) ~ N_i^2 / q^w_i`:
/// working backwards from the requested `count`, each level asks for
/// `max(2 q^w_i, TARGET_SLACK * sqrt(2 N_(i+1) q^w_i))` rows, capped at `max_rows` (and at
/// the seed capacity for level 0).
pub fn plan_parameters(n: usize, m: usize, q: u64, nu: f64, count: u64, max_rows: u64) -> Result<Plan, EstimatorError> {
    check_parameters(n, m, q)?;
    if count < 1 {
        return Err(EstimatorError::Infeasible("requested count must be at least 1".into()));
    }
    let bound = norm_bound_sq(nu);
    if bound < 4 {
        return Err(EstimatorError::Infeasible(format!(
            "nu = {nu} < 2 leaves no room for a single merge level"
        )));
    }

    let mut best = None;
    let mut t = 1usize;
    while t <= n && t < 64 && (1u128 << (2 * t)) <= bound {
        let k = (bound >> (2 * t)).min(m as u128 - 1) as usize;
        let need = big_pow(q, n.div_ceil(t));
        if k >= 1 && capacity(m, k)? >= need {
            best = Some((t, k));
        }
        t += 1;
    }
    let Some((t, k)) = best else {
        return Err(EstimatorError::Infeasible(format!(
            "capacity(m, k) < q^n even at depth 1 (n = {n}, m = {m}, q = {q}, nu = {nu})"
        )));
    };

    let widths = block_widths(n, t);
    let cap0 = capacity(m, k)?;
    let mut targets = vec![0u64; t + 1];
    targets[t] = count;
    for i in (0..t).rev() {
        let qw = (q as f64).powi(widths[i] as i32);
        let want = (2.0 * qw).max((TARGET_SLACK * (2.0 * targets[i + 1] as f64 * qw).sqrt()).ceil());
        let mut target = if want >= max_rows as f64 { max_rows } else { want as u64 };
        if i == 0 {
            target = target.min(cap0.to_u64().unwrap_or(u64::MAX));
        }
        targets[i] = target.max(1);
    }

    Ok(Plan {
        t,
        k,
        d: 1 << t,
        s: n.div_ceil(t),
        block_widths: widths,
        n_targets: targets,
        nu,
        predicted_cost: predicted_cost_log(n, q, t),
    })
}
