//! Heuristic counts and plans rechecked with exact integer arithmetic.

use multisis_core::estimator::{asymptotic_t, capacity, gaussian_count_log, plan_parameters, pm1_count_log};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `ln Gamma(m/2 + 1)` from factorials: `(m/2)!` for even `m`, and
/// `Gamma(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)` with `j = (m + 1) / 2` for odd `m`.
fn ln_gamma_half_integer(m: u64) -> f64 {
    if m.is_multiple_of(2) {
        ln_big(&factorial(m / 2))
    } else {
        let j = m.div_ceil(2);
        ln_big(&factorial(2 * j)) - ln_big(&factorial(j)) - j as f64 * 4f64.ln() + 0.5 * std::f64::consts::PI.ln()
    }
}

fn binomial(m: u64, r: u64) -> BigUint {
    (0..r).fold(BigUint::one(), |acc, i| acc * (m - i) / (i + 1))
}

#[test]
fn gaussian_count_matches_exact_gamma_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let primes = [3u64, 5, 7, 97, 257, 65_537, 1_000_003];
    for _ in 0..100 {
        let m = rng.random_range(2..600u64);
        let n = rng.random_range(1..m.min(40));
        let q = primes[rng.random_range(0..primes.len())];
        let nu = rng.random_range(0.5..200.0f64);
        let want = 0.5 * m as f64 * std::f64::consts::PI.ln() + m as f64 * nu.ln()
            - ln_gamma_half_integer(m)
            - n as f64 * (q as f64).ln();
        let got = gaussian_count_log(m as usize, nu, n as usize, q).unwrap();
        let rel = (got - want).abs() / want.abs().max(1.0);
        assert!(rel < 1e-6, "m={m} n={n} q={q} nu={nu}: {got} vs {want}");
    }
}

#[test]
fn capacity_matches_binomial_sum() {
    for m in 2..40u64 {
        for k in 1..m.min(8) {
            let want: BigUint = (1..=k).map(|i| binomial(m, i) << (i - 1)).sum();
            assert_eq!(capacity(m as usize, k as usize).unwrap(), want, "m={m} k={k}");
        }
    }
}

#[test]
fn pm1_count_fractions() {
    // (m, d, n, q) -> capacity / q^n as an exact fraction
    let cases = [
        (12, 2, 2, 5, 144.0 / 25.0),
        (10, 2, 1, 7, 100.0 / 7.0),
        (12, 3, 2, 7, 1024.0 / 49.0),
    ];
    for (m, d, n, q, want) in cases {
        let got = pm1_count_log(m, d, n, q).unwrap().exp();
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }
}

#[test]
fn plans_recheck_with_big_integers() {
    let mut checked = 0;
    for n in 1..=8usize {
        for m in [n + 1, 20, 50, 200, 1000] {
            for q in [2u64, 3, 5, 97, 65_537] {
                for nu in [2.0, 3.5, 7.0, 16.0, 40.0] {
                    let Ok(p) = plan_parameters(n, m, q, nu, 100, 1 << 20) else {
                        continue;
                    };
                    let need = BigUint::from(q).pow(n.div_ceil(p.t) as u32);
                    assert!(capacity(m, p.k).unwrap() >= need);
                    assert!(((1u128 << (2 * p.t)) * p.k as u128) as f64 <= nu * nu + 1e-9);
                    assert_eq!(p.block_widths.iter().sum::<usize>(), n);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 300, "only {checked} feasible plans");
}

#[test]
fn asymptotic_depth_is_a_lower_guide_on_large_parameters() {
    // In the large regime the planner's depth should not fall below the
    // asymptotic estimate's floor.
    for (n, m, q, nu) in [
        (16usize, 4000usize, 3u64, 64.0),
        (20, 20_000, 5, 100.0),
        (12, 5000, 7, 50.0),
    ] {
        let p = plan_parameters(n, m, q, nu, 100, 1 << 20).unwrap();
        let t_star = asymptotic_t(n, m, q, nu).unwrap();
        assert!(
            p.t as f64 >= t_star.floor(),
            "n={n} m={m} q={q} nu={nu}: t={} vs {t_star}",
            p.t
        );
    }
}
