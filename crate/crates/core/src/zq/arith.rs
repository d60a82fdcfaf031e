//! Scalar arithmetic over Z_q.
//!
//! Residues are `u64` values in `[0, q)`. The modulus is limited to
//! [`MAX_MODULUS_BITS`] bits so that every product fits a `u128`.

/// Largest supported modulus width.
pub const MAX_MODULUS_BITS: u32 = 62;

#[inline]
pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        q - b + a
    }
}

#[inline]
pub fn neg_mod(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Reduce a signed integer to its canonical residue.
#[inline]
pub fn reduce_signed(a: i64, q: u64) -> u64 {
    (a as i128).rem_euclid(q as i128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime, via Fermat.
pub fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(q), "zero has no inverse");
    pow_mod(a, q - 2, q)
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_table() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        let sieve: Vec<u64> = (2..100u64).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
        assert_eq!(primes, sieve);
    }

    #[test]
    fn primality_large() {
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(91));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(4_611_686_018_427_387_847)); // largest prime below 2^62
    }

    #[test]
    fn inverse_and_signed_reduction() {
        for a in 1..97 {
            assert_eq!(mul_mod(a, inv_mod(a, 97), 97), 1);
        }
        assert_eq!(reduce_signed(-1, 5), 4);
        assert_eq!(reduce_signed(-10, 5), 0);
        assert_eq!(reduce_signed(i64::MIN, 7), (i64::MIN as i128).rem_euclid(7) as u64);
        assert_eq!(sub_mod(1, 3, 5), 3);
        assert_eq!(neg_mod(0, 5), 0);
    }
}
