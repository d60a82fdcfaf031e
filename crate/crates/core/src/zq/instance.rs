use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::arith::{is_prime, MAX_MODULUS_BITS};
use super::matrix::{rank_mod_q, ZqMatrix};
use super::ZqError;

/// An SIS instance: an `m x n` matrix `A` over Z_q with `m > n` and rank `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SisInstance {
    n: usize,
    m: usize,
    q: u64,
    a: ZqMatrix,
}

/// Validate the modulus and dimensions shared by every constructor.
pub fn check_parameters(n: usize, m: usize, q: u64) -> Result<(), ZqError> {
    if q >= 1u64 << MAX_MODULUS_BITS {
        return Err(ZqError::ModulusTooLarge(q));
    }
    if !is_prime(q) {
        return Err(ZqError::NotPrime(q));
    }
    if n == 0 || m <= n {
        return Err(ZqError::BadDimensions { n, m });
    }
    Ok(())
}

impl SisInstance {
    pub fn new(q: u64, a: ZqMatrix) -> Result<Self, ZqError> {
        let (m, n) = (a.rows(), a.cols());
        check_parameters(n, m, q)?;
        if let Some(&bad) = a.as_slice().iter().find(|&&x| x >= q) {
            return Err(ZqError::EntryOutOfRange { value: bad, q });
        }
        let rank = rank_mod_q(&a, q);
        if rank != n {
            return Err(ZqError::RankDeficient { rank, n });
        }
        Ok(Self { n, m, q, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn matrix(&self) -> &ZqMatrix {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[u64] {
        self.a.row(i)
    }

    /// `c . A mod q`. Each term is reduced into `[0, q)` before the multiply
    /// so the `u128` accumulator cannot overflow for any realistic `m`.
    pub fn mat_vec_mod(&self, c: &[i64]) -> Result<Vec<u64>, ZqError> {
        if c.len() != self.m {
            return Err(ZqError::LengthMismatch {
                expected: self.m,
                got: c.len(),
            });
        }
        let q = self.q as u128;
        let mut acc = vec![0u128; self.n];
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let ci = (ci as i128).rem_euclid(q as i128) as u128;
            for (slot, &aij) in acc.iter_mut().zip(self.a.row(i)) {
                *slot += ci * aij as u128 % q;
            }
        }
        Ok(acc.into_iter().map(|x| (x % q) as u64).collect())
    }

    /// SHA-256 over the dimensions and entries; binds solution sets to this instance.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"SIS");
        h.update((self.n as u64).to_le_bytes());
        h.update((self.m as u64).to_le_bytes());
        h.update(self.q.to_le_bytes());
        for &x in self.a.as_slice() {
            h.update(x.to_le_bytes());
        }
        h.finalize().into()
    }
}

/// Sample a uniform instance, resampling the whole matrix until it has full
/// column rank. Deterministic in `seed`.
pub fn gen_instance(n: usize, m: usize, q: u64, seed: u64) -> Result<SisInstance, ZqError> {
    check_parameters(n, m, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0u32;
    loop {
        let data: Vec<u64> = (0..m * n).map(|_| rng.random_range(0..q)).collect();
        let a = ZqMatrix::from_row_major(m, n, data);
        if rank_mod_q(&a, q) == n {
            if rejected > 0 {
                log::debug!("gen_instance: resampled {rejected} rank-deficient matrices");
            }
            return Ok(SisInstance { n, m, q, a });
        }
        rejected += 1;
    }
}

/// A length-`m` integer vector with its exact squared norm.
///
/// Ordering is by squared norm first, then lexicographic on the entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinationVector {
    norm_sq: u128,
    coeffs: Vec<i64>,
}

impl CombinationVector {
    pub fn new(coeffs: Vec<i64>) -> Self {
        let norm_sq = squared_norm(&coeffs);
        Self { norm_sq, coeffs }
    }

    pub fn zeros(m: usize) -> Self {
        Self::new(vec![0; m])
    }

    /// Unit vector scaled by `scale`.
    pub fn basis(m: usize, i: usize, scale: i64) -> Self {
        let mut c = vec![0; m];
        c[i] = scale;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact sum of squares, saturating at `u128::MAX`.
    pub fn norm_sq(&self) -> u128 {
        self.norm_sq
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&x| x == 0)
    }

    pub fn negated(&self) -> Self {
        Self {
            norm_sq: self.norm_sq,
            coeffs: self.coeffs.iter().map(|&x| -x).collect(),
        }
    }

    /// Representative of `{c, -c}` whose first nonzero entry is positive.
    pub fn canonical(self) -> Self {
        match self.coeffs.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => self.negated(),
            _ => self,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.coeffs.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0)
    }
}

impl fmt::Display for CombinationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in &self.coeffs {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        Ok(())
    }
}

pub fn squared_norm(c: &[i64]) -> u128 {
    c.iter().fold(0u128, |acc, &x| {
        let s = (x as i128 * x as i128) as u128;
        acc.saturating_add(s)
    })
}

/// Largest integer `b` with `b <= nu^2`, tolerant of floating error when
/// `nu` was itself computed as a square root.
pub fn norm_bound_sq(nu: f64) -> u128 {
    if nu.is_nan() || nu <= 0.0 {
        return 0;
    }
    let sq = nu * nu;
    let nearest = sq.round();
    if (sq - nearest).abs() <= 1e-9 * sq.max(1.0) {
        nearest as u128
    } else {
        sq.floor() as u128
    }
}

/// Why a candidate failed [`verify_solution`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    LengthMismatch { expected: usize, got: usize },
    ZeroVector,
    TrivialLatticeVector,
    NormTooLarge { norm_sq: u128, bound_sq: u128 },
    NotInKernel,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::LengthMismatch { expected, got } => {
                write!(f, "length mismatch (expected {expected}, got {got})")
            }
            Rejection::ZeroVector => f.write_str("zero vector"),
            Rejection::TrivialLatticeVector => f.write_str("trivial lattice vector"),
            Rejection::NormTooLarge { norm_sq, bound_sq } => {
                write!(f, "norm exceeds bound ({norm_sq} > {bound_sq})")
            }
            Rejection::NotInKernel => f.write_str("c.A is not zero mod q"),
        }
    }
}

/// Outcome of [`verify_solution`]; `reason` names the first failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub reason: Option<Rejection>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.reason.is_none()
    }
}

/// Check `c != 0`, `c` not congruent to zero componentwise, `|c| <= nu`, and
/// `c . A = 0 mod q`, in that order.
pub fn verify_solution(c: &CombinationVector, inst: &SisInstance, nu: f64) -> Verdict {
    verify_solution_sq(c, inst, norm_bound_sq(nu))
}

/// [`verify_solution`] against an exact squared-norm bound.
pub fn verify_solution_sq(c: &CombinationVector, inst: &SisInstance, bound_sq: u128) -> Verdict {
    let reason = if c.len() != inst.m() {
        Some(Rejection::LengthMismatch {
            expected: inst.m(),
            got: c.len(),
        })
    } else if c.is_zero() {
        Some(Rejection::ZeroVector)
    } else if c.coeffs().iter().all(|&x| x.rem_euclid(inst.q() as i64) == 0) {
        Some(Rejection::TrivialLatticeVector)
    } else if c.norm_sq() > bound_sq {
        Some(Rejection::NormTooLarge {
            norm_sq: c.norm_sq(),
            bound_sq,
        })
    } else if inst
        .mat_vec_mod(c.coeffs())
        .map(|r| r.iter().any(|&x| x != 0))
        .unwrap_or(true)
    {
        Some(Rejection::NotInKernel)
    } else {
        None
    };
    Verdict { reason }
}
