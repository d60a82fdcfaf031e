//! Level-0 rows: `{-1, 0, 1}` combinations of at most `k` rows of `A`.

use std::collections::{HashSet, VecDeque};

use itertools::Itertools;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::zq::{add_mod, sub_mod, CombinationVector, SisInstance};

/// A `{-1, 0, 1}` vector given by its support. Indices are strictly
/// increasing and the first sign is `+1`, so `v` and `-v` share one
/// representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedVector {
    support: Vec<(u32, i8)>,
}

impl SeedVector {
    /// Build from `(index, sign)` pairs. Panics unless the input is already
    /// canonical.
    pub fn new(support: Vec<(u32, i8)>) -> Self {
        assert!(!support.is_empty(), "empty seed");
        assert!(support.windows(2).all(|w| w[0].0 < w[1].0), "indices not increasing");
        assert!(support.iter().all(|&(_, s)| s == 1 || s == -1), "signs must be +-1");
        assert_eq!(support[0].1, 1, "leading sign must be +1");
        Self { support }
    }

    /// Seed on `indices` with sign pattern `mask`: bit `j - 1` set makes
    /// entry `j` negative; entry 0 is always positive.
    fn from_mask(indices: &[u32], mask: u64) -> Self {
        let support = indices
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let neg = j > 0 && (mask >> (j - 1)) & 1 == 1;
                (i, if neg { -1 } else { 1 })
            })
            .collect();
        Self { support }
    }

    pub fn support(&self) -> &[(u32, i8)] {
        &self.support
    }

    /// Number of nonzero entries, equal to the squared norm.
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn to_combination(&self, m: usize) -> CombinationVector {
        let mut c = vec![0i64; m];
        for &(i, s) in &self.support {
            c[i as usize] = s as i64;
        }
        CombinationVector::new(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeedOrder {
    /// Weight ascending, then lexicographic supports and sign patterns.
    Lex,
    /// Weight ascending, uniformly shuffled within each weight class.
    Random(u64),
}

/// `C(m, w) 2^(w-1)`, saturating.
fn class_size(m: usize, w: usize) -> u128 {
    let mut binom: u128 = 1;
    for i in 1..=w {
        binom = match binom.checked_mul((m - i + 1) as u128) {
            Some(x) => x / i as u128,
            None => return u128::MAX,
        };
    }
    binom.saturating_mul(1u128 << (w - 1).min(126))
}

/// Streams distinct canonical seeds of weight `1..=k`, at most `limit` of them.
pub struct SeedStream {
    m: usize,
    k: usize,
    remaining: usize,
    weight: usize,
    order: SeedOrder,
    rng: Option<ChaCha8Rng>,
    lex: Option<LexClass>,
    buffer: VecDeque<SeedVector>,
}

struct LexClass {
    combos: itertools::Combinations<std::ops::Range<u32>>,
    current: Option<Vec<u32>>,
    mask: u64,
}

impl LexClass {
    fn new(m: usize, w: usize) -> Self {
        let mut combos = (0..m as u32).combinations(w);
        let current = combos.next();
        Self {
            combos,
            current,
            mask: 0,
        }
    }

    fn next(&mut self) -> Option<SeedVector> {
        let idx = self.current.as_ref()?;
        let seed = SeedVector::from_mask(idx, self.mask);
        self.mask += 1;
        if self.mask >> (idx.len() - 1) != 0 {
            self.mask = 0;
            self.current = self.combos.next();
        }
        Some(seed)
    }
}

pub fn enumerate_seeds(m: usize, k: usize, limit: usize, order: SeedOrder) -> SeedStream {
    assert!(k >= 1 && k < m, "need 1 <= k < m");
    let rng = match order {
        SeedOrder::Lex => None,
        SeedOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    SeedStream {
        m,
        k,
        remaining: limit,
        weight: 0,
        order,
        rng,
        lex: None,
        buffer: VecDeque::new(),
    }
}

impl SeedStream {
    /// Move to the next weight class. Returns false when exhausted.
    fn advance_class(&mut self) -> bool {
        if self.weight >= self.k || self.remaining == 0 {
            return false;
        }
        self.weight += 1;
        let w = self.weight;
        match self.order {
            SeedOrder::Lex => self.lex = Some(LexClass::new(self.m, w)),
            SeedOrder::Random(_) => {
                let size = class_size(self.m, w);
                let rng = self.rng.as_mut().expect("random order has an rng");
                self.buffer = if size <= 2 * self.remaining as u128 {
                    // small enough to materialize, shuffle, and truncate
                    let mut lex = LexClass::new(self.m, w);
                    let mut all: Vec<SeedVector> = std::iter::from_fn(|| lex.next()).collect();
                    all.shuffle(rng);
                    all.truncate(self.remaining);
                    all.into()
                } else {
                    sample_class(self.m, w, self.remaining, rng)
                };
            }
        }
        true
    }
}

/// Uniform sample of `count` distinct seeds of weight `w`, by rejection.
/// Only called when the class holds more than `2 * count` members.
fn sample_class(m: usize, w: usize, count: usize, rng: &mut ChaCha8Rng) -> VecDeque<SeedVector> {
    let mut seen = HashSet::with_capacity(count);
    let mut out = VecDeque::with_capacity(count);
    while out.len() < count {
        let mut idx: Vec<u32> = index::sample(rng, m, w).into_iter().map(|i| i as u32).collect();
        idx.sort_unstable();
        let mask = if w > 1 { rng.random_range(0..1u64 << (w - 1)) } else { 0 };
        let seed = SeedVector::from_mask(&idx, mask);
        if seen.insert(seed.clone()) {
            out.push_back(seed);
        }
    }
    out
}

impl Iterator for SeedStream {
    type Item = SeedVector;

    fn next(&mut self) -> Option<SeedVector> {
        loop {
            if self.remaining == 0 {
                return None;
            }
            let item = match self.order {
                SeedOrder::Lex => self.lex.as_mut().and_then(LexClass::next),
                SeedOrder::Random(_) => self.buffer.pop_front(),
            };
            if let Some(seed) = item {
                self.remaining -= 1;
                return Some(seed);
            }
            if !self.advance_class() {
                return None;
            }
        }
    }
}

/// A row of the current level: the residual on the columns not yet zeroed
/// and the sparse combination of rows of `A` that produced it.
///
/// Invariant: `residual = combo . A[:, remaining columns] mod q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedRow {
    pub residual: Vec<u64>,
    pub combo: SparseCombo,
}

/// Sparse integer vector, sorted by index, no explicit zeros, first
/// coefficient positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseCombo {
    terms: Vec<(u32, i64)>,
    norm_sq: u64,
}

impl SparseCombo {
    pub fn from_seed(seed: &SeedVector) -> Self {
        let terms: Vec<(u32, i64)> = seed.support.iter().map(|&(i, s)| (i, s as i64)).collect();
        Self {
            norm_sq: terms.len() as u64,
            terms,
        }
    }

    pub fn terms(&self) -> &[(u32, i64)] {
        &self.terms
    }

    pub fn norm_sq(&self) -> u64 {
        self.norm_sq
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every coefficient divisible by `q` (the vector is a trivial kernel
    /// element, including the zero vector).
    pub fn is_zero_mod(&self, q: u64) -> bool {
        self.terms.iter().all(|&(_, c)| c.rem_euclid(q as i64) == 0)
    }

    /// `self + sign * other` by a merge over sorted indices. The result may
    /// have a negative leading coefficient; see [`is_canonical`](Self::is_canonical).
    pub fn combine(&self, other: &SparseCombo, sign: i64) -> SparseCombo {
        let (a, b) = (&self.terms, &other.terms);
        let mut terms = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(ia, ca)), Some(&(ib, cb))) if ia == ib => {
                    i += 1;
                    j += 1;
                    (ia, ca + sign * cb)
                }
                (Some(&(ia, ca)), Some(&(ib, _))) if ia < ib => {
                    i += 1;
                    (ia, ca)
                }
                (Some(&(ia, ca)), None) => {
                    i += 1;
                    (ia, ca)
                }
                (_, Some(&(ib, cb))) => {
                    j += 1;
                    (ib, sign * cb)
                }
                (None, None) => unreachable!(),
            };
            if next.1 != 0 {
                terms.push(next);
            }
        }
        let norm_sq = terms.iter().map(|&(_, c)| (c * c) as u64).sum();
        SparseCombo { terms, norm_sq }
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.first().is_none_or(|&(_, c)| c > 0)
    }

    pub fn negate(&mut self) {
        for t in &mut self.terms {
            t.1 = -t.1;
        }
    }

    pub fn to_dense(&self, m: usize) -> CombinationVector {
        let mut c = vec![0i64; m];
        for &(i, x) in &self.terms {
            c[i as usize] = x;
        }
        CombinationVector::new(c)
    }
}

impl TrackedRow {
    /// Negate combo and residual together if the combo's leading
    /// coefficient is negative.
    pub fn canonicalize(&mut self, q: u64) {
        if !self.combo.is_canonical() {
            self.combo.negate();
            for r in &mut self.residual {
                *r = crate::zq::neg_mod(*r, q);
            }
        }
    }

    /// Recompute the residual from scratch on columns `offset..n`.
    pub fn check(&self, inst: &SisInstance, offset: usize) -> bool {
        let full = inst
            .mat_vec_mod(self.combo.to_dense(inst.m()).coeffs())
            .expect("combo length is m");
        full[offset..] == self.residual[..]
    }
}

/// Level-0 rows, plus any seed whose full residual already vanished.
#[derive(Clone, Debug, Default)]
pub struct Level0 {
    pub rows: Vec<TrackedRow>,
    pub immediate: Vec<CombinationVector>,
}

/// Compute `residual = sum sign * A[i]` for each seed. Rows with a zero
/// residual are already solutions and are returned separately. Output order
/// follows input order regardless of thread count.
pub fn materialize_level0<I>(seeds: I, inst: &SisInstance) -> Level0
where
    I: IntoIterator<Item = SeedVector>,
{
    let q = inst.q();
    let seeds: Vec<SeedVector> = seeds.into_iter().collect();
    let rows: Vec<TrackedRow> = seeds
        .par_iter()
        .map(|seed| {
            let mut residual = vec![0u64; inst.n()];
            for &(i, s) in seed.support() {
                let row = inst.row(i as usize);
                for (acc, &a) in residual.iter_mut().zip(row) {
                    *acc = if s > 0 {
                        add_mod(*acc, a, q)
                    } else {
                        sub_mod(*acc, a, q)
                    };
                }
            }
            TrackedRow {
                residual,
                combo: SparseCombo::from_seed(seed),
            }
        })
        .collect();
    let mut out = Level0::default();
    for row in rows {
        if row.residual.iter().all(|&x| x == 0) {
            out.immediate.push(row.combo.to_dense(inst.m()));
        } else {
            out.rows.push(row);
        }
    }
    out
}
