//! The sort-based collision finder against a quadratic all-pairs scan.

use std::collections::BTreeSet;

use multisis_core::merge::{canonicalize_sign, find_collisions, MergeRecipe};
use multisis_core::seed::{SeedVector, SparseCombo, TrackedRow};
use multisis_core::zq::{add_mod, neg_mod, sub_mod};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tracked(residuals: Vec<Vec<u64>>) -> Vec<TrackedRow> {
    residuals
        .into_iter()
        .enumerate()
        .map(|(i, residual)| TrackedRow {
            residual,
            combo: SparseCombo::from_seed(&SeedVector::new(vec![(i as u32, 1)])),
        })
        .collect()
}

/// Every recipe the full-matching policy should produce, found the slow way.
fn all_pairs(rows: &[Vec<u64>], width: usize, q: u64) -> BTreeSet<MergeRecipe> {
    let mut out = BTreeSet::new();
    let is_zero = |r: &[u64]| r[..width].iter().all(|&x| x == 0);
    for (a, ra) in rows.iter().enumerate() {
        if is_zero(ra) {
            out.insert(MergeRecipe::ZeroRow(a));
            continue;
        }
        for (b, rb) in rows.iter().enumerate().skip(a + 1) {
            if is_zero(rb) {
                continue;
            }
            for sign in [1i8, -1] {
                let cancels = (0..width).all(|j| {
                    let s = if sign > 0 {
                        add_mod(ra[j], rb[j], q)
                    } else {
                        sub_mod(ra[j], rb[j], q)
                    };
                    s == 0
                });
                if cancels {
                    out.insert(MergeRecipe::Pair { a, b, sign });
                }
            }
        }
    }
    out
}

fn random_rows(rng: &mut ChaCha8Rng, count: usize, len: usize, q: u64, alphabet: u64) -> Vec<Vec<u64>> {
    // Draw from a small set of values so collisions are frequent, then negate
    // some rows so that both signs occur.
    let alphabet = alphabet.min(q);
    (0..count)
        .map(|_| {
            let row: Vec<u64> = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
            if rng.random_bool(0.5) {
                row.into_iter().map(|x| neg_mod(x, q)).collect()
            } else {
                row
            }
        })
        .collect()
}

fn check(rows: Vec<Vec<u64>>, width: usize, q: u64) {
    let want = all_pairs(&rows, width, q);
    let index = find_collisions(&tracked(rows), 0..width, q);
    let got_list: Vec<MergeRecipe> = index.recipes().collect();
    let got: BTreeSet<MergeRecipe> = got_list.iter().copied().collect();
    assert_eq!(got.len(), got_list.len(), "recipe emitted twice");
    assert_eq!(got, want);
    let pairs = want.iter().filter(|r| matches!(r, MergeRecipe::Pair { .. })).count();
    assert_eq!(index.pair_count(), pairs as u64);
}

#[test]
fn fifty_random_row_lists_match_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let primes = [2u64, 3, 5, 7, 11, 97, 65_537];
    for case in 0..50 {
        let q = primes[case % primes.len()];
        let count = rng.random_range(2..=1000);
        let width = rng.random_range(1..=3);
        let len = width + rng.random_range(0..3);
        let alphabet = rng.random_range(1..=4);
        let rows = random_rows(&mut rng, count, len, q, alphabet);
        check(rows, width, q);
    }
}

#[test]
fn five_hundred_uniform_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for q in [3u64, 13] {
        let rows = random_rows(&mut rng, 500, 2, q, q);
        check(rows, 2, q);
    }
}

proptest! {
    #[test]
    fn sort_equals_quadratic_scan(
        q in prop::sample::select(vec![2u64, 3, 5, 7, 31]),
        width in 1usize..3,
        rows in prop::collection::vec(prop::collection::vec(0u64..7, 3), 1..60),
    ) {
        let rows: Vec<Vec<u64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x % q).collect()).collect();
        check(rows, width, q);
    }

    #[test]
    fn canonical_key_is_sign_invariant(q in prop::sample::select(vec![2u64, 3, 5, 97, 4_294_967_291]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let len = rng.random_range(1..6);
            let v: Vec<u64> = (0..len).map(|_| rng.random_range(0..q)).collect();
            let neg: Vec<u64> = v.iter().map(|&x| neg_mod(x, q)).collect();
            let (kv, kn) = (canonicalize_sign(&v, q), canonicalize_sign(&neg, q));
            prop_assert_eq!(&kv.key, &kn.key);
            let back: Vec<u64> = if kv.flipped { kv.key.iter().map(|&x| neg_mod(x, q)).collect() } else { kv.key.clone() };
            prop_assert_eq!(back, v);
        }
    }
}

#[test]
fn canonicalization_symmetry_on_ten_thousand_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    for i in 0..10_000 {
        let q = [3u64, 7, 97, 1_000_003][i % 4];
        let v: Vec<u64> = (0..4).map(|_| rng.random_range(0..q)).collect();
        let neg: Vec<u64> = v.iter().map(|&x| neg_mod(x, q)).collect();
        assert_eq!(canonicalize_sign(&v, q).key, canonicalize_sign(&neg, q).key);
    }
}
