//! Finding rows that agree up to sign on a block of columns.

use std::ops::Range;

use rayon::prelude::*;

use crate::seed::TrackedRow;
use crate::zq::neg_mod;

/// Sign-canonical form of a block: `v` or `-v`, whichever has its first
/// nonzero entry in `[1, (q - 1) / 2]`. For `q = 2` every vector is its own
/// negation and is never flipped.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub key: Vec<u64>,
    pub flipped: bool,
}

impl CanonicalKey {
    pub fn is_zero(&self) -> bool {
        self.key.iter().all(|&x| x == 0)
    }
}

pub fn canonicalize_sign(v: &[u64], q: u64) -> CanonicalKey {
    let flip = q > 2 && v.iter().find(|&&x| x != 0).is_some_and(|&x| x > (q - 1) / 2);
    let key = if flip {
        v.iter().map(|&x| neg_mod(x, q)).collect()
    } else {
        v.to_vec()
    };
    CanonicalKey { key, flipped: flip }
}

/// One row of the next merge matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MergeRecipe {
    /// The source row already vanishes on the block.
    ZeroRow(usize),
    /// `rows[a] + sign * rows[b]` vanishes on the block; `a < b`.
    Pair { a: usize, b: usize, sign: i8 },
}

/// Rows sorted by the canonical key of one block, grouped by equal keys.
pub struct CollisionIndex {
    /// `(key, flipped, row)` sorted by key then row index.
    entries: Vec<(Vec<u64>, bool, usize)>,
    zeros: Vec<usize>,
    /// Ranges into `entries` of nonzero keys shared by at least two rows.
    groups: Vec<Range<usize>>,
    both_signs: bool,
}

/// Sort rows by the canonical key of `block` (columns of the residual).
pub fn find_collisions(rows: &[TrackedRow], block: Range<usize>, q: u64) -> CollisionIndex {
    let mut entries: Vec<(Vec<u64>, bool, usize)> = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let k = canonicalize_sign(&row.residual[block.clone()], q);
            (k.key, k.flipped, i)
        })
        .collect();
    entries.par_sort_unstable_by(|x, y| x.0.cmp(&y.0).then(x.2.cmp(&y.2)));

    let mut zeros = Vec::new();
    let mut groups = Vec::new();
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == entries[start].0 {
            end += 1;
        }
        if entries[start].0.iter().all(|&x| x == 0) {
            zeros.extend(entries[start..end].iter().map(|e| e.2));
        } else if end - start >= 2 {
            groups.push(start..end);
        }
        start = end;
    }
    CollisionIndex {
        entries,
        zeros,
        groups,
        both_signs: q == 2,
    }
}

/// `(j, l)` with `j < l`, the `r`-th pair in the order
/// (0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...
fn nth_pair(r: u64) -> (usize, usize) {
    let mut l = ((1.0 + (1.0 + 8.0 * r as f64).sqrt()) / 2.0) as u64;
    while l * (l - 1) / 2 > r {
        l -= 1;
    }
    while (l + 1) * l / 2 <= r {
        l += 1;
    }
    ((r - l * (l - 1) / 2) as usize, l as usize)
}

impl CollisionIndex {
    /// Rows whose block is zero, in row order.
    pub fn zero_rows(&self) -> &[usize] {
        &self.zeros
    }

    /// Number of nonzero keys shared by two or more rows.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    fn recipes_in_group(&self, g: &Range<usize>) -> u64 {
        let s = g.len() as u64;
        s * (s - 1) / 2 * if self.both_signs { 2 } else { 1 }
    }

    /// Total number of pair recipes available.
    pub fn pair_count(&self) -> u64 {
        self.groups.iter().map(|g| self.recipes_in_group(g)).sum()
    }

    fn recipe(&self, g: &Range<usize>, r: u64) -> MergeRecipe {
        let (p, variant) = if self.both_signs { (r / 2, r % 2) } else { (r, 0) };
        let (j, l) = nth_pair(p);
        let (_, fa, a) = self.entries[g.start + j];
        let (_, fb, b) = self.entries[g.start + l];
        debug_assert!(a < b);
        let mut sign = if fa == fb { -1 } else { 1 };
        if variant == 1 {
            sign = -sign;
        }
        MergeRecipe::Pair { a, b, sign }
    }

    /// All recipes: zero rows first, then pairs taken round-robin across
    /// groups (the first pair of every group, then the second, ...), so that
    /// a truncated prefix spreads over as many groups as possible.
    pub fn recipes(&self) -> RecipeIter<'_> {
        RecipeIter {
            index: self,
            zero_pos: 0,
            active: (0..self.groups.len()).collect(),
            pos: 0,
            round: 0,
        }
    }
}

pub struct RecipeIter<'a> {
    index: &'a CollisionIndex,
    zero_pos: usize,
    active: Vec<usize>,
    pos: usize,
    round: u64,
}

impl Iterator for RecipeIter<'_> {
    type Item = MergeRecipe;

    fn next(&mut self) -> Option<MergeRecipe> {
        if let Some(&z) = self.index.zeros.get(self.zero_pos) {
            self.zero_pos += 1;
            return Some(MergeRecipe::ZeroRow(z));
        }
        if self.pos == self.active.len() {
            let next_round = self.round + 1;
            let index = self.index;
            self.active
                .retain(|&g| index.recipes_in_group(&index.groups[g]) > next_round);
            self.round = next_round;
            self.pos = 0;
        }
        let &g = self.active.get(self.pos)?;
        self.pos += 1;
        Some(self.index.recipe(&self.index.groups[g], self.round))
    }
}
