//! Inhomogeneous SIS (`cA = a mod q`) via the stacked instance `[A; a]`.
//!
//! A kernel vector `(c, l)` of the stacked matrix satisfies `cA = -l a`, so
//! any kernel vector with last entry `l = +-1` yields `-l c` as an
//! inhomogeneous solution. Pairs `s1 + sign * s2` are also tried when their
//! last entries combine to `+-1`; deeper combinations are not searched.

use std::collections::BTreeSet;

use super::instance::{CombinationVector, SisInstance};
use super::solution::SolutionSet;
use super::ZqError;

/// An inhomogeneous problem together with its homogeneous reduction.
#[derive(Clone, Debug)]
pub struct InhomogeneousProblem {
    original: SisInstance,
    target: Vec<u64>,
    reduced: SisInstance,
}

impl InhomogeneousProblem {
    pub fn new(original: SisInstance, target: Vec<u64>) -> Result<Self, ZqError> {
        let reduced = inhomogeneous_reduce(&original, &target)?;
        Ok(Self {
            original,
            target,
            reduced,
        })
    }

    pub fn original(&self) -> &SisInstance {
        &self.original
    }

    pub fn target(&self) -> &[u64] {
        &self.target
    }

    /// The `(m + 1) x n` homogeneous instance to hand to the solver.
    pub fn reduced(&self) -> &SisInstance {
        &self.reduced
    }

    pub fn extract(&self, sols: &SolutionSet) -> Vec<CombinationVector> {
        extract_inhomogeneous(sols, &self.original, &self.target)
    }

    /// True iff `c . A = a mod q` on the original instance.
    pub fn check(&self, c: &[i64]) -> bool {
        self.original.mat_vec_mod(c).is_ok_and(|r| r == self.target)
    }
}

/// Stack `a` under `A`. The rank condition is re-checked on the result.
pub fn inhomogeneous_reduce(inst: &SisInstance, a: &[u64]) -> Result<SisInstance, ZqError> {
    if a.len() != inst.n() {
        return Err(ZqError::LengthMismatch {
            expected: inst.n(),
            got: a.len(),
        });
    }
    if let Some(&bad) = a.iter().find(|&&x| x >= inst.q()) {
        return Err(ZqError::EntryOutOfRange {
            value: bad,
            q: inst.q(),
        });
    }
    if a.iter().all(|&x| x == 0) {
        return Err(ZqError::ZeroTarget);
    }
    SisInstance::new(inst.q(), inst.matrix().stack_row(a))
}

/// Recover solutions of `cA = a` from kernel vectors of the stacked instance.
/// Every returned vector is checked against `original` and `a`; the result is
/// sorted by norm and duplicate-free.
pub fn extract_inhomogeneous(sols: &SolutionSet, original: &SisInstance, a: &[u64]) -> Vec<CombinationVector> {
    let m = original.m();
    if sols.m() != m + 1 {
        log::warn!(
            "extract_inhomogeneous: solution length {} != m + 1 = {}",
            sols.m(),
            m + 1
        );
        return Vec::new();
    }
    let mut found = BTreeSet::new();
    let mut accept = |head: &[i64], last: i64| {
        if last.abs() != 1 {
            return;
        }
        let c: Vec<i64> = head.iter().map(|&x| -last * x).collect();
        if original.mat_vec_mod(&c).is_ok_and(|r| r == a) {
            found.insert(CombinationVector::new(c));
        }
    };

    let tagged: Vec<&[i64]> = sols.iter().map(|s| s.coeffs()).filter(|s| s[m] != 0).collect();
    for s in &tagged {
        accept(&s[..m], s[m]);
    }
    let mut buf = vec![0i64; m];
    for (i, s1) in tagged.iter().enumerate() {
        for s2 in &tagged[i + 1..] {
            for sign in [1i64, -1] {
                let last = s1[m] + sign * s2[m];
                if last.abs() != 1 {
                    continue;
                }
                for (j, slot) in buf.iter_mut().enumerate() {
                    *slot = s1[j] + sign * s2[j];
                }
                accept(&buf, last);
            }
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::{gen_instance, ZqMatrix};

    #[test]
    fn reduce_shape_and_errors() {
        let inst = gen_instance(3, 20, 97, 1).unwrap();
        let red = inhomogeneous_reduce(&inst, &[1, 2, 3]).unwrap();
        assert_eq!((red.m(), red.n()), (21, 3));
        assert_eq!(red.row(20), &[1, 2, 3]);
        assert_eq!(red.row(5), inst.row(5));
        assert_eq!(
            inhomogeneous_reduce(&inst, &[0, 0, 0]).unwrap_err(),
            ZqError::ZeroTarget
        );
        assert!(matches!(
            inhomogeneous_reduce(&inst, &[0, 0]),
            Err(ZqError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn last_entry_one_gives_negated_head() {
        // (c, 1) in the kernel means cA = -a.
        let inst = gen_instance(2, 6, 11, 4).unwrap();
        let c0 = [1i64, 0, -1, 0, 0, 1];
        let minus_a: Vec<u64> = inst.mat_vec_mod(&c0).unwrap();
        let a: Vec<u64> = minus_a.iter().map(|&x| (11 - x) % 11).collect();
        let prob = InhomogeneousProblem::new(inst.clone(), a.clone()).unwrap();
        let mut lifted = c0.to_vec();
        lifted.push(1);
        assert!(prob.reduced().mat_vec_mod(&lifted).unwrap().iter().all(|&x| x == 0));

        let mut sols = SolutionSet::new(prob.reduced());
        sols.insert(prob.reduced(), CombinationVector::new(lifted)).unwrap();
        let out = prob.extract(&sols);
        let negated: Vec<i64> = c0.iter().map(|x| -x).collect();
        assert_eq!(out, vec![CombinationVector::new(negated.clone())]);
        assert!(prob.check(&negated));
    }

    #[test]
    fn empty_set_gives_nothing() {
        let inst = gen_instance(2, 6, 11, 4).unwrap();
        let prob = InhomogeneousProblem::new(inst, vec![1, 0]).unwrap();
        assert!(prob.extract(&SolutionSet::new(prob.reduced())).is_empty());
    }

    #[test]
    fn pair_combination_is_found() {
        // A = [1; 2; 3] over Z_7, a = 1. Kernel vectors of [A; a] with last
        // entries 3 and 2: neither works alone, their difference has last 1.
        let inst = SisInstance::new(7, ZqMatrix::from_rows(&[vec![1], vec![2], vec![3]])).unwrap();
        let prob = InhomogeneousProblem::new(inst, vec![1]).unwrap();
        let red = prob.reduced();
        let s1 = CombinationVector::new(vec![0, 2, 0, 3]);
        let s2 = CombinationVector::new(vec![0, 1, 1, 2]);
        let mut sols = SolutionSet::new(red);
        sols.insert(red, s1).unwrap();
        sols.insert(red, s2).unwrap();
        // s1 - s2 = (0, 1, -1, 1) -> c = (0, -1, 1), and -2 + 3 = 1.
        let out = prob.extract(&sols);
        assert_eq!(out, vec![CombinationVector::new(vec![0, -1, 1])]);
        assert!(prob.check(out[0].coeffs()));
    }
}
