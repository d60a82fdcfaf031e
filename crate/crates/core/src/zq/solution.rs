use std::collections::BTreeSet;

use super::instance::{verify_solution_sq, CombinationVector, Rejection, SisInstance};
use super::ZqError;

/// Distinct kernel vectors of one instance, stored in canonical sign form.
///
/// Iteration order is by squared norm, then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    m: usize,
    instance_digest: [u8; 32],
    solutions: BTreeSet<CombinationVector>,
}

impl SolutionSet {
    pub fn new(inst: &SisInstance) -> Self {
        Self {
            m: inst.m(),
            instance_digest: inst.digest(),
            solutions: BTreeSet::new(),
        }
    }

    pub fn instance_digest(&self) -> &[u8; 32] {
        &self.instance_digest
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Insert after checking membership against `inst`. Returns `Ok(false)`
    /// if `c` or `-c` is already present.
    pub fn insert(&mut self, inst: &SisInstance, c: CombinationVector) -> Result<bool, ZqError> {
        self.insert_bounded(inst, c, u128::MAX)
    }

    /// As [`insert`](Self::insert), also enforcing `norm_sq <= bound_sq`.
    pub fn insert_bounded(
        &mut self,
        inst: &SisInstance,
        c: CombinationVector,
        bound_sq: u128,
    ) -> Result<bool, ZqError> {
        if inst.digest() != self.instance_digest {
            return Err(ZqError::InstanceMismatch);
        }
        if let Some(reason) = verify_solution_sq(&c, inst, bound_sq).reason {
            return Err(ZqError::Rejected(reason));
        }
        Ok(self.solutions.insert(c.canonical()))
    }

    pub fn contains(&self, c: &CombinationVector) -> bool {
        self.solutions.contains(&c.clone().canonical())
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CombinationVector> {
        self.solutions.iter()
    }

    pub fn max_norm_sq(&self) -> u128 {
        self.solutions.iter().map(|c| c.norm_sq()).max().unwrap_or(0)
    }

    /// Keep the first `n` members in iteration order.
    pub fn truncate(&mut self, n: usize) {
        if self.solutions.len() > n {
            self.solutions = std::mem::take(&mut self.solutions).into_iter().take(n).collect();
        }
    }

    /// Re-verify every member; returns the first failure.
    pub fn audit(&self, inst: &SisInstance, bound_sq: u128) -> Result<(), (CombinationVector, Rejection)> {
        for c in &self.solutions {
            if let Some(r) = verify_solution_sq(c, inst, bound_sq).reason {
                return Err((c.clone(), r));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a SolutionSet {
    type Item = &'a CombinationVector;
    type IntoIter = std::collections::btree_set::Iter<'a, CombinationVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.solutions.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::{gen_instance, ZqMatrix};

    #[test]
    fn insert_dedups_under_sign() {
        let inst = SisInstance::new(5, ZqMatrix::from_rows(&[vec![1], vec![4], vec![1]])).unwrap();
        let mut set = SolutionSet::new(&inst);
        assert!(set.insert(&inst, CombinationVector::new(vec![1, 1, 0])).unwrap());
        assert!(!set.insert(&inst, CombinationVector::new(vec![-1, -1, 0])).unwrap());
        assert!(set.insert(&inst, CombinationVector::new(vec![-1, 0, 1])).unwrap());
        assert_eq!(set.len(), 2);
        assert!(set.iter().all(|c| c.is_canonical()));
        assert!(set.contains(&CombinationVector::new(vec![1, 0, -1])));
    }

    #[test]
    fn insert_rejects_trivial_and_foreign() {
        let inst = gen_instance(1, 3, 5, 0).unwrap();
        let mut set = SolutionSet::new(&inst);
        assert_eq!(
            set.insert(&inst, CombinationVector::basis(3, 0, 5)),
            Err(ZqError::Rejected(Rejection::TrivialLatticeVector))
        );
        let other = gen_instance(1, 3, 5, 1).unwrap();
        assert_eq!(
            set.insert(&other, CombinationVector::basis(3, 0, 5)),
            Err(ZqError::InstanceMismatch)
        );
    }
}
