//! Exact arithmetic over Z_q, SIS instances, and solution bookkeeping.

mod arith;
mod inhomogeneous;
mod instance;
mod matrix;
mod solution;

use thiserror::Error;

pub use arith::{add_mod, inv_mod, is_prime, mul_mod, neg_mod, pow_mod, reduce_signed, sub_mod, MAX_MODULUS_BITS};
pub use inhomogeneous::{extract_inhomogeneous, inhomogeneous_reduce, InhomogeneousProblem};
pub use instance::{
    check_parameters, gen_instance, norm_bound_sq, squared_norm, verify_solution, verify_solution_sq,
    CombinationVector, Rejection, SisInstance, Verdict,
};
pub use matrix::{rank_mod_q, ZqMatrix};
pub use solution::SolutionSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZqError {
    #[error("q not prime: {0}")]
    NotPrime(u64),
    #[error("modulus {0} exceeds {MAX_MODULUS_BITS} bits")]
    ModulusTooLarge(u64),
    #[error("need m > n >= 1 (got n = {n}, m = {m})")]
    BadDimensions { n: usize, m: usize },
    #[error("entry {value} is not a residue mod {q}")]
    EntryOutOfRange { value: u64, q: u64 },
    #[error("matrix has rank {rank} mod q, expected {n}")]
    RankDeficient { rank: usize, n: usize },
    #[error("vector length {got} does not match m = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target vector is zero mod q")]
    ZeroTarget,
    #[error("solution set belongs to a different instance")]
    InstanceMismatch,
    #[error("rejected: {0}")]
    Rejected(Rejection),
}
