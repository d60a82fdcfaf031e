//! Sort-and-merge solver for the Short Integer Solution (SIS) and MultiSIS
//! problems.
//!
//! Given `A` (`m x n` over Z_q) the solver builds many distinct short integer
//! vectors `c` with `c A = 0 mod q`: seed combinations of a few rows are
//! repeatedly paired so that one block of columns cancels per level, and the
//! combination vectors are tracked alongside the residuals.
//!
//! - [`zq`]: modular arithmetic, instances, verification, inhomogeneous reduction
//! - [`estimator`]: counting heuristics and the merge-depth planner
//! - [`seed`]: level-0 seed enumeration
//! - [`merge`]: collision finding and the level loop
//! - [`oracle`]: exhaustive enumeration used to validate everything above
//! - [`format`]: text formats for instances and solutions

pub mod estimator;
pub mod format;
pub mod merge;
pub mod oracle;
pub mod seed;
pub mod zq;

pub use estimator::{plan_parameters, Plan};
pub use merge::{solve, SolveConfig, SolveError, SolveReport};
pub use zq::{CombinationVector, SisInstance, SolutionSet};
