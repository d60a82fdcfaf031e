//! End-to-end solves checked against the exhaustive oracles.

use std::collections::BTreeSet;

use multisis_core::estimator::plan_parameters;
use multisis_core::merge::{solve, SolveConfig};
use multisis_core::oracle::{
    brute_force_ball, brute_force_pm1, brute_force_pm1_ordered, cross_validate, DEFAULT_BUDGET,
};
use multisis_core::seed::{enumerate_seeds, materialize_level0, SeedOrder};
use multisis_core::zq::{gen_instance, verify_solution, verify_solution_sq, InhomogeneousProblem};

#[test]
fn level0_rows_recompute_from_their_seeds() {
    for (n, m, q, k) in [(3, 40, 5, 2), (4, 30, 97, 3), (2, 12, 2, 4)] {
        let inst = gen_instance(n, m, q, 17).unwrap();
        let level0 = materialize_level0(enumerate_seeds(m, k, usize::MAX, SeedOrder::Lex), &inst);
        for row in &level0.rows {
            assert!(row.check(&inst, 0));
            assert_eq!(row.residual, inst.mat_vec_mod(row.combo.to_dense(m).coeffs()).unwrap());
        }
        for c in &level0.immediate {
            assert!(verify_solution_sq(c, &inst, k as u128).is_valid());
        }
    }
}

#[test]
fn solver_output_is_a_subset_of_the_ball_oracle() {
    let mut compared = 0;
    for seed in 0..12u64 {
        let (n, q) = [(1usize, 5u64), (1, 7), (2, 3), (1, 11)][seed as usize % 4];
        let m = 8 + (seed as usize % 5);
        let nu = [2.0, 2.5, 3.0][seed as usize % 3];
        let inst = gen_instance(n, m, q, seed).unwrap();
        let Ok(report) = solve(&inst, nu, 20, &SolveConfig::default()) else {
            continue;
        };
        let oracle = brute_force_ball(&inst, nu, DEFAULT_BUDGET).unwrap();
        let cross = cross_validate(
            &report.solutions,
            &oracle.solutions,
            oracle.bound_sq,
            report.plan.norm_bound_sq(),
        )
        .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(cross.recall <= 1.0);
        compared += 1;
    }
    assert!(compared >= 8, "only {compared} instances compared");
}

#[test]
fn pm1_oracle_is_inside_the_ball_oracle() {
    for seed in 0..6 {
        let inst = gen_instance(2, 9, 5, seed).unwrap();
        let ball = brute_force_ball(&inst, 2.0, DEFAULT_BUDGET).unwrap();
        let pm1 = brute_force_pm1(&inst, 4, DEFAULT_BUDGET).unwrap();
        let ball: BTreeSet<_> = ball.solutions.into_iter().collect();
        assert!(pm1.solutions.iter().all(|c| ball.contains(c)));
        assert!(ball.len() >= pm1.solutions.len());
    }
}

#[test]
fn pm1_oracle_does_not_depend_on_visit_order() {
    let inst = gen_instance(2, 14, 7, 5).unwrap();
    let base = brute_force_pm1(&inst, 3, DEFAULT_BUDGET).unwrap();
    for shuffle in 0..5 {
        let other = brute_force_pm1_ordered(&inst, 3, DEFAULT_BUDGET, Some(shuffle)).unwrap();
        assert_eq!(base.solutions, other.solutions);
        assert_eq!(base.report.enumerated, other.report.enumerated);
    }
}

#[test]
fn solutions_are_within_norm_bound_without_pruning() {
    let inst = gen_instance(3, 60, 5, 8).unwrap();
    let cfg = SolveConfig {
        prune: false,
        ..SolveConfig::default()
    };
    let report = solve(&inst, 6.0, 50, &cfg).unwrap();
    let plan = &report.plan;
    for (i, level) in report.levels.iter().enumerate() {
        assert!(level.max_norm_sq <= (1u64 << (2 * (i + 1))) * plan.k as u64);
    }
    for c in &report.solutions {
        assert!(c.norm_sq() <= plan.norm_bound_sq());
        assert!(verify_solution(c, &inst, 6.0).is_valid());
    }
}

#[test]
fn planted_inhomogeneous_target_is_recovered() {
    let inst = gen_instance(2, 60, 5, 21).unwrap();
    let c0: Vec<i64> = (0..60).map(|i| if i % 17 == 0 { 1 } else { 0 }).collect();
    let a = inst.mat_vec_mod(&c0).unwrap();
    let problem = InhomogeneousProblem::new(inst, a).unwrap();
    let reduced = problem.reduced();
    let plan = plan_parameters(reduced.n(), reduced.m(), 5, 4.0, 200, 1 << 16).unwrap();
    let report = multisis_core::merge::solve_with_plan(reduced, &plan, &SolveConfig::default()).unwrap();
    let found = problem.extract(&report.solutions);
    assert!(!found.is_empty());
    for c in &found {
        assert!(problem.check(c.coeffs()));
    }
}
