//! Cross-checks the revised simplex engine against the independent
//! dense-tableau oracle on random bounded LPs, and exercises the
//! degenerate cases that historically make simplex implementations
//! cycle.

mod common;

use common::naive_simplex::{naive_simplex, NaiveOutcome};
use common::{degenerate_lps, random_bounded_lp};
use mpplan::solver::{solve_lp, SolveConfig};
use mpplan::SolveStatus;

#[test]
fn random_lps_match_tableau_oracle() {
    let cfg = SolveConfig::default();
    let mut optimal = 0;
    let mut infeasible = 0;
    for seed in 0..120u64 {
        let model = random_bounded_lp(seed, 30, 20, seed < 80);
        let mine = solve_lp(&model, &cfg).unwrap();
        let oracle = naive_simplex(&model);
        match (&mine.status, &oracle) {
            (SolveStatus::Optimal, NaiveOutcome::Optimal { objective, .. }) => {
                optimal += 1;
                let got = mine.objective.unwrap();
                assert!(
                    (got - objective).abs() <= 1e-6 * objective.abs().max(1.0),
                    "seed {seed}: engine {got} vs oracle {objective}"
                );
                // The engine's own solution must satisfy the model.
                let viol = model.max_violation(mine.solution.as_ref().unwrap());
                assert!(viol <= 1e-6, "seed {seed}: violation {viol}");
            }
            (SolveStatus::Infeasible, NaiveOutcome::Infeasible) => {
                infeasible += 1;
            }
            other => panic!("seed {seed}: disagreement {other:?}"),
        }
    }
    // The battery must actually exercise both outcomes.
    assert!(optimal >= 50, "only {optimal} optimal instances");
    assert!(infeasible >= 5, "only {infeasible} infeasible instances");
}

#[test]
fn degenerate_cases_terminate_and_match() {
    let cfg = SolveConfig::default();
    for model in degenerate_lps() {
        let mine = solve_lp(&model, &cfg).unwrap();
        let oracle = naive_simplex(&model);
        match (&mine.status, &oracle) {
            (SolveStatus::Optimal, NaiveOutcome::Optimal { objective, .. }) => {
                let got = mine.objective.unwrap();
                assert!(
                    (got - objective).abs() <= 1e-6 * objective.abs().max(1.0),
                    "{}: engine {got} vs oracle {objective}",
                    model.name
                );
            }
            (SolveStatus::Unbounded, NaiveOutcome::Unbounded) => {}
            (SolveStatus::Infeasible, NaiveOutcome::Infeasible) => {}
            other => panic!("{}: disagreement {other:?}", model.name),
        }
    }
}

#[test]
fn free_variable_lps_match_oracle() {
    use mpplan::linmodel::{LinearModel, Sense, VarKind};
    // Free vars force the split substitution in the oracle and the
    // FreeZero state in the engine. Bounded case first.
    let mut m = LinearModel::new("free_bounded");
    let x = m
        .add_var("x", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
        .unwrap();
    let y = m
        .add_var("y", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
        .unwrap();
    m.add_constraint("c1", [(x, 1.0), (y, 1.0)], Sense::Ge, 2.0)
        .unwrap();
    m.add_constraint("c2", [(x, 1.0), (y, -1.0)], Sense::Le, 1.0)
        .unwrap();
    m.set_objective([(x, 1.0), (y, 2.0)]).unwrap();
    // min x + 2y over x+y >= 2, x-y <= 1: pushing along -(1,1)/2 and
    // the two rows pin the optimum at (1.5, 0.5).
    let mine = solve_lp(&m, &SolveConfig::default()).unwrap();
    let oracle = naive_simplex(&m);
    match (mine.status, oracle) {
        (SolveStatus::Optimal, NaiveOutcome::Optimal { objective, .. }) => {
            assert!((mine.objective.unwrap() - objective).abs() < 1e-7);
            assert!((mine.objective.unwrap() - 2.5).abs() < 1e-7);
        }
        other => panic!("disagreement: {other:?}"),
    }

    // And an unbounded ray: both sides must agree on Unbounded.
    let mut u = LinearModel::new("free_unbounded");
    let x = u
        .add_var("x", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
        .unwrap();
    let y = u
        .add_var("y", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
        .unwrap();
    u.add_constraint("c1", [(x, 1.0), (y, 1.0)], Sense::Ge, 2.0)
        .unwrap();
    u.set_objective([(x, 1.0), (y, -1.0)]).unwrap();
    let mine = solve_lp(&u, &SolveConfig::default()).unwrap();
    assert_eq!(mine.status, SolveStatus::Unbounded);
    assert_eq!(naive_simplex(&u), NaiveOutcome::Unbounded);
}
