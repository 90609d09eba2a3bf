//! Cross-module invariants on randomized instances: relaxation monotonicity
//! of the dispatch, inclusion monotonicity of the worst case in both
//! uncertainty budgets, and consistency between the solution loop and
//! independent plan evaluation.

mod common;

use common::random_instance;
use gridplan_core::ccg::{ccg_solve, CcgConfig};
use gridplan_core::master::investment_npc;
use gridplan_core::model::{
    expand_statuses, nominal_realization, operational_weight, InvestmentPlan,
};
use gridplan_core::opf::solve_dispatch;
use gridplan_core::oracle::{enumerate_vertices, EnumerationBudget};
use gridplan_core::subproblem::solve_subproblem;

#[test]
fn dispatch_cost_never_rises_when_a_line_widens() {
    for seed in 200..=212u64 {
        let case = random_instance(seed);
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let nominal = nominal_realization(&case, &statuses, 1).unwrap();
        let base = solve_dispatch(&case, &statuses, &nominal, 1).unwrap();

        for k in 0..case.lines.len() {
            if !statuses.line_active(k, 1) {
                continue;
            }
            let mut wider = case.clone();
            wider.lines[k].capacity_mw *= 1.5;
            let relaxed = solve_dispatch(&wider, &statuses, &nominal, 1).unwrap();
            assert!(
                relaxed.cost_meur <= base.cost_meur + 1e-7 * (1.0 + base.cost_meur),
                "seed {seed}: widening line {k} raised the cost {} -> {}",
                base.cost_meur,
                relaxed.cost_meur
            );
        }
    }
}

#[test]
fn worst_case_grows_with_either_budget() {
    for seed in 220..=232u64 {
        let case = random_instance(seed);
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let base = solve_subproblem(&case, &statuses, 1).unwrap();

        if case.planning.gamma_demand < case.demands.len() {
            let mut wider = case.clone();
            wider.planning.gamma_demand += 1;
            let w = solve_subproblem(&wider, &statuses, 1).unwrap();
            assert!(
                w.c_op_meur >= base.c_op_meur - 1e-9 * (1.0 + base.c_op_meur),
                "seed {seed}: demand budget +1 shrank the worst case"
            );
        }
        let mut wider = case.clone();
        wider.planning.gamma_gen_base += 1;
        let w = solve_subproblem(&wider, &statuses, 1).unwrap();
        assert!(
            w.c_op_meur >= base.c_op_meur - 1e-9 * (1.0 + base.c_op_meur),
            "seed {seed}: generation budget +1 shrank the worst case"
        );
    }
}

#[test]
fn loop_objective_matches_independent_reevaluation() {
    for seed in 240..=248u64 {
        let case = random_instance(seed);
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        assert!(trace.converged, "seed {seed} did not converge");

        // Reprice the certified plan from its parts.
        let (line_npc, gen_npc) = investment_npc(&trace.best_plan, &case).unwrap();
        let mut total = line_npc + gen_npc;
        for w in &trace.best_worst_cases {
            total +=
                operational_weight(case.planning.discount_rate, w.realization.period).unwrap()
                    * w.c_op_meur;
        }
        assert!(
            (total - trace.z_up_meur).abs() <= 1e-9 * (1.0 + total.abs()),
            "seed {seed}: reported {} vs repriced {total}",
            trace.z_up_meur
        );
    }
}

#[test]
fn iteration_count_is_bounded_by_the_vertex_pool() {
    let budget = EnumerationBudget::default();
    for seed in 260..=270u64 {
        let case = random_instance(seed);
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        let statuses = expand_statuses(&trace.best_plan, &case).unwrap();
        let mut vertex_bound = 0usize;
        for t in 1..=case.planning.horizon_years {
            vertex_bound += enumerate_vertices(&case, &statuses, t, &budget)
                .map(|v| v.len())
                .unwrap_or(usize::MAX / 4);
        }
        assert!(
            trace.iterations.len() <= vertex_bound + 2,
            "seed {seed}: {} iterations exceed the loose vertex bound {vertex_bound}",
            trace.iterations.len()
        );
    }
}
