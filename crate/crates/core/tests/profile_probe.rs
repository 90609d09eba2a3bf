//! Manual timing probe, not part of the suite.

use std::time::Instant;

use gridplan_core::io::load_case;
use gridplan_core::model::{expand_statuses, InvestmentPlan};
use gridplan_core::subproblem::solve_subproblem;

#[test]
#[ignore]
fn time_lite_subproblems() {
    let case = load_case(concat!(env!("CARGO_MANIFEST_DIR"), "/../../cases/ieee118-lite.json")).unwrap();
    let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
    for t in 1..=case.planning.horizon_years {
        let started = Instant::now();
        let worst = solve_subproblem(&case, &statuses, t).unwrap();
        println!(
            "t={t} worst {:.3} M EUR in {:.2}s",
            worst.c_op_meur,
            started.elapsed().as_secs_f64()
        );
    }
}
