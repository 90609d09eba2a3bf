//! The alternating solution loop: solve the investment problem over the
//! realizations collected so far (a lower bound), then find each period's
//! worst realization for the returned plan (whose total cost is an upper
//! bound), add those realizations to the pool and repeat until the bounds
//! meet. The pool only grows, so the lower bound never decreases, and the
//! finite vertex set of the uncertainty polytope makes the loop finite.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::master::{build_master, investment_npc, solve_master_with, ScenarioPool};
use crate::model::{
    operational_weight, validate_case, InvestmentPlan, NetworkCase, StatusSchedule,
};
use crate::subproblem::{self, WorstCase};

#[derive(Clone, Copy, Debug)]
pub struct CcgConfig {
    /// Relative gap at which the bounds are declared met.
    pub epsilon: f64,
    /// Safeguard cap on master/subproblem rounds.
    pub max_iterations: usize,
    /// Emit one progress line per iteration on standard output.
    pub verbose: bool,
}

impl Default for CcgConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_iterations: 50,
            verbose: false,
        }
    }
}

/// One master/subproblem round.
#[derive(Clone, Debug)]
pub struct CcgIteration {
    pub iteration: usize,
    pub plan: InvestmentPlan,
    pub z_lo_meur: f64,
    pub z_up_meur: f64,
    /// Worst annual operating cost per period for this iteration's plan.
    pub c_op_meur: Vec<f64>,
    pub wall_seconds: f64,
}

/// Full record of a solve: per-iteration bounds, the incumbent plan and the
/// realizations that certified it.
#[derive(Clone, Debug)]
pub struct CcgTrace {
    pub iterations: Vec<CcgIteration>,
    pub converged: bool,
    /// Plan achieving the best (smallest) upper bound.
    pub best_plan: InvestmentPlan,
    pub best_statuses: StatusSchedule,
    /// Worst cases certifying the best plan, one per period.
    pub best_worst_cases: Vec<WorstCase>,
    pub z_lo_meur: f64,
    pub z_up_meur: f64,
    pub gap: f64,
    /// Every realization round appended during the run.
    pub pool: ScenarioPool,
}

/// Relative bound gap with a guarded denominator. Upper crossing below the
/// lower bound beyond solver noise means a bug somewhere, and is an error.
pub fn relative_gap(z_up: f64, z_lo: f64) -> Result<f64> {
    if z_up < z_lo - 1e-6 * z_up.abs().max(1.0) {
        return Err(Error::BoundsCrossed { z_up, z_lo });
    }
    Ok(((z_up - z_lo) / z_up.abs().max(1.0)).max(0.0))
}

/// Runs the alternating loop on a validated case.
pub fn ccg_solve(case: &NetworkCase, config: &CcgConfig) -> Result<CcgTrace> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let idx = case.index();
    let ny = case.planning.horizon_years;
    let rate = case.planning.discount_rate;

    let mut pool = ScenarioPool::new();
    let mut iterations: Vec<CcgIteration> = Vec::new();
    let mut best: Option<(f64, InvestmentPlan, StatusSchedule, Vec<WorstCase>)> = None;
    let mut converged = false;
    let mut z_lo = f64::NEG_INFINITY;

    for iteration in 1..=config.max_iterations {
        let started = Instant::now();

        // The best plan found so far caps the master optimum, which prunes
        // the investment search hard once a good incumbent exists.
        let cutoff = best.as_ref().map(|(z_up, ..)| *z_up);
        let master = build_master(case, &pool)?;
        let msol = solve_master_with(case, &master, cutoff)?;
        debug_assert!(
            msol.lower_bound_meur >= z_lo - 1e-9 * z_lo.abs().max(1.0),
            "lower bound regressed: {} after {z_lo}",
            msol.lower_bound_meur
        );
        z_lo = msol.lower_bound_meur;

        // Worst case per period for the fresh plan; periods are independent.
        let statuses = &msol.statuses;
        let worst: Vec<WorstCase> = std::thread::scope(|scope| {
            let handles: Vec<_> = (1..=ny)
                .map(|t| {
                    let idx = &idx;
                    scope.spawn(move || subproblem::solve_unchecked(case, idx, statuses, t))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("subproblem thread panicked"))
                .collect::<Result<Vec<_>>>()
        })?;

        let (line_npc, gen_npc) = investment_npc(&msol.plan, case)?;
        let mut z_up = line_npc + gen_npc;
        for w in &worst {
            z_up += operational_weight(rate, w.realization.period)? * w.c_op_meur;
        }

        let improved = match &best {
            None => true,
            Some((best_up, ..)) => z_up < *best_up,
        };
        if improved {
            best = Some((z_up, msol.plan.clone(), msol.statuses.clone(), worst.clone()));
        }
        let best_up = best.as_ref().map(|(v, ..)| *v).unwrap();

        iterations.push(CcgIteration {
            iteration,
            plan: msol.plan.clone(),
            z_lo_meur: z_lo,
            z_up_meur: z_up,
            c_op_meur: worst.iter().map(|w| w.c_op_meur).collect(),
            wall_seconds: started.elapsed().as_secs_f64(),
        });

        let gap = relative_gap(best_up, z_lo)?;
        if config.verbose {
            println!(
                "iter {iteration:>3}  z_lo {z_lo:>16.6}  z_up {best_up:>16.6}  gap {gap:.3e}"
            );
        }

        if gap <= config.epsilon {
            converged = true;
            break;
        }

        // Only realizations the master underestimates carry information; if
        // every period were already covered the bounds would have met above.
        let round: Vec<_> = worst
            .into_iter()
            .filter(|w| {
                let t = w.realization.period;
                w.c_op_meur > msol.gamma_meur[t - 1] + 1e-9 * (1.0 + w.c_op_meur.abs())
            })
            .map(|w| w.realization)
            .collect();
        if !round.is_empty() {
            pool.push_round(round);
        }
    }

    let (z_up, best_plan, best_statuses, best_worst_cases) =
        best.expect("at least one iteration ran");
    let gap = relative_gap(z_up, z_lo)?;
    Ok(CcgTrace {
        iterations,
        converged,
        best_plan,
        best_statuses,
        best_worst_cases,
        z_lo_meur: z_lo,
        z_up_meur: z_up,
        gap,
        pool,
    })
}

/// Discounted total for a plan given per-period worst operating costs;
/// shared by reporting.
pub fn net_present_cost(
    case: &NetworkCase,
    plan: &InvestmentPlan,
    c_op_meur: &[f64],
) -> Result<f64> {
    let (line_npc, gen_npc) = investment_npc(plan, case)?;
    let rate = case.planning.discount_rate;
    let mut total = line_npc + gen_npc;
    for (pos, c) in c_op_meur.iter().enumerate() {
        total += operational_weight(rate, pos + 1)? * c;
    }
    Ok(total)
}
