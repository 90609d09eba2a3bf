//! Brute-force reference solvers for desk-scale instances: enumerate the
//! uncertainty vertices of a period outright, and enumerate whole investment
//! plans for the global problem. Used to certify the decomposition, never to
//! scale.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::master::{check_budgets, investment_npc};
use crate::model::{
    expand_statuses, gamma_g_budget, operational_weight, realize_uncertainty, validate_case,
    InvestmentPlan, NetworkCase, StatusSchedule, UncertaintyRealization,
};
use crate::opf;
use crate::subproblem::WorstCase;

/// Safety caps for the enumerations.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    pub max_vertices: usize,
    pub max_plans: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_vertices: 20_000,
            max_plans: 200_000,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

fn subset_count(n: usize, max_picks: usize) -> u128 {
    (0..=max_picks.min(n)).map(|k| binomial(n, k)).sum()
}

/// Every feasible deviation vector of period `t`, materialized; the
/// all-nominal vertex comes first and the order is deterministic.
pub fn enumerate_vertices(
    case: &NetworkCase,
    statuses: &StatusSchedule,
    t: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<UncertaintyRealization>> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }

    let active_gens: Vec<usize> = (0..case.generators.len())
        .filter(|&i| statuses.gen_active(i, t))
        .collect();
    let gamma_g = gamma_g_budget(&case.planning, statuses.new_active_generators(case, t));
    let gamma_d = case.planning.gamma_demand;
    let nd = case.demands.len();

    let estimate = subset_count(active_gens.len(), gamma_g) * subset_count(nd, gamma_d);
    if estimate > budget.max_vertices as u128 {
        return Err(Error::EnumerationCapExceeded {
            what: "uncertainty vertices",
            estimate,
            cap: budget.max_vertices,
        });
    }

    let mut out = Vec::with_capacity(estimate as usize);
    let gen_masks = masks_within(active_gens.len(), gamma_g);
    let dem_masks = masks_within(nd, gamma_d);
    for &gm in &gen_masks {
        let mut z_gen = vec![false; case.generators.len()];
        for (pos, &i) in active_gens.iter().enumerate() {
            z_gen[i] = gm >> pos & 1 == 1;
        }
        for &dm in &dem_masks {
            let z_dem: Vec<bool> = (0..nd).map(|j| dm >> j & 1 == 1).collect();
            out.push(realize_uncertainty(case, statuses, &z_gen, &z_dem, t)?);
        }
    }
    Ok(out)
}

/// All bitmasks over `n` items with at most `max_picks` bits set, ascending.
fn masks_within(n: usize, max_picks: usize) -> Vec<u64> {
    assert!(n < 64, "enumeration is for desk-scale instances");
    (0u64..(1u64 << n))
        .filter(|m| (m.count_ones() as usize) <= max_picks)
        .collect()
}

/// Worst operating cost of period `t` by dispatching every vertex.
pub fn oracle_worst_cost(
    case: &NetworkCase,
    statuses: &StatusSchedule,
    t: usize,
    budget: &EnumerationBudget,
) -> Result<WorstCase> {
    let vertices = enumerate_vertices(case, statuses, t, budget)?;
    let idx = case.index();
    let mut best: Option<WorstCase> = None;
    for realization in vertices {
        let model = opf::build_opf_unchecked(case, &idx, statuses, &realization, t);
        let sol = opf::solve_opf(&model, &realization, t)?;
        let better = match &best {
            None => true,
            Some(b) => sol.cost_meur > b.c_op_meur,
        };
        if better {
            best = Some(WorstCase {
                realization,
                c_op_meur: sol.cost_meur,
                dual: sol.dual,
            });
        }
    }
    Ok(best.expect("vertex enumeration always contains the nominal point"))
}

/// Exhaustive global optimum: every candidate asset picks a build period
/// (or none), infeasible plans are pruned, and each survivor is priced by
/// its worst-case operating costs. Worst costs are cached per period and
/// active-asset set, which collapses the cost of enumerating many plans
/// that agree on early periods.
pub fn oracle_global_solve(
    case: &NetworkCase,
    budget: &EnumerationBudget,
) -> Result<(InvestmentPlan, f64)> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let ny = case.planning.horizon_years;
    let rate = case.planning.discount_rate;

    let cand_lines: Vec<usize> = case.candidate_lines().map(|(k, _)| k).collect();
    let cand_gens: Vec<usize> = case.candidate_generators().map(|(i, _)| i).collect();
    let slots = cand_lines.len() + cand_gens.len();
    let choices = (ny + 1) as u128;
    let estimate = choices.checked_pow(slots as u32).unwrap_or(u128::MAX);
    if estimate > budget.max_plans as u128 {
        return Err(Error::EnumerationCapExceeded {
            what: "candidate plans",
            estimate,
            cap: budget.max_plans,
        });
    }
    assert!(
        case.lines.len() + case.generators.len() <= 64,
        "oracle active-set cache uses 64-bit masks"
    );

    let mut worst_cache: HashMap<(usize, u64), f64> = HashMap::new();
    let mut best: Option<(InvestmentPlan, f64)> = None;

    // Mixed-radix counter over build periods: 0 = never, 1..=ny = period.
    let mut digits = vec![0usize; slots];
    loop {
        if let Some(plan) = plan_from_digits(case, &cand_lines, &cand_gens, &digits) {
            let (line_npc, gen_npc) = investment_npc(&plan, case)?;
            if check_budgets(case, line_npc, gen_npc).is_ok() {
                let statuses = expand_statuses(&plan, case)?;
                let mut total = line_npc + gen_npc;
                let mut feasible = true;
                for t in 1..=ny {
                    let key = (t, active_mask(case, &statuses, t));
                    let c_op = match worst_cache.get(&key) {
                        Some(v) => *v,
                        None => {
                            match oracle_worst_cost(case, &statuses, t, budget) {
                                Ok(w) => {
                                    worst_cache.insert(key, w.c_op_meur);
                                    w.c_op_meur
                                }
                                // A plan under which some vertex cannot be
                                // served at all is simply not a contender.
                                Err(Error::OperationalUnsolvable { status, .. })
                                    if status == "infeasible" =>
                                {
                                    feasible = false;
                                    break;
                                }
                                Err(e) => return Err(e),
                            }
                        }
                    };
                    total += operational_weight(rate, t)? * c_op;
                }
                if feasible {
                    let better = match &best {
                        None => true,
                        Some((_, incumbent)) => total < *incumbent,
                    };
                    if better {
                        best = Some((plan, total));
                    }
                }
            }
        }
        // Advance the counter (first slot is the fastest digit, so earlier
        // assets at earlier periods are visited first: ties keep the
        // lexicographically smallest plan).
        let mut pos = 0;
        loop {
            if pos == slots {
                return best.ok_or_else(|| {
                    Error::InvalidArgument("no feasible plan exists for this case".into())
                });
            }
            digits[pos] += 1;
            if digits[pos] <= ny {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Builds a plan from counter digits, checking phased ordering; `None` when
/// the ordering is violated (pruned before any dispatch work).
fn plan_from_digits(
    case: &NetworkCase,
    cand_lines: &[usize],
    cand_gens: &[usize],
    digits: &[usize],
) -> Option<InvestmentPlan> {
    let mut plan = InvestmentPlan::empty();
    for (pos, &k) in cand_lines.iter().enumerate() {
        if digits[pos] > 0 {
            plan.line_build.insert(case.lines[k].id.clone(), digits[pos]);
        }
    }
    for (pos, &i) in cand_gens.iter().enumerate() {
        if digits[cand_lines.len() + pos] > 0 {
            plan.gen_build.insert(case.generators[i].id.clone(), digits[cand_lines.len() + pos]);
        }
    }
    // Strict sequential phases: a phase may start only after the previous
    // one has started, never in the same period.
    for group in &case.generator_groups {
        for pair in group.members.windows(2) {
            let prev = plan.gen_build.get(&pair[0]).copied();
            let next = plan.gen_build.get(&pair[1]).copied();
            match (prev, next) {
                (_, None) => {}
                (None, Some(_)) => return None,
                (Some(a), Some(b)) if b <= a => return None,
                _ => {}
            }
        }
    }
    Some(plan)
}

fn active_mask(case: &NetworkCase, statuses: &StatusSchedule, t: usize) -> u64 {
    let mut mask = 0u64;
    let mut bit = 0;
    for k in 0..case.lines.len() {
        if statuses.line_active(k, t) {
            mask |= 1 << bit;
        }
        bit += 1;
    }
    for i in 0..case.generators.len() {
        if statuses.gen_active(i, t) {
            mask |= 1 << bit;
        }
        bit += 1;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_fixtures::two_bus_case;
    use crate::model::{Generator, GeneratorCategory, InvestmentPlan};
    use crate::subproblem::solve_subproblem;

    #[test]
    fn vertex_count_two_gens_one_demand() {
        let mut case = two_bus_case(1);
        case.generators.push(Generator {
            id: "g2".into(),
            bus: "b2".into(),
            op_cost_eur_per_mwh: 20.0,
            invest_cost_meur: None,
            cap_nominal_mw: 50.0,
            cap_deviation_mw: 25.0,
            category: GeneratorCategory::Fixed,
        });
        case.planning.gamma_gen_base = 1;
        case.planning.gamma_gen_steps = vec![];
        case.planning.gamma_demand = 1;
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let vertices =
            enumerate_vertices(&case, &statuses, 1, &EnumerationBudget::default()).unwrap();
        // z_gen in {00, 10, 01} x z_dem in {0, 1}.
        assert_eq!(vertices.len(), 6);
        assert!(vertices[0].z_gen.iter().all(|z| !z));
        assert!(vertices[0].z_dem.iter().all(|z| !z));
    }

    #[test]
    fn zero_budgets_leave_only_the_nominal_vertex() {
        let mut case = two_bus_case(1);
        case.planning.gamma_demand = 0;
        case.planning.gamma_gen_base = 0;
        case.planning.gamma_gen_steps = vec![];
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let vertices =
            enumerate_vertices(&case, &statuses, 1, &EnumerationBudget::default()).unwrap();
        assert_eq!(vertices.len(), 1);
    }

    #[test]
    fn inactive_generator_halves_the_vertex_count() {
        let mut case = two_bus_case(1);
        case.generators.push(Generator {
            id: "cand".into(),
            bus: "b2".into(),
            op_cost_eur_per_mwh: 17.0,
            invest_cost_meur: Some(40.0),
            cap_nominal_mw: 40.0,
            cap_deviation_mw: 40.0,
            category: GeneratorCategory::CandidateIndependent,
        });
        case.planning.gamma_gen_base = 2;
        case.planning.gamma_gen_steps = vec![];
        let off = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let mut plan = InvestmentPlan::empty();
        plan.gen_build.insert("cand".into(), 1);
        let on = expand_statuses(&plan, &case).unwrap();
        let budget = EnumerationBudget::default();
        let n_off = enumerate_vertices(&case, &off, 1, &budget).unwrap().len();
        let n_on = enumerate_vertices(&case, &on, 1, &budget).unwrap().len();
        assert_eq!(n_off * 2, n_on);
    }

    #[test]
    fn cap_exceeded_reports_estimate() {
        let case = two_bus_case(1);
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let tiny = EnumerationBudget { max_vertices: 1, max_plans: 1 };
        let err = enumerate_vertices(&case, &statuses, 1, &tiny).unwrap_err();
        assert!(matches!(err, Error::EnumerationCapExceeded { .. }));
    }

    #[test]
    fn oracle_matches_subproblem_on_the_fixture() {
        let case = two_bus_case(1);
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let oracle = oracle_worst_cost(&case, &statuses, 1, &EnumerationBudget::default()).unwrap();
        let dual = solve_subproblem(&case, &statuses, 1).unwrap();
        assert!(
            (oracle.c_op_meur - dual.c_op_meur).abs() <= 1e-6 * (1.0 + oracle.c_op_meur.abs()),
            "oracle {} vs subproblem {}",
            oracle.c_op_meur,
            dual.c_op_meur
        );

        // The worst case dominates the nominal point it ranges over.
        let nominal = crate::model::nominal_realization(&case, &statuses, 1).unwrap();
        let base = crate::opf::solve_dispatch(&case, &statuses, &nominal, 1).unwrap();
        assert!(oracle.c_op_meur >= base.cost_meur - 1e-9);
    }

    #[test]
    fn global_solve_one_candidate_line_two_periods() {
        // Building the candidate in period 1 dominates: it doubles transfer
        // capacity toward the only demand.
        let mut case = two_bus_case(2);
        case.lines[0].capacity_mw = 50.0;
        case.demands[0].load_nominal_mw = 80.0;
        case.planning.discount_rate = 0.0;
        let (plan, objective) =
            oracle_global_solve(&case, &EnumerationBudget::default()).unwrap();
        // Three options for the single line (never, t=1, t=2) plus nothing
        // else to decide; shedding is so expensive the build must happen
        // immediately.
        assert_eq!(plan.line_build.get("c1"), Some(&1));
        assert!(objective > 0.0);
    }

    #[test]
    fn global_solve_no_candidates_prices_the_fixed_system() {
        let mut case = two_bus_case(1);
        case.lines.remove(1);
        let (plan, objective) =
            oracle_global_solve(&case, &EnumerationBudget::default()).unwrap();
        assert!(plan.is_empty());
        let statuses = expand_statuses(&plan, &case).unwrap();
        let worst =
            oracle_worst_cost(&case, &statuses, 1, &EnumerationBudget::default()).unwrap();
        let want = operational_weight(case.planning.discount_rate, 1).unwrap() * worst.c_op_meur;
        assert!((objective - want).abs() < 1e-9);
    }
}
