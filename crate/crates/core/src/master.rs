//! First-stage investment problem: choose what to build and when, subject to
//! discounted budgets, build-once rules, phased construction ordering and
//! forced dismantling, against every worst-case realization collected so far.
//!
//! Each accumulated realization contributes a full dispatch block per period
//! whose cost is tied to the per-period recourse variable `gamma` through a
//! cut, so the master is always a relaxation of the true two-stage problem
//! and its optimum a lower bound.
//!
//! Asset statuses appear inside dispatch blocks as variables. The flow
//! definition of a candidate line is the one nonlinear spot (status times
//! angle difference); it is enforced disjunctively with the tightest valid
//! constant `M = 2*pi*b`, the susceptance times the largest possible angle
//! spread.

use std::f64::consts::PI;

use gridplan_mp::{active_backend, MathProgram, RowSense, Sense, SolveStatus, VarId};

use crate::error::{Error, Result};
use crate::model::{
    annual_cost_meur_per_mw, discount_factor, expand_statuses, operational_weight, validate_case,
    InvestmentPlan, NetworkCase, StatusSchedule, UncertaintyRealization,
};

/// Worst-case realizations accumulated across iterations. `rounds[l]` holds
/// what iteration `l + 1` contributed — usually one realization per period,
/// but a round may cover only the periods whose realization was new.
/// Append-only; every realization names its own period.
#[derive(Clone, Debug, Default)]
pub struct ScenarioPool {
    rounds: Vec<Vec<UncertaintyRealization>>,
}

impl ScenarioPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_round(&mut self, round: Vec<UncertaintyRealization>) {
        self.rounds.push(round);
    }

    pub fn rounds(&self) -> &[Vec<UncertaintyRealization>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}

/// Master optimum: the plan, its statuses, the per-period recourse values
/// and the objective, which lower-bounds the full problem.
#[derive(Clone, Debug)]
pub struct MasterSolution {
    pub plan: InvestmentPlan,
    pub statuses: StatusSchedule,
    /// Annual worst-case operating cost estimate per period (M EUR).
    pub gamma_meur: Vec<f64>,
    /// Objective value: net present cost in M EUR.
    pub lower_bound_meur: f64,
}

pub struct MasterModel {
    pub program: MathProgram,
    line_build: Vec<Vec<VarId>>,
    gen_build: Vec<Vec<VarId>>,
    line_status: Vec<Vec<Option<VarId>>>,
    gen_status: Vec<Vec<Option<VarId>>>,
    gamma: Vec<VarId>,
    candidate_lines: Vec<usize>,
    candidate_gens: Vec<usize>,
}

/// Builds the investment problem over the given scenario pool.
pub fn build_master(case: &NetworkCase, pool: &ScenarioPool) -> Result<MasterModel> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    for (l, round) in pool.rounds().iter().enumerate() {
        for r in round {
            if r.period < 1 || r.period > case.planning.horizon_years {
                return Err(Error::InvalidArgument(format!(
                    "pool round {l} has a realization for period {}, horizon is {}",
                    r.period,
                    case.planning.horizon_years
                )));
            }
        }
    }
    Ok(build_master_unchecked(case, pool))
}

fn build_master_unchecked(case: &NetworkCase, pool: &ScenarioPool) -> MasterModel {
    let idx = case.index();
    let ny = case.planning.horizon_years;
    let rate = case.planning.discount_rate;
    let sigma = case.planning.sigma_hours;
    let mut p = MathProgram::new(format!("master-{}-v{}", case.name, pool.len() + 1), Sense::Minimize);

    let candidate_lines: Vec<usize> = case.candidate_lines().map(|(k, _)| k).collect();
    let candidate_gens: Vec<usize> = case.candidate_generators().map(|(i, _)| i).collect();

    // Build decisions x[k][t], y[i][t] and status variables for candidates.
    // Statuses are continuous: the linking equality to a sum of binaries
    // forces integrality.
    let mut line_build = vec![Vec::new(); case.lines.len()];
    for &k in &candidate_lines {
        let line = &case.lines[k];
        line_build[k] = (1..=ny)
            .map(|t| p.add_binary(format!("x_{}_{t}", line.id)))
            .collect();
    }
    let mut gen_build = vec![Vec::new(); case.generators.len()];
    for &i in &candidate_gens {
        let gen = &case.generators[i];
        gen_build[i] = (1..=ny)
            .map(|t| p.add_binary(format!("y_{}_{t}", gen.id)))
            .collect();
    }

    // Baseline statuses for non-candidates come from the empty plan:
    // existing assets on, dismantled generators forced per their schedule.
    let fixed_statuses =
        expand_statuses(&InvestmentPlan::empty(), case).expect("empty plan always expands");

    let mut line_status: Vec<Vec<Option<VarId>>> = vec![vec![None; ny]; case.lines.len()];
    for &k in &candidate_lines {
        let line = &case.lines[k];
        for t in 1..=ny {
            let v = p.add_var(format!("xs_{}_{t}", line.id), 0.0, 1.0);
            let mut terms = vec![(v, 1.0)];
            for b in line_build[k].iter().take(t) {
                terms.push((*b, -1.0));
            }
            p.add_row(format!("xlink_{}_{t}", line.id), RowSense::Eq, 0.0, &terms);
            line_status[k][t - 1] = Some(v);
        }
    }
    let mut gen_status: Vec<Vec<Option<VarId>>> = vec![vec![None; ny]; case.generators.len()];
    for &i in &candidate_gens {
        let gen = &case.generators[i];
        for t in 1..=ny {
            let v = p.add_var(format!("ys_{}_{t}", gen.id), 0.0, 1.0);
            let mut terms = vec![(v, 1.0)];
            for b in gen_build[i].iter().take(t) {
                terms.push((*b, -1.0));
            }
            p.add_row(format!("ylink_{}_{t}", gen.id), RowSense::Eq, 0.0, &terms);
            gen_status[i][t - 1] = Some(v);
        }
    }

    // Build at most once.
    for &k in &candidate_lines {
        let terms: Vec<_> = line_build[k].iter().map(|v| (*v, 1.0)).collect();
        p.add_row(format!("once_x_{}", case.lines[k].id), RowSense::Le, 1.0, &terms);
    }
    for &i in &candidate_gens {
        let terms: Vec<_> = gen_build[i].iter().map(|v| (*v, 1.0)).collect();
        p.add_row(format!("once_y_{}", case.generators[i].id), RowSense::Le, 1.0, &terms);
    }

    // Discounted investment budgets.
    let mut line_budget_terms = Vec::new();
    for &k in &candidate_lines {
        let cost = case.lines[k].invest_cost_meur.unwrap_or(0.0);
        for (t, v) in line_build[k].iter().enumerate() {
            let disc = discount_factor(rate, t + 1).expect("t >= 1");
            line_budget_terms.push((*v, disc * cost));
        }
    }
    if !line_budget_terms.is_empty() {
        p.add_row("budget_lines", RowSense::Le, case.planning.line_budget_meur, &line_budget_terms);
    }
    let mut gen_budget_terms = Vec::new();
    for &i in &candidate_gens {
        let cost = case.generators[i].invest_cost_meur.unwrap_or(0.0);
        for (t, v) in gen_build[i].iter().enumerate() {
            let disc = discount_factor(rate, t + 1).expect("t >= 1");
            gen_budget_terms.push((*v, disc * cost));
        }
    }
    if !gen_budget_terms.is_empty() {
        p.add_row("budget_gens", RowSense::Le, case.planning.gen_budget_meur, &gen_budget_terms);
    }

    // Phased groups: a later phase needs the previous phase already on, and
    // two consecutive phases cannot start in the same period.
    for group in &case.generator_groups {
        for pair in group.members.windows(2) {
            let prev = case.generators.iter().position(|g| g.id == pair[0]).unwrap();
            let next = case.generators.iter().position(|g| g.id == pair[1]).unwrap();
            for t in 1..=ny {
                p.add_row(
                    format!("phase_on_{}_{t}", pair[1]),
                    RowSense::Le,
                    0.0,
                    &[(gen_build[next][t - 1], 1.0), (gen_status[prev][t - 1].unwrap(), -1.0)],
                );
                p.add_row(
                    format!("phase_gap_{}_{t}", pair[1]),
                    RowSense::Le,
                    1.0,
                    &[(gen_build[next][t - 1], 1.0), (gen_build[prev][t - 1], 1.0)],
                );
            }
        }
    }

    // Per-period recourse cost (annual, M EUR) and its objective weight.
    let gamma: Vec<VarId> = (1..=ny)
        .map(|t| {
            let v = p.add_var(format!("gamma_{t}"), 0.0, f64::INFINITY);
            p.set_objective_coeff(v, operational_weight(rate, t).expect("t >= 1"));
            v
        })
        .collect();

    // Investment objective terms.
    for &k in &candidate_lines {
        let cost = case.lines[k].invest_cost_meur.unwrap_or(0.0);
        for (t, v) in line_build[k].iter().enumerate() {
            p.set_objective_coeff(*v, discount_factor(rate, t + 1).expect("t >= 1") * cost);
        }
    }
    for &i in &candidate_gens {
        let cost = case.generators[i].invest_cost_meur.unwrap_or(0.0);
        for (t, v) in gen_build[i].iter().enumerate() {
            p.set_objective_coeff(*v, discount_factor(rate, t + 1).expect("t >= 1") * cost);
        }
    }

    // One dispatch block per accumulated realization, tied to its period's
    // gamma by a cut. A realization that already has a block for the same
    // period would only repeat the same rows, so duplicates are skipped.
    let mut seen: std::collections::HashSet<(usize, Vec<bool>, Vec<bool>)> =
        std::collections::HashSet::new();
    for (l, round) in pool.rounds().iter().enumerate() {
        for realization in round {
            let t = realization.period;
            if !seen.insert((t, realization.z_gen.clone(), realization.z_dem.clone())) {
                continue;
            }
            let tag = format!("t{t}_s{l}");

            let gen_vars: Vec<Option<VarId>> = case
                .generators
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let candidate = gen_status[i][t - 1].is_some();
                    let fixed_on = fixed_statuses.gen_active(i, t);
                    if !candidate && !fixed_on {
                        return None; // off for every plan
                    }
                    let v = p.add_var(format!("g_{}_{tag}", g.id), 0.0, f64::INFINITY);
                    if candidate {
                        // g <= u * status
                        p.add_row(
                            format!("gcap_{}_{tag}", g.id),
                            RowSense::Le,
                            0.0,
                            &[(v, 1.0), (gen_status[i][t - 1].unwrap(), -realization.gen_capacity_mw[i])],
                        );
                    } else {
                        p.add_row(
                            format!("gcap_{}_{tag}", g.id),
                            RowSense::Le,
                            realization.gen_capacity_mw[i],
                            &[(v, 1.0)],
                        );
                    }
                    Some(v)
                })
                .collect();

            let shed_vars: Vec<VarId> = case
                .demands
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let cap = d.shed_fraction[t - 1] * realization.demand_mw[j];
                    p.add_var(format!("r_{}_{tag}", d.id), 0.0, cap)
                })
                .collect();

            let angle_vars: Vec<VarId> = case
                .buses
                .iter()
                .enumerate()
                .map(|(n, b)| {
                    if n == idx.slack {
                        p.add_var(format!("th_{}_{tag}", b.id), 0.0, 0.0)
                    } else {
                        p.add_var(format!("th_{}_{tag}", b.id), -PI, PI)
                    }
                })
                .collect();

            let flow_vars: Vec<VarId> = case
                .lines
                .iter()
                .map(|l_| p.add_var(format!("f_{}_{tag}", l_.id), -l_.capacity_mw, l_.capacity_mw))
                .collect();

            for (k, line) in case.lines.iter().enumerate() {
                let (from, to) = idx.line_ends[k];
                let b = line.susceptance_s;
                match line_status[k][t - 1] {
                    None => {
                        // Existing line: exact flow definition.
                        p.add_row(
                            format!("fdef_{}_{tag}", line.id),
                            RowSense::Eq,
                            0.0,
                            &[(flow_vars[k], 1.0), (angle_vars[from], -b), (angle_vars[to], b)],
                        );
                    }
                    Some(status) => {
                        let m = 2.0 * PI * b;
                        p.add_row(
                            format!("fdef_up_{}_{tag}", line.id),
                            RowSense::Le,
                            m,
                            &[
                                (flow_vars[k], 1.0),
                                (angle_vars[from], -b),
                                (angle_vars[to], b),
                                (status, m),
                            ],
                        );
                        p.add_row(
                            format!("fdef_dn_{}_{tag}", line.id),
                            RowSense::Le,
                            m,
                            &[
                                (flow_vars[k], -1.0),
                                (angle_vars[from], b),
                                (angle_vars[to], -b),
                                (status, m),
                            ],
                        );
                        p.add_row(
                            format!("fcap_up_{}_{tag}", line.id),
                            RowSense::Le,
                            0.0,
                            &[(flow_vars[k], 1.0), (status, -line.capacity_mw)],
                        );
                        p.add_row(
                            format!("fcap_dn_{}_{tag}", line.id),
                            RowSense::Le,
                            0.0,
                            &[(flow_vars[k], -1.0), (status, -line.capacity_mw)],
                        );
                    }
                }
            }

            for (n, bus) in case.buses.iter().enumerate() {
                let mut terms: Vec<(VarId, f64)> = Vec::new();
                let mut load = 0.0;
                for &i in &idx.gens_at_bus[n] {
                    if let Some(v) = gen_vars[i] {
                        terms.push((v, 1.0));
                    }
                }
                for (k, ends) in idx.line_ends.iter().enumerate() {
                    if ends.0 == n {
                        terms.push((flow_vars[k], -1.0));
                    }
                    if ends.1 == n {
                        terms.push((flow_vars[k], 1.0));
                    }
                }
                for &j in &idx.demands_at_bus[n] {
                    terms.push((shed_vars[j], 1.0));
                    load += realization.demand_mw[j];
                }
                p.add_row(format!("bal_{}_{tag}", bus.id), RowSense::Eq, load, &terms);
            }

            // gamma_t >= annual cost of serving this realization.
            let mut cut_terms: Vec<(VarId, f64)> = vec![(gamma[t - 1], 1.0)];
            for (i, g) in case.generators.iter().enumerate() {
                if let Some(v) = gen_vars[i] {
                    cut_terms.push((v, -annual_cost_meur_per_mw(sigma, g.op_cost_eur_per_mwh)));
                }
            }
            for (j, d) in case.demands.iter().enumerate() {
                cut_terms.push((shed_vars[j], -annual_cost_meur_per_mw(sigma, d.shed_cost_eur_per_mwh)));
            }
            p.add_row(format!("cut_{tag}"), RowSense::Ge, 0.0, &cut_terms);
        }
    }

    MasterModel {
        program: p,
        line_build,
        gen_build,
        line_status,
        gen_status,
        gamma,
        candidate_lines,
        candidate_gens,
    }
}

/// Solves the master problem and extracts the plan with its statuses.
pub fn solve_master(case: &NetworkCase, model: &MasterModel) -> Result<MasterSolution> {
    solve_master_with(case, model, None)
}

/// Like [`solve_master`], with a known valid upper bound on the optimum
/// (e.g. the cost of any feasible plan) used to prune the search early.
pub fn solve_master_with(
    case: &NetworkCase,
    model: &MasterModel,
    cutoff_meur: Option<f64>,
) -> Result<MasterSolution> {
    let out = match cutoff_meur {
        None => active_backend().solve_mip(&model.program)?,
        Some(c) => active_backend().solve_mip_bounded(&model.program, c)?,
    };
    match out.status {
        SolveStatus::Optimal => {}
        status => {
            return Err(Error::MasterUnsolvable {
                status: format!("{status:?}").to_lowercase(),
                detail: match status {
                    SolveStatus::Infeasible => {
                        "no plan satisfies the budgets and construction rules".into()
                    }
                    _ => "investment problem did not reach a global optimum".into(),
                },
            })
        }
    }
    let x = out.primal_values();

    let mut plan = InvestmentPlan::empty();
    for &k in &model.candidate_lines {
        for (t, v) in model.line_build[k].iter().enumerate() {
            if x[v.index()] > 0.5 {
                plan.line_build.insert(case.lines[k].id.clone(), t + 1);
            }
        }
    }
    for &i in &model.candidate_gens {
        for (t, v) in model.gen_build[i].iter().enumerate() {
            if x[v.index()] > 0.5 {
                plan.gen_build.insert(case.generators[i].id.clone(), t + 1);
            }
        }
    }

    let statuses = expand_statuses(&plan, case)?;

    // The statuses implied by the plan must agree with the status variables
    // the solver itself used.
    for t in 1..=case.planning.horizon_years {
        for &k in &model.candidate_lines {
            if let Some(v) = model.line_status[k][t - 1] {
                let solver = x[v.index()];
                let expanded = statuses.line_active(k, t) as u8 as f64;
                debug_assert!(
                    (solver - expanded).abs() < 1e-6,
                    "status drift on line {k} period {t}: {solver} vs {expanded}"
                );
            }
        }
        for &i in &model.candidate_gens {
            if let Some(v) = model.gen_status[i][t - 1] {
                let solver = x[v.index()];
                let expanded = statuses.gen_active(i, t) as u8 as f64;
                debug_assert!(
                    (solver - expanded).abs() < 1e-6,
                    "status drift on generator {i} period {t}: {solver} vs {expanded}"
                );
            }
        }
    }

    let gamma_meur: Vec<f64> = model.gamma.iter().map(|v| x[v.index()]).collect();
    Ok(MasterSolution {
        plan,
        statuses,
        gamma_meur,
        lower_bound_meur: out.objective_value(),
    })
}

/// Discounted investment cost of a plan, split into lines and generators
/// (M EUR). Used for budget checks and reporting.
pub fn investment_npc(plan: &InvestmentPlan, case: &NetworkCase) -> Result<(f64, f64)> {
    let rate = case.planning.discount_rate;
    let mut line_npc = 0.0;
    for (id, &t) in &plan.line_build {
        let line = case
            .lines
            .iter()
            .find(|l| &l.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan builds unknown line `{id}`")))?;
        line_npc += discount_factor(rate, t)? * line.invest_cost_meur.unwrap_or(0.0);
    }
    let mut gen_npc = 0.0;
    for (id, &t) in &plan.gen_build {
        let gen = case
            .generators
            .iter()
            .find(|g| &g.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan builds unknown generator `{id}`")))?;
        gen_npc += discount_factor(rate, t)? * gen.invest_cost_meur.unwrap_or(0.0);
    }
    Ok((line_npc, gen_npc))
}

/// Budget feasibility of already-discounted investment totals.
pub fn check_budgets(case: &NetworkCase, line_npc: f64, gen_npc: f64) -> Result<()> {
    let tol = 1e-9;
    if line_npc > case.planning.line_budget_meur * (1.0 + tol) + tol {
        return Err(Error::BudgetExceeded {
            which: "line",
            spent: line_npc,
            budget: case.planning.line_budget_meur,
        });
    }
    if gen_npc > case.planning.gen_budget_meur * (1.0 + tol) + tol {
        return Err(Error::BudgetExceeded {
            which: "generation",
            spent: gen_npc,
            budget: case.planning.gen_budget_meur,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_fixtures::two_bus_case;
    use crate::model::{nominal_realization, Generator, GeneratorCategory, GeneratorGroup};

    #[test]
    fn empty_pool_zero_demand_builds_nothing() {
        let mut case = two_bus_case(2);
        case.demands[0].load_nominal_mw = 0.0;
        case.demands[0].load_deviation_mw = 0.0;
        let model = build_master(&case, &ScenarioPool::new()).unwrap();
        let sol = solve_master(&case, &model).unwrap();
        assert!(sol.plan.is_empty());
        assert_eq!(sol.lower_bound_meur, 0.0);
        assert!(sol.gamma_meur.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn line_built_when_it_avoids_shedding() {
        // Demand sits behind a candidate line only; one nominal scenario in
        // the pool forces the build.
        let mut case = two_bus_case(1);
        case.lines[0].status = crate::model::LineStatus::Candidate;
        case.lines[0].invest_cost_meur = Some(10.0);
        case.lines.remove(1);
        case.planning.discount_rate = 0.0;

        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let nominal = nominal_realization(&case, &statuses, 1).unwrap();
        let mut pool = ScenarioPool::new();
        pool.push_round(vec![nominal]);

        let model = build_master(&case, &pool).unwrap();
        let sol = solve_master(&case, &model).unwrap();
        assert_eq!(sol.plan.line_build.get("e1"), Some(&1));
        // Shedding 80 MW at 1000 EUR/MWh dwarfs 10 M EUR; serving it costs
        // 8760 * 10 * 80 EUR per year.
        let served = 8760.0 * 10.0 * 80.0 / 1e6;
        assert!((sol.gamma_meur[0] - served).abs() < 1e-6);
        assert!((sol.lower_bound_meur - (10.0 + served)).abs() < 1e-6);
    }

    #[test]
    fn phased_group_keeps_strict_order() {
        let mut case = two_bus_case(3);
        case.demands[0].load_nominal_mw = 150.0;
        for (id, phase) in [("pA", 1usize), ("pB", 2usize)] {
            case.generators.push(Generator {
                id: id.into(),
                bus: "b2".into(),
                op_cost_eur_per_mwh: 1.0,
                invest_cost_meur: Some(1.0),
                cap_nominal_mw: 60.0,
                cap_deviation_mw: 0.0,
                category: GeneratorCategory::CandidatePhased {
                    group_id: "grp".into(),
                    phase_order: phase,
                },
            });
        }
        case.generator_groups.push(GeneratorGroup {
            group_id: "grp".into(),
            members: vec!["pA".into(), "pB".into()],
        });

        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let mut pool = ScenarioPool::new();
        pool.push_round(
            (1..=3)
                .map(|t| nominal_realization(&case, &statuses, t).unwrap())
                .collect(),
        );
        let model = build_master(&case, &pool).unwrap();
        let sol = solve_master(&case, &model).unwrap();
        // Cheap phased units get built; order must be strict.
        let a = sol.plan.gen_build.get("pA").copied();
        let b = sol.plan.gen_build.get("pB").copied();
        if let Some(tb) = b {
            let ta = a.expect("phase 2 without phase 1");
            assert!(tb > ta, "phase order violated: A at {ta:?}, B at {tb}");
        }
    }

    #[test]
    fn gen_budget_below_cheapest_candidate_blocks_builds() {
        let mut case = two_bus_case(1);
        case.generators.push(Generator {
            id: "cand".into(),
            bus: "b2".into(),
            op_cost_eur_per_mwh: 1.0,
            invest_cost_meur: Some(50.0),
            cap_nominal_mw: 100.0,
            cap_deviation_mw: 0.0,
            category: GeneratorCategory::CandidateIndependent,
        });
        case.planning.gen_budget_meur = 10.0;
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let mut pool = ScenarioPool::new();
        pool.push_round(vec![nominal_realization(&case, &statuses, 1).unwrap()]);
        let model = build_master(&case, &pool).unwrap();
        let sol = solve_master(&case, &model).unwrap();
        assert!(sol.plan.gen_build.is_empty());
    }

    #[test]
    fn doubling_investment_costs_never_lowers_the_bound() {
        let mut case = two_bus_case(2);
        case.lines[0].capacity_mw = 40.0; // make the candidate worth building
        let statuses = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        let mut pool = ScenarioPool::new();
        pool.push_round(
            (1..=2)
                .map(|t| nominal_realization(&case, &statuses, t).unwrap())
                .collect(),
        );
        let base = solve_master(&case, &build_master(&case, &pool).unwrap()).unwrap();

        let mut pricier = case.clone();
        for line in &mut pricier.lines {
            if let Some(c) = &mut line.invest_cost_meur {
                *c *= 2.0;
            }
        }
        for gen in &mut pricier.generators {
            if let Some(c) = &mut gen.invest_cost_meur {
                *c *= 2.0;
            }
        }
        let doubled = solve_master(&pricier, &build_master(&pricier, &pool).unwrap()).unwrap();
        assert!(
            doubled.lower_bound_meur >= base.lower_bound_meur - 1e-9,
            "doubling costs lowered the bound: {} -> {}",
            base.lower_bound_meur,
            doubled.lower_bound_meur
        );
        assert!(
            doubled.plan.line_build.len() + doubled.plan.gen_build.len()
                <= base.plan.line_build.len() + base.plan.gen_build.len(),
            "doubling costs bought more assets"
        );
    }

    #[test]
    fn investment_npc_discounts_by_build_period() {
        let case = two_bus_case(2);
        let mut plan = InvestmentPlan::empty();
        plan.line_build.insert("c1".into(), 2);
        let (line, gen) = investment_npc(&plan, &case).unwrap();
        assert!((line - 10.0 / 1.1).abs() < 1e-12);
        assert_eq!(gen, 0.0);

        let mut plan1 = InvestmentPlan::empty();
        plan1.line_build.insert("c1".into(), 1);
        let (line1, _) = investment_npc(&plan1, &case).unwrap();
        assert!((line1 - 10.0).abs() < 1e-12);
    }
}
