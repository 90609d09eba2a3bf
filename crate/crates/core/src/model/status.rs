//! Discounting, status expansion of an investment plan and the fleet-size
//! dependent generation uncertainty budget.

use crate::error::{Error, Result};

use super::{GeneratorCategory, InvestmentPlan, NetworkCase, PlanningConfig, StatusSchedule};

/// Present-value factor `1 / (1 + rate)^(t-1)` for money paid at the start
/// of period `t` (1-based).
pub fn discount_factor(rate: f64, t: usize) -> Result<f64> {
    if t < 1 {
        return Err(Error::InvalidArgument(format!(
            "discount_factor needs a 1-based period, got {t}"
        )));
    }
    Ok(1.0 / (1.0 + rate).powi(t as i32 - 1))
}

/// Present-value weight of the period-`t` operating cost: one extra year of
/// discounting relative to the investment paid at the period start.
pub fn operational_weight(rate: f64, t: usize) -> Result<f64> {
    Ok(discount_factor(rate, t)? / (1.0 + rate))
}

/// Generation uncertainty budget as a function of the number of active
/// candidate generators: the base plus the increment of the deepest step
/// table row whose threshold is reached.
pub fn gamma_g_budget(config: &PlanningConfig, n_new_active: usize) -> usize {
    let mut increment = 0;
    for step in &config.gamma_gen_steps {
        if n_new_active >= step.new_generators {
            increment = step.increment;
        } else {
            break;
        }
    }
    config.gamma_gen_base + increment
}

/// Expands first-stage build decisions into per-period statuses: existing
/// assets stay on, candidates switch on at their build period and stay on,
/// dismantled generators are forced off after their retirement period no
/// matter what the plan says.
pub fn expand_statuses(plan: &InvestmentPlan, case: &NetworkCase) -> Result<StatusSchedule> {
    let ny = case.planning.horizon_years;

    for (id, &t) in &plan.line_build {
        let line = case
            .lines
            .iter()
            .find(|l| &l.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan builds unknown line `{id}`")))?;
        if !line.is_candidate() {
            return Err(Error::InvalidPlan(format!(
                "plan builds line `{id}` which is not a candidate"
            )));
        }
        if t < 1 || t > ny {
            return Err(Error::InvalidPlan(format!(
                "line `{id}` build period {t} outside 1..={ny}"
            )));
        }
    }
    for (id, &t) in &plan.gen_build {
        let gen = case
            .generators
            .iter()
            .find(|g| &g.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan builds unknown generator `{id}`")))?;
        if !gen.is_candidate() {
            return Err(Error::InvalidPlan(format!(
                "plan builds generator `{id}` which is not a candidate"
            )));
        }
        if t < 1 || t > ny {
            return Err(Error::InvalidPlan(format!(
                "generator `{id}` build period {t} outside 1..={ny}"
            )));
        }
    }

    let line_status = case
        .lines
        .iter()
        .map(|line| {
            if line.is_candidate() {
                match plan.line_build.get(&line.id) {
                    Some(&built) => (1..=ny).map(|t| t >= built).collect(),
                    None => vec![false; ny],
                }
            } else {
                vec![true; ny]
            }
        })
        .collect();

    let gen_status = case
        .generators
        .iter()
        .map(|gen| match &gen.category {
            GeneratorCategory::Fixed => vec![true; ny],
            GeneratorCategory::Dismantled { dismantle_period } => {
                (1..=ny).map(|t| t <= *dismantle_period).collect()
            }
            GeneratorCategory::CandidateIndependent
            | GeneratorCategory::CandidatePhased { .. } => match plan.gen_build.get(&gen.id) {
                Some(&built) => (1..=ny).map(|t| t >= built).collect(),
                None => vec![false; ny],
            },
        })
        .collect();

    Ok(StatusSchedule {
        line_status,
        gen_status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_fixtures::two_bus_case;
    use crate::model::{Generator, GeneratorCategory, PlanningConfig};

    fn reference_config() -> PlanningConfig {
        PlanningConfig {
            horizon_years: 5,
            discount_rate: 0.1,
            sigma_hours: 8760.0,
            line_budget_meur: 0.0,
            gen_budget_meur: 0.0,
            gamma_demand: 0,
            gamma_gen_base: 1,
            gamma_gen_steps: PlanningConfig::reference_gamma_steps(),
        }
    }

    #[test]
    fn discount_factor_examples() {
        assert_eq!(discount_factor(0.1, 1).unwrap(), 1.0);
        assert_eq!(discount_factor(0.0, 7).unwrap(), 1.0);
        assert!((discount_factor(0.1, 2).unwrap() - 1.0 / 1.1).abs() < 1e-12);
        assert!(discount_factor(0.1, 0).is_err());
    }

    #[test]
    fn gamma_budget_reference_steps() {
        let cfg = reference_config();
        assert_eq!(gamma_g_budget(&cfg, 0), 1);
        assert_eq!(gamma_g_budget(&cfg, 1), 2);
        assert_eq!(gamma_g_budget(&cfg, 2), 2);
        assert_eq!(gamma_g_budget(&cfg, 3), 3);
        assert_eq!(gamma_g_budget(&cfg, 4), 3);
        assert_eq!(gamma_g_budget(&cfg, 5), 4);
        assert_eq!(gamma_g_budget(&cfg, 9), 4);
    }

    #[test]
    fn candidate_line_cumulative_status() {
        let mut case = two_bus_case(5);
        case.planning.horizon_years = 5;
        for d in &mut case.demands {
            d.shed_fraction = vec![1.0; 5];
            d.growth_mean = vec![1.0; 5];
            d.growth_dispersion = vec![1.0; 5];
        }
        let mut plan = InvestmentPlan::empty();
        plan.line_build.insert("c1".into(), 3);
        let schedule = expand_statuses(&plan, &case).unwrap();
        assert_eq!(schedule.line_status[1], vec![false, false, true, true, true]);
        // Existing line is always on.
        assert_eq!(schedule.line_status[0], vec![true; 5]);
    }

    #[test]
    fn dismantled_generator_forced_off_after_retirement() {
        let mut case = two_bus_case(25);
        for d in &mut case.demands {
            d.shed_fraction = vec![1.0; 25];
            d.growth_mean = vec![1.0; 25];
            d.growth_dispersion = vec![1.0; 25];
        }
        case.generators[0].category = GeneratorCategory::Dismantled { dismantle_period: 8 };
        let schedule = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        for t in 1..=25 {
            assert_eq!(schedule.gen_active(0, t), t <= 8, "period {t}");
        }
    }

    #[test]
    fn empty_plan_leaves_candidates_off() {
        let case = two_bus_case(3);
        let schedule = expand_statuses(&InvestmentPlan::empty(), &case).unwrap();
        assert_eq!(schedule.line_status[1], vec![false; 3]);
        assert_eq!(schedule.gen_status[0], vec![true; 3]);
    }

    #[test]
    fn plan_for_non_candidate_rejected() {
        let case = two_bus_case(3);
        let mut plan = InvestmentPlan::empty();
        plan.line_build.insert("e1".into(), 1);
        assert!(expand_statuses(&plan, &case).is_err());

        let mut plan = InvestmentPlan::empty();
        plan.gen_build.insert("g1".into(), 2);
        assert!(expand_statuses(&plan, &case).is_err());
    }

    #[test]
    fn new_active_counts_only_candidates() {
        let mut case = two_bus_case(4);
        case.generators.push(Generator {
            id: "cand".into(),
            bus: "b2".into(),
            op_cost_eur_per_mwh: 17.0,
            invest_cost_meur: Some(40.0),
            cap_nominal_mw: 40.0,
            cap_deviation_mw: 40.0,
            category: GeneratorCategory::CandidateIndependent,
        });
        let mut plan = InvestmentPlan::empty();
        plan.gen_build.insert("cand".into(), 2);
        let schedule = expand_statuses(&plan, &case).unwrap();
        assert_eq!(schedule.new_active_generators(&case, 1), 0);
        assert_eq!(schedule.new_active_generators(&case, 2), 1);
        assert_eq!(schedule.new_active_generators(&case, 4), 1);
    }
}
