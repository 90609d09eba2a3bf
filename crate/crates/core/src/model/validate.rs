//! Referential and numerical sanity checks for a case. Every other
//! operation in the crate rejects a case that fails validation.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::{GeneratorCategory, LineStatus, NetworkCase};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "  [{}] {}", v.code, v.message)?;
        }
        Ok(())
    }
}

macro_rules! fail {
    ($report:expr, $code:literal, $($arg:tt)*) => {
        $report.violations.push(Violation { code: $code, message: format!($($arg)*) })
    };
}

pub fn validate_case(case: &NetworkCase) -> ValidationReport {
    let mut report = ValidationReport::default();
    let ny = case.planning.horizon_years;

    // Buses: unique ids, exactly one slack.
    let mut bus_ids = HashSet::new();
    for b in &case.buses {
        if !bus_ids.insert(b.id.as_str()) {
            fail!(report, "duplicate-bus", "bus id `{}` appears more than once", b.id);
        }
    }
    let slack_count = case.buses.iter().filter(|b| b.slack).count();
    if slack_count == 0 {
        fail!(report, "no-slack", "no slack bus is designated");
    } else if slack_count > 1 {
        fail!(report, "multiple-slack", "{slack_count} buses are marked slack, expected exactly one");
    }

    // Lines.
    let mut line_ids = HashSet::new();
    for l in &case.lines {
        if !line_ids.insert(l.id.as_str()) {
            fail!(report, "duplicate-line", "line id `{}` appears more than once", l.id);
        }
        for end in [&l.from_bus, &l.to_bus] {
            if !bus_ids.contains(end.as_str()) {
                fail!(report, "dangling-bus", "line `{}` references unknown bus `{end}`", l.id);
            }
        }
        if l.from_bus == l.to_bus {
            fail!(report, "self-loop", "line `{}` connects bus `{}` to itself", l.id, l.from_bus);
        }
        if !l.capacity_mw.is_finite() || l.capacity_mw <= 0.0 {
            fail!(report, "nonpositive-capacity", "line `{}` has capacity {} MW", l.id, l.capacity_mw);
        }
        if !l.susceptance_s.is_finite() || l.susceptance_s <= 0.0 {
            fail!(report, "nonpositive-susceptance", "line `{}` has susceptance {}", l.id, l.susceptance_s);
        }
        match l.status {
            LineStatus::Candidate => {
                match l.invest_cost_meur {
                    None => fail!(report, "missing-invest-cost", "candidate line `{}` has no investment cost", l.id),
                    Some(c) if c < 0.0 => {
                        fail!(report, "negative-invest-cost", "line `{}` has investment cost {c}", l.id)
                    }
                    _ => {}
                }
            }
            LineStatus::Existing => {}
        }
    }

    // Generators.
    let mut gen_ids = HashSet::new();
    let mut phased: BTreeMap<&str, Vec<(&str, usize)>> = BTreeMap::new();
    for g in &case.generators {
        if !gen_ids.insert(g.id.as_str()) {
            fail!(report, "duplicate-generator", "generator id `{}` appears more than once", g.id);
        }
        if !bus_ids.contains(g.bus.as_str()) {
            fail!(report, "dangling-bus", "generator `{}` references unknown bus `{}`", g.id, g.bus);
        }
        if g.cap_nominal_mw < 0.0 {
            fail!(report, "negative-capacity", "generator `{}` has nominal capacity {}", g.id, g.cap_nominal_mw);
        }
        if g.cap_deviation_mw < 0.0 || g.cap_deviation_mw > g.cap_nominal_mw {
            fail!(
                report,
                "deviation-out-of-range",
                "generator `{}` deviation {} outside [0, {}]",
                g.id,
                g.cap_deviation_mw,
                g.cap_nominal_mw
            );
        }
        if g.op_cost_eur_per_mwh < 0.0 {
            fail!(report, "negative-op-cost", "generator `{}` has operating cost {}", g.id, g.op_cost_eur_per_mwh);
        }
        if g.is_candidate() {
            match g.invest_cost_meur {
                None => fail!(report, "missing-invest-cost", "candidate generator `{}` has no investment cost", g.id),
                Some(c) if c < 0.0 => {
                    fail!(report, "negative-invest-cost", "generator `{}` has investment cost {c}", g.id)
                }
                _ => {}
            }
        }
        match &g.category {
            GeneratorCategory::Dismantled { dismantle_period } => {
                if *dismantle_period < 1 || *dismantle_period > ny {
                    fail!(
                        report,
                        "dismantle-out-of-range",
                        "generator `{}` dismantled at period {dismantle_period}, horizon is 1..={ny}",
                        g.id
                    );
                }
            }
            GeneratorCategory::CandidatePhased { group_id, phase_order } => {
                phased.entry(group_id).or_default().push((&g.id, *phase_order));
            }
            _ => {}
        }
    }

    // Phased groups: declared, consistent membership, contiguous phases.
    let mut group_ids = HashSet::new();
    for group in &case.generator_groups {
        if !group_ids.insert(group.group_id.as_str()) {
            fail!(report, "duplicate-group", "group id `{}` appears more than once", group.group_id);
        }
        let declared = phased.remove(group.group_id.as_str()).unwrap_or_default();
        if declared.is_empty() {
            fail!(report, "empty-group", "group `{}` has no phased generators", group.group_id);
            continue;
        }
        let mut by_id: BTreeMap<&str, usize> = declared.iter().cloned().collect();
        if group.members.len() != by_id.len() {
            fail!(
                report,
                "group-membership",
                "group `{}` lists {} members but {} generators declare it",
                group.group_id,
                group.members.len(),
                by_id.len()
            );
        }
        let mut phases = Vec::new();
        for (pos, member) in group.members.iter().enumerate() {
            match by_id.remove(member.as_str()) {
                Some(phase) => {
                    phases.push(phase);
                    if phase != pos + 1 {
                        fail!(
                            report,
                            "group-order",
                            "group `{}` member `{member}` is listed at position {} but declares phase {phase}",
                            group.group_id,
                            pos + 1
                        );
                    }
                }
                None => fail!(
                    report,
                    "group-membership",
                    "group `{}` lists `{member}` which does not declare membership",
                    group.group_id
                ),
            }
        }
        phases.sort_unstable();
        let contiguous = phases.iter().enumerate().all(|(i, &p)| p == i + 1);
        if !contiguous {
            fail!(
                report,
                "non-contiguous-phases",
                "group `{}` declares phases {:?}, expected 1..={}",
                group.group_id,
                phases,
                phases.len()
            );
        }
    }
    for (group_id, members) in phased {
        fail!(
            report,
            "undeclared-group",
            "generators {:?} declare group `{group_id}` which is not defined",
            members.iter().map(|(id, _)| *id).collect::<Vec<_>>()
        );
    }

    // Demands.
    let mut demand_ids = HashSet::new();
    for d in &case.demands {
        if !demand_ids.insert(d.id.as_str()) {
            fail!(report, "duplicate-demand", "demand id `{}` appears more than once", d.id);
        }
        if !bus_ids.contains(d.bus.as_str()) {
            fail!(report, "dangling-bus", "demand `{}` references unknown bus `{}`", d.id, d.bus);
        }
        if d.load_nominal_mw < 0.0 {
            fail!(report, "negative-load", "demand `{}` has nominal load {}", d.id, d.load_nominal_mw);
        }
        if d.load_deviation_mw < 0.0 {
            fail!(report, "negative-deviation", "demand `{}` has load deviation {}", d.id, d.load_deviation_mw);
        }
        if d.shed_cost_eur_per_mwh < 0.0 {
            fail!(report, "negative-shed-cost", "demand `{}` has shedding cost {}", d.id, d.shed_cost_eur_per_mwh);
        }
        for (name, series) in [
            ("shed_fraction", &d.shed_fraction),
            ("growth_mean", &d.growth_mean),
            ("growth_dispersion", &d.growth_dispersion),
        ] {
            if series.len() != ny {
                fail!(
                    report,
                    "series-length",
                    "demand `{}` {name} has {} entries, horizon is {ny}",
                    d.id,
                    series.len()
                );
            }
        }
        if d.shed_fraction.iter().any(|e| !(0.0..=1.0).contains(e)) {
            fail!(report, "shed-fraction-range", "demand `{}` shed_fraction outside [0, 1]", d.id);
        }
        if d.growth_mean.iter().chain(&d.growth_dispersion).any(|h| !h.is_finite() || *h <= 0.0) {
            fail!(report, "nonpositive-growth", "demand `{}` has a nonpositive growth factor", d.id);
        }
    }

    // Planning configuration.
    let p = &case.planning;
    if p.horizon_years < 1 {
        fail!(report, "horizon", "horizon_years must be at least 1");
    }
    if p.discount_rate < 0.0 {
        fail!(report, "discount-rate", "discount_rate {} is negative", p.discount_rate);
    }
    if !p.sigma_hours.is_finite() || p.sigma_hours <= 0.0 {
        fail!(report, "sigma", "sigma_hours {} must be positive", p.sigma_hours);
    }
    if p.line_budget_meur < 0.0 || p.gen_budget_meur < 0.0 {
        fail!(report, "budget", "investment budgets must be nonnegative");
    }
    if p.gamma_demand > case.demands.len() {
        fail!(
            report,
            "gamma-demand",
            "gamma_demand {} exceeds the number of demands {}",
            p.gamma_demand,
            case.demands.len()
        );
    }
    let mut last_threshold = 0usize;
    let mut last_increment = 0usize;
    for (i, step) in p.gamma_gen_steps.iter().enumerate() {
        if i > 0 && step.new_generators <= last_threshold {
            fail!(report, "gamma-steps", "gamma_gen_steps thresholds must be strictly increasing");
        }
        if step.new_generators == 0 {
            fail!(report, "gamma-steps", "gamma_gen_steps thresholds start at 1 (0 new units is the base)");
        }
        if step.increment < last_increment {
            // A shrinking increment would make the budget non-monotone in
            // the number of active units.
            fail!(report, "gamma-steps", "gamma_gen_steps increments must be nondecreasing");
        }
        last_threshold = step.new_generators;
        last_increment = step.increment;
    }

    report
}
