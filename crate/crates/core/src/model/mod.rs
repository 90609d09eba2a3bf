//! Domain model for a planning instance: network assets, the planning
//! configuration, first-stage investment plans and their period-by-period
//! status expansion, and realizations of the polyhedral uncertainty set.
//!
//! Conventions used across the crate:
//! - periods are 1-based (`t = 1..=horizon_years`);
//! - investment costs and budgets are in millions of euros (M EUR);
//! - operating and shedding costs are in EUR/MWh; once weighted by the
//!   annual factor `sigma_hours` and converted via [`EUR_PER_MEUR`] they
//!   become annual operating costs in M EUR, the unit every objective,
//!   bound and report in this crate uses;
//! - susceptances are stored as positive magnitudes, sign handling lives
//!   entirely in the flow-definition rows of the dispatch model.

mod status;
mod uncertainty;
mod validate;

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use status::{discount_factor, expand_statuses, gamma_g_budget, operational_weight};
pub use uncertainty::{nominal_realization, realize_uncertainty, UncertaintyRealization};
pub use validate::{validate_case, ValidationReport, Violation};

/// One million euros per M EUR unit; the single conversion constant between
/// per-MWh operating money and the M EUR objective space.
pub const EUR_PER_MEUR: f64 = 1e6;

/// Annual operating cost, in M EUR per MW of sustained output, of a resource
/// priced at `cost_eur_per_mwh` weighted over `sigma_hours` hours per year.
pub fn annual_cost_meur_per_mw(sigma_hours: f64, cost_eur_per_mwh: f64) -> f64 {
    sigma_hours * cost_eur_per_mwh / EUR_PER_MEUR
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub slack: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStatus {
    Existing,
    Candidate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Susceptance magnitude (S); always positive.
    pub susceptance_s: f64,
    pub capacity_mw: f64,
    pub status: LineStatus,
    /// Required for candidates, absent for existing lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invest_cost_meur: Option<f64>,
}

impl Line {
    pub fn is_candidate(&self) -> bool {
        self.status == LineStatus::Candidate
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorCategory {
    /// Installed before the horizon and never removed.
    Fixed,
    /// Prospective unit that can be built in any single period.
    CandidateIndependent,
    /// Prospective unit built as one phase of an ordered group.
    CandidatePhased { group_id: String, phase_order: usize },
    /// Installed unit retired after a known period.
    Dismantled { dismantle_period: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub op_cost_eur_per_mwh: f64,
    /// Required for candidate categories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invest_cost_meur: Option<f64>,
    pub cap_nominal_mw: f64,
    /// Largest downward capacity deviation; within `[0, cap_nominal_mw]`.
    pub cap_deviation_mw: f64,
    pub category: GeneratorCategory,
}

impl Generator {
    pub fn is_candidate(&self) -> bool {
        matches!(
            self.category,
            GeneratorCategory::CandidateIndependent | GeneratorCategory::CandidatePhased { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorGroup {
    pub group_id: String,
    /// Generator ids ordered by phase, first phase first.
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub id: String,
    pub bus: String,
    pub load_nominal_mw: f64,
    /// Largest upward load deviation (MW, nonnegative).
    pub load_deviation_mw: f64,
    pub shed_cost_eur_per_mwh: f64,
    /// Sheddable fraction of realized load per period, each in `[0, 1]`.
    pub shed_fraction: Vec<f64>,
    /// Multiplicative evolution of the nominal load per period.
    pub growth_mean: Vec<f64>,
    /// Multiplicative evolution of the load deviation per period.
    pub growth_dispersion: Vec<f64>,
}

impl Demand {
    /// Geometric growth factors `(1 + rate)^(t-1)` for `t = 1..=periods`.
    pub fn geometric_factors(rate: f64, periods: usize) -> Vec<f64> {
        (1..=periods).map(|t| (1.0 + rate).powi(t as i32 - 1)).collect()
    }
}

/// One step of the generation uncertainty budget: once at least
/// `new_generators` candidate units are active, the budget grows by
/// `increment` over the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaGenStep {
    pub new_generators: usize,
    pub increment: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanningConfig {
    pub horizon_years: usize,
    pub discount_rate: f64,
    /// Annual weighting factor (hours per year).
    pub sigma_hours: f64,
    pub line_budget_meur: f64,
    pub gen_budget_meur: f64,
    /// Demand uncertainty budget.
    pub gamma_demand: usize,
    /// Generation uncertainty budget before any candidate unit is active.
    pub gamma_gen_base: usize,
    /// Step table growing the generation budget with the active fleet.
    #[serde(default)]
    pub gamma_gen_steps: Vec<GammaGenStep>,
}

impl PlanningConfig {
    /// The step table used throughout the worked examples: one extra unit of
    /// budget for 1-2 new generators, two for 3-4, three for 5 or more.
    pub fn reference_gamma_steps() -> Vec<GammaGenStep> {
        vec![
            GammaGenStep { new_generators: 1, increment: 1 },
            GammaGenStep { new_generators: 3, increment: 2 },
            GammaGenStep { new_generators: 5, increment: 3 },
        ]
    }
}

/// A full problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkCase {
    pub name: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub generator_groups: Vec<GeneratorGroup>,
    pub demands: Vec<Demand>,
    pub planning: PlanningConfig,
}

impl NetworkCase {
    pub fn horizon(&self) -> usize {
        self.planning.horizon_years
    }

    pub fn slack_bus(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.slack)
    }

    pub fn candidate_lines(&self) -> impl Iterator<Item = (usize, &Line)> {
        self.lines.iter().enumerate().filter(|(_, l)| l.is_candidate())
    }

    pub fn candidate_generators(&self) -> impl Iterator<Item = (usize, &Generator)> {
        self.generators.iter().enumerate().filter(|(_, g)| g.is_candidate())
    }

    /// Resolved positional lookups; only meaningful on a validated case.
    pub fn index(&self) -> CaseIndex {
        CaseIndex::new(self)
    }
}

/// Positional cross-references resolved from the string ids.
pub struct CaseIndex {
    pub bus_pos: HashMap<String, usize>,
    /// Per line: (from bus position, to bus position).
    pub line_ends: Vec<(usize, usize)>,
    pub gen_bus: Vec<usize>,
    pub demand_bus: Vec<usize>,
    pub gens_at_bus: Vec<Vec<usize>>,
    pub demands_at_bus: Vec<Vec<usize>>,
    pub slack: usize,
}

impl CaseIndex {
    fn new(case: &NetworkCase) -> Self {
        let bus_pos: HashMap<String, usize> = case
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id.clone(), i))
            .collect();
        let line_ends = case
            .lines
            .iter()
            .map(|l| (bus_pos[&l.from_bus], bus_pos[&l.to_bus]))
            .collect();
        let gen_bus: Vec<usize> = case.generators.iter().map(|g| bus_pos[&g.bus]).collect();
        let demand_bus: Vec<usize> = case.demands.iter().map(|d| bus_pos[&d.bus]).collect();
        let mut gens_at_bus = vec![Vec::new(); case.buses.len()];
        for (i, &b) in gen_bus.iter().enumerate() {
            gens_at_bus[b].push(i);
        }
        let mut demands_at_bus = vec![Vec::new(); case.buses.len()];
        for (j, &b) in demand_bus.iter().enumerate() {
            demands_at_bus[b].push(j);
        }
        let slack = case.slack_bus().expect("validated case has a slack bus");
        Self {
            bus_pos,
            line_ends,
            gen_bus,
            demand_bus,
            gens_at_bus,
            demands_at_bus,
            slack,
        }
    }
}

/// First-stage build decisions: candidate asset id to 1-based build period.
/// The map encoding makes "build at most once" structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvestmentPlan {
    #[serde(default)]
    pub line_build: BTreeMap<String, usize>,
    #[serde(default)]
    pub gen_build: BTreeMap<String, usize>,
}

impl InvestmentPlan {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.line_build.is_empty() && self.gen_build.is_empty()
    }

    /// Undiscounted investment spend of period `t` in M EUR.
    pub fn spend_in_period(&self, case: &NetworkCase, t: usize) -> f64 {
        let mut total = 0.0;
        for line in &case.lines {
            if self.line_build.get(&line.id) == Some(&t) {
                total += line.invest_cost_meur.unwrap_or(0.0);
            }
        }
        for gen in &case.generators {
            if self.gen_build.get(&gen.id) == Some(&t) {
                total += gen.invest_cost_meur.unwrap_or(0.0);
            }
        }
        total
    }
}

/// Per-period activity of every line and generator implied by a plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatusSchedule {
    /// `line_status[line][t-1]`
    pub line_status: Vec<Vec<bool>>,
    /// `gen_status[generator][t-1]`
    pub gen_status: Vec<Vec<bool>>,
}

impl StatusSchedule {
    pub fn line_active(&self, line: usize, t: usize) -> bool {
        self.line_status[line][t - 1]
    }

    pub fn gen_active(&self, gen: usize, t: usize) -> bool {
        self.gen_status[gen][t - 1]
    }

    /// Number of candidate generators active in period `t`; drives the
    /// generation uncertainty budget.
    pub fn new_active_generators(&self, case: &NetworkCase, t: usize) -> usize {
        case.candidate_generators()
            .filter(|(i, _)| self.gen_active(*i, t))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annual_cost_conversion_is_the_single_scaling_point() {
        // 8760 h * 10 EUR/MWh on 80 MW = 7,008,000 EUR = 7.008 M EUR.
        let per_mw = annual_cost_meur_per_mw(8760.0, 10.0);
        assert!((per_mw * 80.0 - 7.008).abs() < 1e-12);
    }

    #[test]
    fn geometric_growth_starts_at_one() {
        let f = Demand::geometric_factors(0.012, 4);
        assert_eq!(f[0], 1.0);
        assert!((f[2] - 1.012f64.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn plan_spend_sums_assets_built_that_period() {
        let case = crate::model::test_fixtures::two_bus_case(2);
        let mut plan = InvestmentPlan::empty();
        plan.line_build.insert("c1".into(), 1);
        assert!((plan.spend_in_period(&case, 1) - 10.0).abs() < 1e-12);
        assert_eq!(plan.spend_in_period(&case, 2), 0.0);
    }
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use super::*;

    /// Two buses joined by an existing line, one fixed generator at the
    /// slack, one demand and one candidate line; enough for most unit tests.
    pub fn two_bus_case(periods: usize) -> NetworkCase {
        NetworkCase {
            name: "two-bus".into(),
            buses: vec![
                Bus { id: "b1".into(), slack: true },
                Bus { id: "b2".into(), slack: false },
            ],
            lines: vec![
                Line {
                    id: "e1".into(),
                    from_bus: "b1".into(),
                    to_bus: "b2".into(),
                    susceptance_s: 50.0,
                    capacity_mw: 100.0,
                    status: LineStatus::Existing,
                    invest_cost_meur: None,
                },
                Line {
                    id: "c1".into(),
                    from_bus: "b1".into(),
                    to_bus: "b2".into(),
                    susceptance_s: 50.0,
                    capacity_mw: 100.0,
                    status: LineStatus::Candidate,
                    invest_cost_meur: Some(10.0),
                },
            ],
            generators: vec![Generator {
                id: "g1".into(),
                bus: "b1".into(),
                op_cost_eur_per_mwh: 10.0,
                invest_cost_meur: None,
                cap_nominal_mw: 200.0,
                cap_deviation_mw: 100.0,
                category: GeneratorCategory::Fixed,
            }],
            generator_groups: vec![],
            demands: vec![Demand {
                id: "d1".into(),
                bus: "b2".into(),
                load_nominal_mw: 80.0,
                load_deviation_mw: 16.0,
                shed_cost_eur_per_mwh: 1000.0,
                shed_fraction: vec![1.0; periods],
                growth_mean: vec![1.0; periods],
                growth_dispersion: vec![1.0; periods],
            }],
            planning: PlanningConfig {
                horizon_years: periods,
                discount_rate: 0.1,
                sigma_hours: 8760.0,
                line_budget_meur: 100.0,
                gen_budget_meur: 100.0,
                gamma_demand: 1,
                gamma_gen_base: 1,
                gamma_gen_steps: PlanningConfig::reference_gamma_steps(),
            },
        }
    }
}
