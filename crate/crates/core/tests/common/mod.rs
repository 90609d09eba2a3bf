//! Seeded random instance generator shared by the integration suites.
//! Instances are desk-scale on purpose: small enough for exhaustive
//! certification, rich enough to cover phased groups, dismantling, budgets
//! and both uncertainty budgets.

use gridplan_core::model::{
    Bus, Demand, GammaGenStep, Generator, GeneratorCategory, GeneratorGroup, Line, LineStatus,
    NetworkCase, PlanningConfig,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub struct InstanceOptions {
    pub max_candidate_lines: usize,
    pub max_candidate_gens: usize,
    pub max_gamma: usize,
    pub allow_phased: bool,
    pub allow_dismantling: bool,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        Self {
            max_candidate_lines: 2,
            max_candidate_gens: 2,
            max_gamma: 2,
            allow_phased: true,
            allow_dismantling: true,
        }
    }
}

pub fn random_instance(seed: u64) -> NetworkCase {
    random_instance_with(seed, &InstanceOptions::default())
}

pub fn random_instance_with(seed: u64, opts: &InstanceOptions) -> NetworkCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_bus = rng.random_range(3..=4);
    let periods = rng.random_range(2..=3);

    let buses: Vec<Bus> = (1..=n_bus)
        .map(|i| Bus {
            id: format!("b{i}"),
            slack: i == 1,
        })
        .collect();

    let mut lines = Vec::new();
    for i in 1..n_bus {
        lines.push(Line {
            id: format!("l{i}-{}", i + 1),
            from_bus: format!("b{i}"),
            to_bus: format!("b{}", i + 1),
            susceptance_s: rng.random_range(30.0..=80.0),
            capacity_mw: rng.random_range(40.0..=150.0),
            status: LineStatus::Existing,
            invest_cost_meur: None,
        });
    }
    if n_bus >= 3 && rng.random_bool(0.5) {
        lines.push(Line {
            id: "l1-3".into(),
            from_bus: "b1".into(),
            to_bus: "b3".into(),
            susceptance_s: rng.random_range(30.0..=80.0),
            capacity_mw: rng.random_range(40.0..=120.0),
            status: LineStatus::Existing,
            invest_cost_meur: None,
        });
    }
    let n_cand_lines = rng.random_range(0..=opts.max_candidate_lines);
    for c in 0..n_cand_lines {
        let from = rng.random_range(1..=n_bus);
        let mut to = rng.random_range(1..=n_bus);
        while to == from {
            to = rng.random_range(1..=n_bus);
        }
        lines.push(Line {
            id: format!("c{c}"),
            from_bus: format!("b{from}"),
            to_bus: format!("b{to}"),
            susceptance_s: rng.random_range(30.0..=80.0),
            capacity_mw: rng.random_range(40.0..=120.0),
            status: LineStatus::Candidate,
            invest_cost_meur: Some(rng.random_range(5.0..=50.0)),
        });
    }

    let mut generators = Vec::new();
    let n_fixed = rng.random_range(1..=2);
    for g in 0..n_fixed {
        let cap = rng.random_range(60.0..=250.0);
        let category = if g == 0 && opts.allow_dismantling && rng.random_bool(0.3) {
            GeneratorCategory::Dismantled {
                dismantle_period: rng.random_range(1..=periods),
            }
        } else {
            GeneratorCategory::Fixed
        };
        generators.push(Generator {
            id: format!("g{g}"),
            bus: format!("b{}", rng.random_range(1..=n_bus)),
            op_cost_eur_per_mwh: rng.random_range(5.0..=30.0),
            invest_cost_meur: None,
            cap_nominal_mw: cap,
            cap_deviation_mw: cap * rng.random_range(0.0..=0.5),
            category,
        });
    }
    let n_cand = rng.random_range(0..=opts.max_candidate_gens);
    let phased = opts.allow_phased && n_cand == 2 && rng.random_bool(0.3);
    let mut groups = Vec::new();
    for c in 0..n_cand {
        let cap = rng.random_range(30.0..=120.0);
        let renewable = rng.random_bool(0.7);
        let category = if phased {
            GeneratorCategory::CandidatePhased {
                group_id: "grp".into(),
                phase_order: c + 1,
            }
        } else {
            GeneratorCategory::CandidateIndependent
        };
        generators.push(Generator {
            id: format!("w{c}"),
            bus: format!("b{}", rng.random_range(1..=n_bus)),
            op_cost_eur_per_mwh: rng.random_range(1.0..=20.0),
            invest_cost_meur: Some(rng.random_range(10.0..=120.0)),
            cap_nominal_mw: cap,
            cap_deviation_mw: if renewable { cap } else { cap * 0.5 },
            category,
        });
    }
    if phased {
        groups.push(GeneratorGroup {
            group_id: "grp".into(),
            members: vec!["w0".into(), "w1".into()],
        });
    }

    let n_dem = rng.random_range(2..=3);
    let mut demands = Vec::new();
    for d in 0..n_dem {
        let load = rng.random_range(30.0..=120.0);
        let rate = rng.random_range(0.0..=0.02);
        demands.push(Demand {
            id: format!("d{d}"),
            bus: format!("b{}", rng.random_range(1..=n_bus)),
            load_nominal_mw: load,
            load_deviation_mw: load * rng.random_range(0.1..=0.5),
            shed_cost_eur_per_mwh: rng.random_range(200.0..=2000.0),
            shed_fraction: vec![1.0; periods],
            growth_mean: Demand::geometric_factors(rate, periods),
            growth_dispersion: Demand::geometric_factors(rate, periods),
        });
    }

    let gamma_demand = rng.random_range(0..=opts.max_gamma.min(n_dem));
    let gamma_gen_base = rng.random_range(0..=opts.max_gamma);
    let gamma_gen_steps = if rng.random_bool(0.5) {
        PlanningConfig::reference_gamma_steps()
    } else {
        vec![GammaGenStep { new_generators: 1, increment: 1 }]
    };

    NetworkCase {
        name: format!("rand-{seed}"),
        buses,
        lines,
        generators,
        generator_groups: groups,
        demands,
        planning: PlanningConfig {
            horizon_years: periods,
            discount_rate: [0.0, 0.05, 0.1][rng.random_range(0..3)],
            sigma_hours: if rng.random_bool(0.5) { 8760.0 } else { 1000.0 },
            line_budget_meur: rng.random_range(10.0..=80.0),
            gen_budget_meur: rng.random_range(20.0..=250.0),
            gamma_demand,
            gamma_gen_base,
            gamma_gen_steps,
        },
    }
}
