//! Realizations of the polyhedral uncertainty set. A realization picks, per
//! period, which active generators lose capacity and which demands rise, each
//! pick consuming one unit of the respective budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{gamma_g_budget, NetworkCase, StatusSchedule};

/// One vertex of the uncertainty set for a single period, with the realized
/// capacities and loads it induces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyRealization {
    /// 1-based period this realization belongs to.
    pub period: usize,
    /// Deviation indicator per generator (case order).
    pub z_gen: Vec<bool>,
    /// Deviation indicator per demand (case order).
    pub z_dem: Vec<bool>,
    /// Realized maximum capacity per generator (MW).
    pub gen_capacity_mw: Vec<f64>,
    /// Realized load per demand (MW).
    pub demand_mw: Vec<f64>,
}

/// Builds and checks a realization from deviation indicators.
///
/// Rejected when an indicator points at an inactive generator, or when a
/// budget is exceeded: the generation budget depends on how many candidate
/// units the schedule has active in `t`.
pub fn realize_uncertainty(
    case: &NetworkCase,
    statuses: &StatusSchedule,
    z_gen: &[bool],
    z_dem: &[bool],
    t: usize,
) -> Result<UncertaintyRealization> {
    if t < 1 || t > case.planning.horizon_years {
        return Err(Error::InvalidArgument(format!(
            "period {t} outside 1..={}",
            case.planning.horizon_years
        )));
    }
    if z_gen.len() != case.generators.len() || z_dem.len() != case.demands.len() {
        return Err(Error::InvalidArgument(
            "deviation vectors must cover every generator and demand".into(),
        ));
    }

    for (i, (gen, &z)) in case.generators.iter().zip(z_gen).enumerate() {
        if z && !statuses.gen_active(i, t) {
            return Err(Error::InvalidArgument(format!(
                "generator `{}` is inactive in period {t} and cannot deviate",
                gen.id
            )));
        }
    }
    let gamma_g = gamma_g_budget(&case.planning, statuses.new_active_generators(case, t));
    let gen_deviations = z_gen.iter().filter(|z| **z).count();
    if gen_deviations > gamma_g {
        return Err(Error::InvalidArgument(format!(
            "{gen_deviations} generator deviations exceed the budget {gamma_g} for period {t}"
        )));
    }
    let dem_deviations = z_dem.iter().filter(|z| **z).count();
    if dem_deviations > case.planning.gamma_demand {
        return Err(Error::InvalidArgument(format!(
            "{dem_deviations} demand deviations exceed the budget {} for period {t}",
            case.planning.gamma_demand
        )));
    }

    let gen_capacity_mw = case
        .generators
        .iter()
        .zip(z_gen)
        .map(|(g, &z)| g.cap_nominal_mw - if z { g.cap_deviation_mw } else { 0.0 })
        .collect::<Vec<_>>();
    let demand_mw = case
        .demands
        .iter()
        .zip(z_dem)
        .map(|(d, &z)| {
            d.load_nominal_mw * d.growth_mean[t - 1]
                + if z { d.load_deviation_mw * d.growth_dispersion[t - 1] } else { 0.0 }
        })
        .collect::<Vec<_>>();

    debug_assert!(gen_capacity_mw.iter().all(|u| *u >= 0.0));
    debug_assert!(demand_mw.iter().all(|u| *u >= 0.0));

    Ok(UncertaintyRealization {
        period: t,
        z_gen: z_gen.to_vec(),
        z_dem: z_dem.to_vec(),
        gen_capacity_mw,
        demand_mw,
    })
}

/// The all-nominal point (no deviations), valid for any schedule.
pub fn nominal_realization(case: &NetworkCase, statuses: &StatusSchedule, t: usize) -> Result<UncertaintyRealization> {
    realize_uncertainty(
        case,
        statuses,
        &vec![false; case.generators.len()],
        &vec![false; case.demands.len()],
        t,
    )
}
