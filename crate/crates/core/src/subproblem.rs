//! Worst-case operational cost for one period: the dispatch problem is
//! replaced by its dual and maximized jointly over the dual variables and
//! the deviation indicators of the uncertainty set, giving a single-level
//! mixed-integer program per period.
//!
//! The products of deviation indicators with dual variables are linearized
//! exactly (binary times box-bounded continuous). The boxes come from
//! cost-based bounds on the true shadow prices, widened by a safety factor;
//! correctness is self-certifying: after the solve, no linearization factor
//! may sit on an artificial box side, and the reported optimum must match an
//! independent primal dispatch solve at the returned deviation vector.

use std::f64::consts::PI;

use gridplan_mp::{active_backend, MathProgram, RowSense, Sense, SolveStatus, VarId};

use crate::error::{Error, Result};
use crate::model::{
    annual_cost_meur_per_mw, gamma_g_budget, realize_uncertainty, validate_case, CaseIndex,
    NetworkCase, StatusSchedule, UncertaintyRealization,
};
use crate::opf::{self, DualSolution};

/// Widening applied to the claimed dual bounds before they are imposed as
/// boxes, so a genuine optimum never sits on an artificial side. Wider is
/// safer but loosens the relaxation the search prunes with; the runtime
/// audits catch a box that turns out too tight.
const BOX_SLACK: f64 = 2.0;
/// Relative tolerance for the at-artificial-bound and cross-validation
/// audits.
const CERT_TOL: f64 = 1e-6;

/// Cost-derived bounds on the dispatch duals (M EUR scale). These are bounds
/// on true optimal shadow prices; the boxes actually imposed in the
/// mixed-integer program are `BOX_SLACK` times wider.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationBounds {
    /// |nodal price| and |demand-fixing price| cap: the worst shedding cost.
    pub lambda_abs: f64,
    pub alpha_abs: f64,
    /// Lower bound (<= 0) on generation-capacity prices.
    pub varphi_g_lo: f64,
    /// Lower bound (<= 0) on shedding-capacity prices.
    pub varphi_d_lo: f64,
    /// |flow-definition price| via the dual flow row.
    pub phi_abs: f64,
    /// |flow-bound prices|.
    pub phi_bound_abs: f64,
    /// |angle-bound prices| and |slack pin price| via the susceptance mass.
    pub xi_abs: f64,
    pub chi_abs: f64,
}

/// Bounds on the true duals from the cost structure: a marginal MW is never
/// worth more than the priciest shedding it can avoid, and the remaining
/// duals inherit from that through their defining rows.
pub fn dual_bounds(case: &NetworkCase, _t: usize) -> LinearizationBounds {
    let sigma = case.planning.sigma_hours;
    let max_shed = case
        .demands
        .iter()
        .map(|d| d.shed_cost_eur_per_mwh)
        .fold(0.0f64, f64::max);
    let max_gen = case
        .generators
        .iter()
        .map(|g| g.op_cost_eur_per_mwh)
        .fold(0.0f64, f64::max);
    let lambda_abs = annual_cost_meur_per_mw(sigma, max_shed);
    let phi_abs = 4.0 * lambda_abs;
    let susceptance_mass: f64 = case.lines.iter().map(|l| l.susceptance_s).sum();
    LinearizationBounds {
        lambda_abs,
        alpha_abs: lambda_abs,
        varphi_g_lo: -annual_cost_meur_per_mw(sigma, max_shed + max_gen),
        varphi_d_lo: -lambda_abs,
        phi_abs,
        phi_bound_abs: lambda_abs,
        xi_abs: susceptance_mass * phi_abs,
        chi_abs: susceptance_mass * phi_abs,
    }
}

/// The worst uncertainty realization for one period and the cost it forces.
#[derive(Clone, Debug)]
pub struct WorstCase {
    pub realization: UncertaintyRealization,
    /// Annual operating cost at the worst vertex (M EUR, undiscounted).
    pub c_op_meur: f64,
    /// Dispatch duals at the worst vertex.
    pub dual: DualSolution,
}

/// The worst-case MIP plus the index maps to read the solution back.
pub struct SubproblemModel {
    pub program: MathProgram,
    bounds: LinearizationBounds,
    /// Generators active in this period (deviation variable exists).
    gen_active: Vec<bool>,
    z_gen: Vec<Option<VarId>>,
    z_dem: Vec<VarId>,
}

/// Builds the single-level worst-case MIP for period `t`.
pub fn build_dual_subproblem(
    case: &NetworkCase,
    statuses: &StatusSchedule,
    t: usize,
) -> Result<SubproblemModel> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let idx = case.index();
    Ok(build_unchecked(case, &idx, statuses, t))
}

pub(crate) fn build_unchecked(
    case: &NetworkCase,
    idx: &CaseIndex,
    statuses: &StatusSchedule,
    t: usize,
) -> SubproblemModel {
    let sigma = case.planning.sigma_hours;
    let bounds = dual_bounds(case, t);
    let mut p = MathProgram::new(format!("worst-{}-t{t}", case.name), Sense::Maximize);

    let line_active: Vec<bool> = (0..case.lines.len()).map(|k| statuses.line_active(k, t)).collect();
    let gen_active: Vec<bool> = (0..case.generators.len()).map(|i| statuses.gen_active(i, t)).collect();

    // Nodal prices are boxed too: they do not enter any product, but the
    // cost bound is valid for them and a finite box tightens the relaxation
    // considerably. The audit below checks them like the product factors.
    let lambda_box = BOX_SLACK * bounds.lambda_abs;
    let lambda: Vec<VarId> = case
        .buses
        .iter()
        .map(|b| p.add_var(format!("lambda_{}", b.id), -lambda_box, lambda_box))
        .collect();

    let phi: Vec<Option<VarId>> = case
        .lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            line_active[k].then(|| p.add_var(format!("phi_{}", l.id), f64::NEG_INFINITY, f64::INFINITY))
        })
        .collect();
    let chi = p.add_var("chi", f64::NEG_INFINITY, f64::INFINITY);

    let phi_hat: Vec<Option<VarId>> = case
        .lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            line_active[k].then(|| {
                let v = p.add_var(format!("phihat_{}", l.id), f64::NEG_INFINITY, 0.0);
                p.set_objective_coeff(v, l.capacity_mw);
                v
            })
        })
        .collect();
    let phi_check: Vec<Option<VarId>> = case
        .lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            line_active[k].then(|| {
                let v = p.add_var(format!("phichk_{}", l.id), 0.0, f64::INFINITY);
                p.set_objective_coeff(v, -l.capacity_mw);
                v
            })
        })
        .collect();

    let xi_hat: Vec<Option<VarId>> = case
        .buses
        .iter()
        .enumerate()
        .map(|(n, b)| {
            (n != idx.slack).then(|| {
                let v = p.add_var(format!("xihat_{}", b.id), f64::NEG_INFINITY, 0.0);
                p.set_objective_coeff(v, PI);
                v
            })
        })
        .collect();
    let xi_check: Vec<Option<VarId>> = case
        .buses
        .iter()
        .enumerate()
        .map(|(n, b)| {
            (n != idx.slack).then(|| {
                let v = p.add_var(format!("xichk_{}", b.id), 0.0, f64::INFINITY);
                p.set_objective_coeff(v, -PI);
                v
            })
        })
        .collect();

    // Linearization factors get finite boxes (widened claimed bounds).
    let alpha_box = BOX_SLACK * bounds.alpha_abs;
    let g_box = BOX_SLACK * bounds.varphi_g_lo;
    let d_box = BOX_SLACK * bounds.varphi_d_lo;

    let alpha: Vec<VarId> = case
        .demands
        .iter()
        .map(|d| {
            let v = p.add_var(format!("alpha_{}", d.id), -alpha_box, alpha_box);
            p.set_objective_coeff(v, d.load_nominal_mw * d.growth_mean[t - 1]);
            v
        })
        .collect();

    let varphi_g: Vec<Option<VarId>> = case
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            gen_active[i].then(|| {
                let v = p.add_var(format!("vphig_{}", g.id), g_box, 0.0);
                p.set_objective_coeff(v, g.cap_nominal_mw);
                v
            })
        })
        .collect();

    let varphi_d: Vec<VarId> = case
        .demands
        .iter()
        .map(|d| {
            let v = p.add_var(format!("vphid_{}", d.id), d_box, 0.0);
            let e = d.shed_fraction[t - 1];
            p.set_objective_coeff(v, e * d.load_nominal_mw * d.growth_mean[t - 1]);
            v
        })
        .collect();

    // Deviation indicators; inactive generators cannot deviate and carry no
    // variable at all.
    let z_gen: Vec<Option<VarId>> = case
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| gen_active[i].then(|| p.add_binary(format!("zg_{}", g.id))))
        .collect();
    let z_dem: Vec<VarId> = case
        .demands
        .iter()
        .map(|d| p.add_binary(format!("zd_{}", d.id)))
        .collect();

    // Products of indicators with dual factors, linearized exactly.
    for (i, g) in case.generators.iter().enumerate() {
        let (Some(vg), Some(zg)) = (varphi_g[i], z_gen[i]) else { continue };
        let w = p.add_var(format!("wg_{}", g.id), g_box, 0.0);
        p.set_objective_coeff(w, -g.cap_deviation_mw);
        // w = z * varphi_g with varphi_g in [g_box, 0]:
        p.add_row(format!("wg_lo_{}", g.id), RowSense::Ge, 0.0, &[(w, 1.0), (zg, -g_box)]);
        p.add_row(
            format!("wg_le_{}", g.id),
            RowSense::Le,
            -g_box,
            &[(w, 1.0), (vg, -1.0), (zg, -g_box)],
        );
        p.add_row(format!("wg_ge_{}", g.id), RowSense::Ge, 0.0, &[(w, 1.0), (vg, -1.0)]);
    }
    for (j, d) in case.demands.iter().enumerate() {
        let u_dev = d.load_deviation_mw * d.growth_dispersion[t - 1];
        let e = d.shed_fraction[t - 1];

        let wa = p.add_var(format!("wa_{}", d.id), -alpha_box, alpha_box);
        p.set_objective_coeff(wa, u_dev);
        // w = z * alpha with alpha in [-alpha_box, alpha_box]:
        p.add_row(format!("wa_lo_{}", d.id), RowSense::Ge, 0.0, &[(wa, 1.0), (z_dem[j], alpha_box)]);
        p.add_row(format!("wa_hi_{}", d.id), RowSense::Le, 0.0, &[(wa, 1.0), (z_dem[j], -alpha_box)]);
        p.add_row(
            format!("wa_le_{}", d.id),
            RowSense::Le,
            alpha_box,
            &[(wa, 1.0), (alpha[j], -1.0), (z_dem[j], alpha_box)],
        );
        p.add_row(
            format!("wa_ge_{}", d.id),
            RowSense::Ge,
            -alpha_box,
            &[(wa, 1.0), (alpha[j], -1.0), (z_dem[j], -alpha_box)],
        );

        let wd = p.add_var(format!("wd_{}", d.id), d_box, 0.0);
        p.set_objective_coeff(wd, e * u_dev);
        p.add_row(format!("wd_lo_{}", d.id), RowSense::Ge, 0.0, &[(wd, 1.0), (z_dem[j], -d_box)]);
        p.add_row(
            format!("wd_le_{}", d.id),
            RowSense::Le,
            -d_box,
            &[(wd, 1.0), (varphi_d[j], -1.0), (z_dem[j], -d_box)],
        );
        p.add_row(format!("wd_ge_{}", d.id), RowSense::Ge, 0.0, &[(wd, 1.0), (varphi_d[j], -1.0)]);
    }

    // Dual feasibility of the dispatch problem.
    for (i, g) in case.generators.iter().enumerate() {
        if let Some(vg) = varphi_g[i] {
            p.add_row(
                format!("dgen_{}", g.id),
                RowSense::Le,
                annual_cost_meur_per_mw(sigma, g.op_cost_eur_per_mwh),
                &[(lambda[idx.gen_bus[i]], 1.0), (vg, 1.0)],
            );
        }
    }
    for (j, d) in case.demands.iter().enumerate() {
        p.add_row(
            format!("ddem_{}", d.id),
            RowSense::Le,
            0.0,
            &[(lambda[idx.demand_bus[j]], -1.0), (alpha[j], 1.0)],
        );
        p.add_row(
            format!("dshed_{}", d.id),
            RowSense::Le,
            annual_cost_meur_per_mw(sigma, d.shed_cost_eur_per_mwh),
            &[(lambda[idx.demand_bus[j]], 1.0), (varphi_d[j], 1.0)],
        );
    }
    for (k, l) in case.lines.iter().enumerate() {
        let (Some(f), Some(hat), Some(check)) = (phi[k], phi_hat[k], phi_check[k]) else {
            continue;
        };
        let (from, to) = idx.line_ends[k];
        p.add_row(
            format!("dflow_{}", l.id),
            RowSense::Eq,
            0.0,
            &[
                (lambda[from], -1.0),
                (lambda[to], 1.0),
                (f, 1.0),
                (hat, 1.0),
                (check, 1.0),
            ],
        );
    }
    for (n, bus) in case.buses.iter().enumerate() {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for (k, l) in case.lines.iter().enumerate() {
            if let Some(f) = phi[k] {
                let (from, to) = idx.line_ends[k];
                if from == n {
                    terms.push((f, -l.susceptance_s));
                }
                if to == n {
                    terms.push((f, l.susceptance_s));
                }
            }
        }
        if n == idx.slack {
            terms.push((chi, 1.0));
            p.add_row(format!("dangle_{}", bus.id), RowSense::Eq, 0.0, &terms);
        } else {
            terms.push((xi_hat[n].unwrap(), 1.0));
            terms.push((xi_check[n].unwrap(), 1.0));
            p.add_row(format!("dangle_{}", bus.id), RowSense::Eq, 0.0, &terms);
        }
    }

    // Uncertainty budgets. The generation budget depends on the active fleet.
    let gamma_g = gamma_g_budget(&case.planning, statuses.new_active_generators(case, t));
    let zg_terms: Vec<(VarId, f64)> = z_gen.iter().flatten().map(|z| (*z, 1.0)).collect();
    if !zg_terms.is_empty() {
        p.add_row("budget_gen", RowSense::Le, gamma_g as f64, &zg_terms);
    }
    let zd_terms: Vec<(VarId, f64)> = z_dem.iter().map(|z| (*z, 1.0)).collect();
    if !zd_terms.is_empty() {
        p.add_row("budget_dem", RowSense::Le, case.planning.gamma_demand as f64, &zd_terms);
    }

    SubproblemModel {
        program: p,
        bounds,
        gen_active,
        z_gen,
        z_dem,
    }
}

/// Solves the worst-case problem for period `t`, cross-validating the
/// optimum against a primal dispatch solve at the returned vertex.
pub fn solve_subproblem(
    case: &NetworkCase,
    statuses: &StatusSchedule,
    t: usize,
) -> Result<WorstCase> {
    let report = validate_case(case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let idx = case.index();
    solve_unchecked(case, &idx, statuses, t)
}

pub(crate) fn solve_unchecked(
    case: &NetworkCase,
    idx: &CaseIndex,
    statuses: &StatusSchedule,
    t: usize,
) -> Result<WorstCase> {
    let model = build_unchecked(case, idx, statuses, t);
    let out = active_backend().solve_mip(&model.program)?;
    match out.status {
        SolveStatus::Optimal => {}
        status => {
            return Err(Error::OperationalUnsolvable {
                period: t,
                status: format!("{status:?}").to_lowercase(),
                detail: "worst-case problem did not reach a global optimum".into(),
            })
        }
    }
    let x = out.primal_values();
    let c_op_meur = out.objective_value();

    let z_gen: Vec<bool> = model
        .z_gen
        .iter()
        .map(|z| z.map(|v| x[v.index()] > 0.5).unwrap_or(false))
        .collect();
    let z_dem: Vec<bool> = model.z_dem.iter().map(|v| x[v.index()] > 0.5).collect();

    // Audit 1: the dual optimum must equal the primal dispatch cost at the
    // returned vertex (strong duality at fixed deviations). This also yields
    // the natural shadow prices at the worst vertex: the boxed variables of
    // the maximization can wander over flat optimal faces, the primal basis
    // duals cannot.
    let realization = realize_uncertainty(case, statuses, &z_gen, &z_dem, t)?;
    let opf_model = opf::build_opf_unchecked(case, idx, statuses, &realization, t);
    let primal = opf::solve_opf(&opf_model, &realization, t)?;
    if (primal.cost_meur - c_op_meur).abs() > CERT_TOL * (1.0 + c_op_meur.abs()) {
        return Err(Error::BigMTooTight {
            detail: "worst-case optimum disagrees with the primal dispatch at its own vertex".into(),
            dual_value: c_op_meur,
            primal_value: primal.cost_meur,
        });
    }
    let dual = primal.dual;

    // Audit 2: no shadow price at the vertex may reach an artificial box
    // side; true prices respect the claimed bounds, so they sit strictly
    // inside the widened boxes unless those are genuinely too tight.
    let check = |value: f64, box_side: f64, what: &str| -> Result<()> {
        if box_side == 0.0 {
            return Ok(()); // zero box is a genuine bound, not an artifact
        }
        if (value - box_side).abs() <= CERT_TOL * (1.0 + box_side.abs())
            || value.abs() > box_side.abs()
        {
            return Err(Error::BigMTooTight {
                detail: format!("{what} reaches its artificial bound {box_side:.6}"),
                dual_value: value,
                primal_value: box_side,
            });
        }
        Ok(())
    };
    for (n, bus) in case.buses.iter().enumerate() {
        let l = dual.lambda[n];
        check(l, BOX_SLACK * model.bounds.lambda_abs * l.signum(), &format!("lambda[{}]", bus.id))?;
    }
    for (j, d) in case.demands.iter().enumerate() {
        let a = dual.alpha_d[j];
        check(a, BOX_SLACK * model.bounds.alpha_abs * a.signum(), &format!("alpha[{}]", d.id))?;
        check(dual.varphi_d[j], BOX_SLACK * model.bounds.varphi_d_lo, &format!("varphi_d[{}]", d.id))?;
    }
    for (i, g) in case.generators.iter().enumerate() {
        if model.gen_active[i] {
            check(
                dual.varphi_g[i],
                BOX_SLACK * model.bounds.varphi_g_lo,
                &format!("varphi_g[{}]", g.id),
            )?;
        }
    }

    Ok(WorstCase {
        realization,
        c_op_meur,
        dual,
    })
}
