//! Result reporting: a structured summary of a solve with the build
//! schedule, cost split and bound trace, written as JSON or as CSV tables
//! suitable for plotting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ccg::CcgTrace;
use crate::error::{Error, Result};
use crate::model::{annual_cost_meur_per_mw, operational_weight, NetworkCase};
use crate::opf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}` (expected json or csv)")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScheduleRow {
    pub asset_kind: String,
    pub id: String,
    /// Line endpoints, or the generator bus in `from_bus`.
    pub from_bus: String,
    pub to_bus: String,
    pub period: usize,
    pub invest_cost_meur: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PeriodCostRow {
    pub period: usize,
    /// Worst annual operating cost (M EUR, undiscounted).
    pub worst_op_cost_meur: f64,
    /// Shedding share of that cost (M EUR, undiscounted).
    pub shed_cost_meur: f64,
    pub shed_mw: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub lower_bound_meur: f64,
    pub upper_bound_meur: f64,
    pub gap: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub case_name: String,
    pub converged: bool,
    pub iterations: usize,
    pub lower_bound_meur: f64,
    pub upper_bound_meur: f64,
    pub relative_gap: f64,
    pub schedule: Vec<ScheduleRow>,
    pub line_investment_npc_meur: f64,
    pub gen_investment_npc_meur: f64,
    pub total_investment_npc_meur: f64,
    pub operational_npc_meur: f64,
    pub shed_npc_meur: f64,
    pub total_npc_meur: f64,
    pub period_costs: Vec<PeriodCostRow>,
    pub trace: Vec<TraceRow>,
}

/// Builds the report for a finished run, re-dispatching the best plan at its
/// certified worst realizations to split out shedding.
pub fn build_report(case: &NetworkCase, trace: &CcgTrace) -> Result<Report> {
    let idx = case.index();
    let sigma = case.planning.sigma_hours;
    let rate = case.planning.discount_rate;

    let mut schedule = Vec::new();
    for (id, &t) in &trace.best_plan.line_build {
        let line = case
            .lines
            .iter()
            .find(|l| &l.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan references unknown line `{id}`")))?;
        schedule.push(ScheduleRow {
            asset_kind: "line".into(),
            id: id.clone(),
            from_bus: line.from_bus.clone(),
            to_bus: line.to_bus.clone(),
            period: t,
            invest_cost_meur: line.invest_cost_meur.unwrap_or(0.0),
        });
    }
    for (id, &t) in &trace.best_plan.gen_build {
        let gen = case
            .generators
            .iter()
            .find(|g| &g.id == id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan references unknown generator `{id}`")))?;
        schedule.push(ScheduleRow {
            asset_kind: "generator".into(),
            id: id.clone(),
            from_bus: gen.bus.clone(),
            to_bus: String::new(),
            period: t,
            invest_cost_meur: gen.invest_cost_meur.unwrap_or(0.0),
        });
    }
    schedule.sort_by(|a, b| (&a.asset_kind, a.period, &a.id).cmp(&(&b.asset_kind, b.period, &b.id)));

    let (line_npc, gen_npc) = crate::master::investment_npc(&trace.best_plan, case)?;

    let mut period_costs = Vec::new();
    let mut operational_npc = 0.0;
    let mut shed_npc = 0.0;
    for worst in &trace.best_worst_cases {
        let t = worst.realization.period;
        let model = opf::build_opf_unchecked(case, &idx, &trace.best_statuses, &worst.realization, t);
        let sol = opf::solve_opf(&model, &worst.realization, t)?;
        let shed_cost: f64 = case
            .demands
            .iter()
            .zip(&sol.dispatch.shed_mw)
            .map(|(d, r)| annual_cost_meur_per_mw(sigma, d.shed_cost_eur_per_mwh) * r)
            .sum();
        let weight = operational_weight(rate, t)?;
        operational_npc += weight * worst.c_op_meur;
        shed_npc += weight * shed_cost;
        period_costs.push(PeriodCostRow {
            period: t,
            worst_op_cost_meur: worst.c_op_meur,
            shed_cost_meur: shed_cost,
            shed_mw: sol.dispatch.shed_mw.iter().sum(),
        });
    }

    let trace_rows = trace
        .iterations
        .iter()
        .map(|it| {
            let best_so_far = trace
                .iterations
                .iter()
                .take(it.iteration)
                .map(|r| r.z_up_meur)
                .fold(f64::INFINITY, f64::min);
            TraceRow {
                iteration: it.iteration,
                lower_bound_meur: it.z_lo_meur,
                upper_bound_meur: it.z_up_meur,
                gap: ((best_so_far - it.z_lo_meur) / best_so_far.abs().max(1.0)).max(0.0),
                wall_seconds: it.wall_seconds,
            }
        })
        .collect();

    Ok(Report {
        case_name: case.name.clone(),
        converged: trace.converged,
        iterations: trace.iterations.len(),
        lower_bound_meur: trace.z_lo_meur,
        upper_bound_meur: trace.z_up_meur,
        relative_gap: trace.gap,
        schedule,
        line_investment_npc_meur: line_npc,
        gen_investment_npc_meur: gen_npc,
        total_investment_npc_meur: line_npc + gen_npc,
        operational_npc_meur: operational_npc,
        shed_npc_meur: shed_npc,
        total_npc_meur: line_npc + gen_npc + operational_npc,
        period_costs,
        trace: trace_rows,
    })
}

/// Writes a report. JSON lands at `path` verbatim; CSV produces two tables,
/// `<stem>.schedule.csv` and `<stem>.trace.csv`, next to `path`.
pub fn write_report(report: &Report, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
            text.push('\n');
            fs::write(path, text)?;
        }
        ReportFormat::Csv => {
            // Headers are written explicitly so an empty schedule still
            // yields a header-only table.
            let (schedule_path, trace_path) = csv_paths(path);
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(&schedule_path)
                .map_err(csv_err)?;
            w.write_record(["asset_kind", "id", "from_bus", "to_bus", "period", "invest_cost_meur"])
                .map_err(csv_err)?;
            for row in &report.schedule {
                w.serialize(row).map_err(csv_err)?;
            }
            w.flush()?;
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(&trace_path)
                .map_err(csv_err)?;
            w.write_record(["iteration", "lower_bound_meur", "upper_bound_meur", "gap", "wall_seconds"])
                .map_err(csv_err)?;
            for row in &report.trace {
                w.serialize(row).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Companion file names for the two CSV tables.
pub fn csv_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "report".into());
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    (
        dir.join(format!("{stem}.schedule.csv")),
        dir.join(format!("{stem}.trace.csv")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccg::{ccg_solve, CcgConfig};
    use crate::model::test_fixtures::two_bus_case;

    #[test]
    fn report_totals_recompute_from_parts() {
        let case = two_bus_case(2);
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        let report = build_report(&case, &trace).unwrap();
        let total = report.line_investment_npc_meur
            + report.gen_investment_npc_meur
            + report.operational_npc_meur;
        assert!((report.total_npc_meur - total).abs() < 1e-9);
        assert!(
            (report.total_investment_npc_meur
                - (report.line_investment_npc_meur + report.gen_investment_npc_meur))
                .abs()
                < 1e-9
        );
        let op_from_periods: f64 = report
            .period_costs
            .iter()
            .map(|p| {
                crate::model::operational_weight(case.planning.discount_rate, p.period).unwrap()
                    * p.worst_op_cost_meur
            })
            .sum();
        assert!((report.operational_npc_meur - op_from_periods).abs() < 1e-9);
    }

    #[test]
    fn csv_emits_schedule_and_trace_tables() {
        let case = two_bus_case(2);
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        let report = build_report(&case, &trace).unwrap();
        let dir = std::env::temp_dir().join("gridplan-report-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_report(&report, &path, ReportFormat::Csv).unwrap();
        let (schedule_path, trace_path) = csv_paths(&path);
        let trace_text = fs::read_to_string(trace_path).unwrap();
        // Header plus one line per iteration.
        assert_eq!(trace_text.lines().count(), 1 + report.iterations);
        let schedule_text = fs::read_to_string(schedule_path).unwrap();
        assert_eq!(schedule_text.lines().count(), 1 + report.schedule.len());
    }

    #[test]
    fn empty_plan_yields_header_only_schedule() {
        let mut case = two_bus_case(1);
        case.demands[0].load_nominal_mw = 0.0;
        case.demands[0].load_deviation_mw = 0.0;
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        assert!(trace.best_plan.is_empty());
        let report = build_report(&case, &trace).unwrap();
        let dir = std::env::temp_dir().join("gridplan-report-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        write_report(&report, &path, ReportFormat::Csv).unwrap();
        let (schedule_path, _) = csv_paths(&path);
        let text = fs::read_to_string(schedule_path).unwrap();
        assert_eq!(text.lines().count(), 1, "expected only the header row");
        assert!(text.starts_with("asset_kind,"));
    }

    #[test]
    fn json_report_round_trips() {
        let case = two_bus_case(2);
        let trace = ccg_solve(&case, &CcgConfig::default()).unwrap();
        let report = build_report(&case, &trace).unwrap();
        let dir = std::env::temp_dir().join("gridplan-report-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_report(&report, &path, ReportFormat::Json).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let parsed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, report);
    }
}
