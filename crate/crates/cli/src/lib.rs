//! Command handling for the `gridplan` binary, kept in a library so the
//! exit-code contract can be tested without spawning processes.
//!
//! Exit codes: 0 success, 1 usage error, 2 case validation failure,
//! 3 non-convergence, 4 solver error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use gridplan_core::ccg::{ccg_solve, CcgConfig};
use gridplan_core::error::Error;
use gridplan_core::io::{load_case, parse_case_file};
use gridplan_core::master::investment_npc;
use gridplan_core::model::{expand_statuses, validate_case, InvestmentPlan};
use gridplan_core::opf::{evaluate_plan, nominal_realizations};
use gridplan_core::oracle::{oracle_global_solve, EnumerationBudget};
use gridplan_core::report::{build_report, write_report, ReportFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Environment variable selecting the optimization backend.
pub const BACKEND_ENV: &str = "GRIDPLAN_BACKEND";

#[derive(Parser, Debug)]
#[command(
    name = "gridplan",
    about = "Robust year-by-year transmission and generation expansion planning",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a case with the alternating bound-driven method.
    Solve(SolveArgs),
    /// Evaluate a given plan at nominal uncertainty.
    Evaluate(EvaluateArgs),
    /// Certify a small case by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Check a case file without solving anything.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Case file (JSON).
    case: PathBuf,
    /// Report destination; defaults next to the case file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "json")]
    format: String,
    /// Relative gap tolerance (overrides the case file).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration cap (overrides the case file).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Print one progress line per iteration.
    #[arg(long)]
    verbose: bool,
    /// Dump every optimization model to ./model-dump/ as plain text.
    #[arg(long)]
    dump_models: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    case: PathBuf,
    /// Plan file: JSON with `line_build` / `gen_build` maps of asset id to
    /// 1-based build period.
    plan: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    case: PathBuf,
    /// Also run the decomposition and print the comparison.
    #[arg(long)]
    solve: bool,
    /// Vertex enumeration cap.
    #[arg(long, default_value_t = 20_000)]
    max_vertices: usize,
    /// Plan enumeration cap.
    #[arg(long, default_value_t = 200_000)]
    max_plans: usize,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    case: PathBuf,
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, everything else is a
            // usage error.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    if let Ok(name) = std::env::var(BACKEND_ENV) {
        match gridplan_mp::backend_by_name(&name) {
            Ok(backend) => {
                // Ignore failure: the backend can only be installed once per
                // process and repeated runs in-process keep the first one.
                let _ = gridplan_mp::set_backend(backend);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
    }

    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Validation(_) | Error::Parse { .. } => EXIT_VALIDATION,
        Error::Io(_) | Error::InvalidArgument(_) | Error::InvalidPlan(_) => EXIT_USAGE,
        _ => EXIT_SOLVER,
    }
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let format: ReportFormat = match args.format.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let file = match parse_case_file(&args.case) {
        Ok(f) => f,
        Err(e) => return report_error(e),
    };
    let case = file.to_case();
    let report = validate_case(&case);
    if !report.is_valid() {
        eprintln!("error: case validation failed:\n{report}");
        return EXIT_VALIDATION;
    }

    let mut config = file.ccg_config();
    if let Some(eps) = args.epsilon {
        config.epsilon = eps;
    }
    if let Some(max) = args.max_iter {
        config.max_iterations = max;
    }
    config.verbose = args.verbose;

    if args.dump_models {
        if let Err(e) = dump_models(&case) {
            return report_error(e);
        }
    }

    let trace = match ccg_solve(&case, &config) {
        Ok(t) => t,
        Err(e) => return report_error(e),
    };
    let report = match build_report(&case, &trace) {
        Ok(r) => r,
        Err(e) => return report_error(e),
    };

    let out = args.out.unwrap_or_else(|| default_out(&args.case, format));
    if let Err(e) = write_report(&report, &out, format) {
        return report_error(e);
    }

    println!(
        "{}: {} after {} iterations, bounds [{:.6}, {:.6}] M EUR, gap {:.3e}",
        case.name,
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations,
        report.lower_bound_meur,
        report.upper_bound_meur,
        report.relative_gap,
    );
    for row in &report.schedule {
        if row.asset_kind == "line" {
            println!(
                "  build line {} ({} -> {}) in period {}",
                row.id, row.from_bus, row.to_bus, row.period
            );
        } else {
            println!("  build generator {} at {} in period {}", row.id, row.from_bus, row.period);
        }
    }
    println!(
        "  investment {:.3} M EUR (lines {:.3}, generators {:.3}); operation {:.3} M EUR of which shedding {:.3}",
        report.total_investment_npc_meur,
        report.line_investment_npc_meur,
        report.gen_investment_npc_meur,
        report.operational_npc_meur,
        report.shed_npc_meur,
    );
    println!("  report written to {}", out.display());

    if report.converged {
        EXIT_OK
    } else {
        EXIT_NON_CONVERGENCE
    }
}

fn default_out(case_path: &Path, format: ReportFormat) -> PathBuf {
    let stem = case_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "case".into());
    let ext = match format {
        ReportFormat::Json => "report.json",
        ReportFormat::Csv => "report.csv",
    };
    case_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(format!("{stem}.{ext}"))
}

fn dump_models(case: &gridplan_core::model::NetworkCase) -> Result<(), Error> {
    use gridplan_core::master::{build_master, ScenarioPool};
    use gridplan_core::model::expand_statuses as expand;
    use gridplan_core::subproblem::build_dual_subproblem;

    let dir = Path::new("model-dump");
    fs::create_dir_all(dir)?;
    let master = build_master(case, &ScenarioPool::new())?;
    fs::write(dir.join("master-initial.lp"), master.program.to_string())?;
    let statuses = expand(&InvestmentPlan::empty(), case)?;
    for t in 1..=case.planning.horizon_years {
        let sub = build_dual_subproblem(case, &statuses, t)?;
        fs::write(dir.join(format!("subproblem-t{t}.lp")), sub.program.to_string())?;
    }
    eprintln!("model dumps written to {}", dir.display());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> i32 {
    let case = match load_case(&args.case) {
        Ok(c) => c,
        Err(e) => return report_error(e),
    };
    let text = match fs::read_to_string(&args.plan) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read plan {}: {e}", args.plan.display());
            return EXIT_USAGE;
        }
    };
    let plan: InvestmentPlan = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot parse plan {}: {e}", args.plan.display());
            return EXIT_USAGE;
        }
    };

    let statuses = match expand_statuses(&plan, &case) {
        Ok(s) => s,
        Err(e) => return report_error(e),
    };
    let nominal = match nominal_realizations(&case, &statuses) {
        Ok(r) => r,
        Err(e) => return report_error(e),
    };
    let eval = match evaluate_plan(&case, &plan, &nominal) {
        Ok(ev) => ev,
        Err(e) => return report_error(e),
    };

    println!("{}: nominal-uncertainty evaluation", case.name);
    println!(
        "  investment NPC {:.6} M EUR (lines {:.6}, generators {:.6})",
        eval.line_npc_meur + eval.gen_npc_meur,
        eval.line_npc_meur,
        eval.gen_npc_meur
    );
    println!("  operational NPC {:.6} M EUR", eval.operational_npc_meur);
    println!("  total NPC {:.6} M EUR", eval.total_npc_meur);
    for p in &eval.periods {
        println!(
            "  period {:>3}: invest {:.3} M EUR, operation {:.3} M EUR, shed {:.3} MW",
            p.period, p.invest_meur, p.op_cost_meur, p.shed_mw
        );
    }
    EXIT_OK
}

fn cmd_oracle(args: OracleArgs) -> i32 {
    let case = match load_case(&args.case) {
        Ok(c) => c,
        Err(e) => return report_error(e),
    };
    let budget = EnumerationBudget {
        max_vertices: args.max_vertices,
        max_plans: args.max_plans,
    };
    let (plan, objective) = match oracle_global_solve(&case, &budget) {
        Ok(r) => r,
        Err(e) => return report_error(e),
    };
    println!("{}: exhaustive optimum {objective:.6} M EUR", case.name);
    let (line_npc, gen_npc) = investment_npc(&plan, &case).expect("oracle plan is valid");
    println!("  investment NPC {:.6} M EUR (lines {line_npc:.6}, generators {gen_npc:.6})", line_npc + gen_npc);
    for (id, t) in &plan.line_build {
        println!("  build line {id} in period {t}");
    }
    for (id, t) in &plan.gen_build {
        println!("  build generator {id} in period {t}");
    }

    if args.solve {
        let trace = match ccg_solve(&case, &CcgConfig::default()) {
            Ok(t) => t,
            Err(e) => return report_error(e),
        };
        let diff = (trace.z_up_meur - objective).abs() / objective.abs().max(1.0);
        println!(
            "  decomposition: {:.6} M EUR in {} iterations (relative difference {:.3e})",
            trace.z_up_meur,
            trace.iterations.len(),
            diff
        );
        if !trace.converged {
            return EXIT_NON_CONVERGENCE;
        }
    }
    EXIT_OK
}

fn cmd_validate(args: ValidateArgs) -> i32 {
    let file = match parse_case_file(&args.case) {
        Ok(f) => f,
        Err(e) => return report_error(e),
    };
    let case = file.to_case();
    let report = validate_case(&case);
    if report.is_valid() {
        println!(
            "{}: ok ({} buses, {} lines, {} generators, {} demands, {} periods)",
            case.name,
            case.buses.len(),
            case.lines.len(),
            case.generators.len(),
            case.demands.len(),
            case.planning.horizon_years
        );
        EXIT_OK
    } else {
        eprintln!("{}: validation failed\n{report}", case.name);
        EXIT_VALIDATION
    }
}

fn report_error(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_code_for(&err)
}
