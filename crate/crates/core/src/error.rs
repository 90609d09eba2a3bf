use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("case validation failed:\n{0}")]
    Validation(ValidationReport),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("plan exceeds {which} budget: {spent:.6} > {budget:.6} (M EUR, discounted)")]
    BudgetExceeded {
        which: &'static str,
        spent: f64,
        budget: f64,
    },

    #[error("operational problem for period {period} is {status}: {detail}")]
    OperationalUnsolvable {
        period: usize,
        status: String,
        detail: String,
    },

    #[error(
        "big-M too tight: {detail} (worst-case value {dual_value:.6}, primal check {primal_value:.6})"
    )]
    BigMTooTight {
        detail: String,
        dual_value: f64,
        primal_value: f64,
    },

    #[error("bounds crossed beyond tolerance: upper {z_up:.9} < lower {z_lo:.9}")]
    BoundsCrossed { z_up: f64, z_lo: f64 },

    #[error("master problem is {status}: {detail}")]
    MasterUnsolvable { status: String, detail: String },

    #[error("enumeration budget exceeded: {estimate} {what} > cap {cap}")]
    EnumerationCapExceeded {
        what: &'static str,
        estimate: u128,
        cap: usize,
    },

    #[error("solver: {0}")]
    Solver(#[from] gridplan_mp::SolveError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
