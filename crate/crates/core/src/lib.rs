//! Robust year-by-year transmission and generation expansion planning.
//!
//! The decision problem: choose which candidate lines and generators to
//! build, and when, to minimize net present cost when, each year, an
//! adversary may push a budgeted number of loads up and generator capacities
//! down. The library solves it by alternating between an investment master
//! problem over the worst realizations seen so far and per-period worst-case
//! subproblems for the latest plan, with matching lower/upper bounds; small
//! instances can additionally be certified by outright enumeration.
//!
//! Module map:
//! - [`model`] — domain types, validation, status expansion, uncertainty
//!   realizations;
//! - [`opf`] — per-period dispatch (DC power flow with shedding) and plan
//!   evaluation;
//! - [`subproblem`] — dualized worst-case problem per period;
//! - [`master`] — first-stage investment problem over a scenario pool;
//! - [`ccg`] — the alternating bound-driven loop;
//! - [`oracle`] — brute-force certification for desk-scale instances;
//! - [`io`] / [`report`] — case files and result reporting.

pub mod ccg;
pub mod error;
pub mod io;
pub mod master;
pub mod model;
pub mod opf;
pub mod oracle;
pub mod report;
pub mod subproblem;

pub use error::{Error, Result};
