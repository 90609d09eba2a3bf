//! Solver-agnostic linear / mixed-integer programming toolkit.
//!
//! Programs are built as plain data ([`MathProgram`]), solved by the built-in
//! dense revised-simplex engine ([`solve_lp`]) or its branch-and-bound
//! wrapper ([`solve_mip`]), and audited by independent brute-force reference
//! solvers in [`enumeration`]. External engines can be swapped in through the
//! [`backend`] contract without touching call sites.

mod error;
mod mip;
mod program;
mod simplex;

pub mod backend;
pub mod enumeration;

pub use backend::{active_backend, backend_by_name, set_backend, Backend, BuiltinBackend};
pub use error::SolveError;
pub use mip::{solve_mip, solve_mip_with, MipOptions};
pub use program::{
    MathProgram, Row, RowId, RowSense, Sense, SolveOutcome, SolveStatus, VarId, VarKind, Variable,
};
pub use simplex::{solve_lp, FEAS_TOL};
