//! Pluggable solver backend contract.
//!
//! Any engine that honors the [`SolveOutcome`] post-conditions (optimal basic
//! solutions with duals for LPs, global optima for MIPs, determinism for
//! identical inputs) can replace the built-in one process-wide. The built-in
//! engine is the default and the one the test suite certifies.

use std::sync::OnceLock;

use crate::error::SolveError;
use crate::mip::{solve_mip_with, MipOptions};
use crate::program::{MathProgram, SolveOutcome};
use crate::simplex;

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn solve_lp(&self, program: &MathProgram) -> Result<SolveOutcome, SolveError>;
    fn solve_mip(&self, program: &MathProgram) -> Result<SolveOutcome, SolveError>;

    /// Solve with a known valid bound on the optimum (a pruning hint an
    /// engine is free to ignore).
    fn solve_mip_bounded(
        &self,
        program: &MathProgram,
        _cutoff: f64,
    ) -> Result<SolveOutcome, SolveError> {
        self.solve_mip(program)
    }
}

/// The bundled dense revised-simplex / branch-and-bound engine.
#[derive(Debug, Default, Clone, Copy)]
pub struct BuiltinBackend;

impl Backend for BuiltinBackend {
    fn name(&self) -> &str {
        "builtin"
    }

    fn solve_lp(&self, program: &MathProgram) -> Result<SolveOutcome, SolveError> {
        simplex::solve_lp(program)
    }

    fn solve_mip(&self, program: &MathProgram) -> Result<SolveOutcome, SolveError> {
        solve_mip_with(program, MipOptions::default())
    }

    fn solve_mip_bounded(
        &self,
        program: &MathProgram,
        cutoff: f64,
    ) -> Result<SolveOutcome, SolveError> {
        solve_mip_with(
            program,
            MipOptions {
                cutoff: Some(cutoff),
                ..Default::default()
            },
        )
    }
}

static ACTIVE: OnceLock<Box<dyn Backend>> = OnceLock::new();

/// Installs a backend for the rest of the process. May be called at most
/// once; later calls report failure by returning the rejected backend.
pub fn set_backend(backend: Box<dyn Backend>) -> Result<(), Box<dyn Backend>> {
    ACTIVE.set(backend)
}

/// The backend used by every solve in this process (built-in by default).
pub fn active_backend() -> &'static dyn Backend {
    ACTIVE
        .get_or_init(|| Box::new(BuiltinBackend))
        .as_ref()
}

/// Resolves a backend by name, for configuration surfaces.
pub fn backend_by_name(name: &str) -> Result<Box<dyn Backend>, SolveError> {
    match name {
        "builtin" => Ok(Box::new(BuiltinBackend)),
        other => Err(SolveError::UnknownBackend(other.to_string())),
    }
}
