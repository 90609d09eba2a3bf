//! Linear / mixed-integer program representation.
//!
//! A [`MathProgram`] is a plain data description of an optimization model:
//! bounded variables (continuous or binary), linear rows with a sense and a
//! right-hand side, and a linear objective. It carries no solver state, so it
//! is cheap to clone, safe to share between threads and can be handed to any
//! backend.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::SolveError;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Constraint row sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowSense::Le => write!(f, "<="),
            RowSense::Eq => write!(f, "="),
            RowSense::Ge => write!(f, ">="),
        }
    }
}

/// Variable integrality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Opaque handle to a variable of a particular program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Opaque handle to a constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowId(pub(crate) usize);

impl RowId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub name: String,
    pub sense: RowSense,
    pub rhs: f64,
    /// Sorted by variable index, one entry per variable.
    pub terms: Vec<(usize, f64)>,
}

/// A linear or mixed-integer program.
#[derive(Clone, Debug)]
pub struct MathProgram {
    name: String,
    sense: Sense,
    vars: Vec<Variable>,
    rows: Vec<Row>,
}

impl MathProgram {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        Self {
            name: name.into(),
            sense,
            vars: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Adds a continuous variable with the given bounds (may be infinite).
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind: VarKind::Continuous,
            objective: 0.0,
        });
        VarId(self.vars.len() - 1)
    }

    /// Adds a binary variable (bounds fixed to `[0, 1]`).
    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower: 0.0,
            upper: 1.0,
            kind: VarKind::Binary,
            objective: 0.0,
        });
        VarId(self.vars.len() - 1)
    }

    /// Fixes a variable to a single value.
    pub fn fix_var(&mut self, var: VarId, value: f64) {
        self.vars[var.0].lower = value;
        self.vars[var.0].upper = value;
    }

    pub fn set_objective_coeff(&mut self, var: VarId, coeff: f64) {
        self.vars[var.0].objective = coeff;
    }

    pub fn add_objective_coeff(&mut self, var: VarId, coeff: f64) {
        self.vars[var.0].objective += coeff;
    }

    /// Adds a row; duplicate variable references are accumulated.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        sense: RowSense,
        rhs: f64,
        terms: &[(VarId, f64)],
    ) -> RowId {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (v, c) in terms {
            *merged.entry(v.0).or_insert(0.0) += *c;
        }
        self.rows.push(Row {
            name: name.into(),
            sense,
            rhs,
            terms: merged.into_iter().collect(),
        });
        RowId(self.rows.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn has_integer_vars(&self) -> bool {
        self.vars.iter().any(|v| v.kind == VarKind::Binary)
    }

    pub fn binary_var_indices(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| i)
            .collect()
    }

    /// Structural well-formedness: finite objective and coefficients, sane
    /// bounds, binaries inside `[0, 1]`, every term referencing a declared
    /// variable.
    pub fn validate(&self) -> Result<(), SolveError> {
        for (i, v) in self.vars.iter().enumerate() {
            if !v.objective.is_finite() {
                return Err(SolveError::InvalidProgram(format!(
                    "objective coefficient of `{}` (var {i}) is not finite",
                    v.name
                )));
            }
            if v.lower.is_nan() || v.upper.is_nan() {
                return Err(SolveError::InvalidProgram(format!(
                    "bounds of `{}` (var {i}) contain NaN",
                    v.name
                )));
            }
            if v.lower > v.upper {
                return Err(SolveError::InvalidProgram(format!(
                    "empty bound interval [{}, {}] on `{}`",
                    v.lower, v.upper, v.name
                )));
            }
            if v.kind == VarKind::Binary && (v.lower < -1e-12 || v.upper > 1.0 + 1e-12) {
                return Err(SolveError::InvalidProgram(format!(
                    "binary `{}` has bounds outside [0, 1]",
                    v.name
                )));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(SolveError::InvalidProgram(format!(
                    "right-hand side of `{}` (row {r}) is not finite",
                    row.name
                )));
            }
            for (j, c) in &row.terms {
                if *j >= self.vars.len() {
                    return Err(SolveError::InvalidProgram(format!(
                        "row `{}` references undeclared variable {j}",
                        row.name
                    )));
                }
                if !c.is_finite() {
                    return Err(SolveError::InvalidProgram(format!(
                        "row `{}` has non-finite coefficient on `{}`",
                        row.name, self.vars[*j].name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// LP-format-style textual dump, for debugging.
impl fmt::Display for MathProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "\\ program: {}", self.name)?;
        match self.sense {
            Sense::Minimize => writeln!(f, "Minimize")?,
            Sense::Maximize => writeln!(f, "Maximize")?,
        }
        write!(f, " obj:")?;
        let mut first = true;
        for v in &self.vars {
            if v.objective != 0.0 {
                if first && v.objective >= 0.0 {
                    write!(f, " {} {}", fmt_coeff(v.objective), v.name)?;
                } else {
                    write!(f, " {} {} {}", sign(v.objective), fmt_coeff(v.objective.abs()), v.name)?;
                }
                first = false;
            }
        }
        if first {
            write!(f, " 0")?;
        }
        writeln!(f)?;
        writeln!(f, "Subject To")?;
        for row in &self.rows {
            write!(f, " {}:", row.name)?;
            let mut first = true;
            for (j, c) in &row.terms {
                if first && *c >= 0.0 {
                    write!(f, " {} {}", fmt_coeff(*c), self.vars[*j].name)?;
                } else {
                    write!(f, " {} {} {}", sign(*c), fmt_coeff(c.abs()), self.vars[*j].name)?;
                }
                first = false;
            }
            if first {
                write!(f, " 0")?;
            }
            writeln!(f, " {} {}", row.sense, row.rhs)?;
        }
        writeln!(f, "Bounds")?;
        for v in &self.vars {
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) => writeln!(f, " {} <= {} <= {}", v.lower, v.name, v.upper)?,
                (true, false) => writeln!(f, " {} >= {}", v.name, v.lower)?,
                (false, true) => writeln!(f, " {} <= {}", v.name, v.upper)?,
                (false, false) => writeln!(f, " {} free", v.name)?,
            }
        }
        let binaries: Vec<&str> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            writeln!(f, "Binary")?;
            writeln!(f, " {}", binaries.join(" "))?;
        }
        writeln!(f, "End")
    }
}

fn sign(c: f64) -> char {
    if c < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn fmt_coeff(c: f64) -> String {
    format!("{c}")
}

/// Solver verdict for one program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// The result of one solve.
///
/// `duals` and `reduced_costs` are populated by LP solves only; they are the
/// per-row shadow prices (objective change per unit of right-hand side) and
/// the per-variable reduced costs in the program's own sense.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub primal: Option<Vec<f64>>,
    pub duals: Option<Vec<f64>>,
    pub reduced_costs: Option<Vec<f64>>,
}

impl SolveOutcome {
    pub fn status_only(status: SolveStatus) -> Self {
        Self {
            status,
            objective: None,
            primal: None,
            duals: None,
            reduced_costs: None,
        }
    }

    /// Objective of an optimal solve; panics otherwise (programming error).
    pub fn objective_value(&self) -> f64 {
        self.objective.expect("no objective on a non-optimal outcome")
    }

    pub fn primal_values(&self) -> &[f64] {
        self.primal.as_deref().expect("no primal solution")
    }
}
