//! Dense bounded-variable revised simplex.
//!
//! Rows are converted to equalities with one slack per row whose bounds
//! encode the sense; infeasible starting points are repaired by a phase-1
//! minimization over artificial columns. The basis inverse is kept explicitly
//! and refreshed from scratch at a fixed cadence to bound numerical drift.
//! Pivot selection is Dantzig pricing with a switch to Bland's rule after a
//! run of degenerate steps, which keeps the method finite.

use crate::error::SolveError;
use crate::program::{MathProgram, RowSense, Sense, SolveOutcome, SolveStatus};

/// Relative feasibility / optimality tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before Bland's rule takes over.
const BLAND_TRIGGER: usize = 50;
/// Pivots between basis-inverse refactorizations.
const REFACTOR_EVERY: usize = 128;
/// Smallest acceptable pivot magnitude relative to the column.
const PIVOT_REL_TOL: f64 = 1e-10;

/// Standard-form data shared by every node of a branch-and-bound tree:
/// the constraint matrix never changes, only the structural bounds do.
#[derive(Clone)]
pub(crate) struct StdForm {
    pub m: usize,
    pub n_struct: usize,
    /// Sparse columns as (row, coefficient) pairs in ascending row order
    /// (structural first, then one slack per row).
    pub cols: Vec<Vec<(u32, f64)>>,
    pub lo: Vec<f64>,
    pub up: Vec<f64>,
    /// Minimization costs (already negated for maximize programs).
    pub cost: Vec<f64>,
    pub b: Vec<f64>,
    pub negated: bool,
}

impl StdForm {
    pub fn from_program(p: &MathProgram) -> Result<Self, SolveError> {
        p.validate()?;
        let m = p.num_rows();
        let n = p.num_vars();
        let negated = p.sense() == Sense::Maximize;
        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n + m];
        let mut lo = Vec::with_capacity(n + m);
        let mut up = Vec::with_capacity(n + m);
        let mut cost = vec![0.0; n + m];
        for (j, v) in p.vars().iter().enumerate() {
            lo.push(v.lower);
            up.push(v.upper);
            cost[j] = if negated { -v.objective } else { v.objective };
        }
        let mut b = Vec::with_capacity(m);
        for (i, row) in p.rows().iter().enumerate() {
            for (j, c) in &row.terms {
                if *c != 0.0 {
                    cols[*j].push((i as u32, *c));
                }
            }
            cols[n + i].push((i as u32, 1.0));
            b.push(row.rhs);
            let (slo, sup) = match row.sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lo.push(slo);
            up.push(sup);
        }
        Ok(Self {
            m,
            n_struct: n,
            cols,
            lo,
            up,
            cost,
            b,
            negated,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    FreeAtZero,
}

/// Raw solver result in minimization space over the standard form.
pub(crate) struct SimplexResult {
    pub status: SolveStatus,
    /// Values of all columns (structural + slack [+ artificial]).
    pub x: Vec<f64>,
    /// Row duals `y = c_B B^-1` (minimization sign convention).
    pub y: Vec<f64>,
    /// Reduced costs of structural columns.
    pub d: Vec<f64>,
    pub objective: f64,
}

struct Tableau<'a> {
    form: &'a StdForm,
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Phase-dependent costs over all columns.
    cost: Vec<f64>,
    /// Columns including any artificials appended after the slacks.
    extra_cols: Vec<Vec<(u32, f64)>>,
    n_total: usize,
    basis: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    /// Row-major m x m basis inverse.
    binv: Vec<f64>,
    bland: bool,
    degenerate_run: usize,
    pivots_since_refactor: usize,
    scale: f64,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<'a> Tableau<'a> {
    fn col(&self, j: usize) -> &[(u32, f64)] {
        let base = self.form.cols.len();
        if j < base {
            &self.form.cols[j]
        } else {
            &self.extra_cols[j - base]
        }
    }


    /// Rebuilds the basis inverse by Gauss-Jordan with partial pivoting and
    /// recomputes basic values from the nonbasic point.
    fn refactor(&mut self) -> Result<(), SolveError> {
        let m = self.form.m;
        let mut a = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(i, c) in self.col(j) {
                a[i as usize * m + pos] = c;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = a[k * m + k].abs();
            for r in (k + 1)..m {
                let v = a[r * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(SolveError::Numerical {
                    context: "basis refactorization".into(),
                    detail: format!("singular basis at column {k}"),
                });
            }
            if piv_row != k {
                for c in 0..m {
                    a.swap(k * m + c, piv_row * m + c);
                    inv.swap(k * m + c, piv_row * m + c);
                }
            }
            let piv = a[k * m + k];
            for c in 0..m {
                a[k * m + c] /= piv;
                inv[k * m + c] /= piv;
            }
            for r in 0..m {
                if r != k {
                    let f = a[r * m + k];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[k * m + c];
                            inv[r * m + c] -= f * inv[k * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.recompute_basics();
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// x_B = B^-1 (b - A_N x_N)
    fn recompute_basics(&mut self) {
        let m = self.form.m;
        let mut rhs = self.form.b.clone();
        for j in 0..self.n_total {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                let v = self.x[j];
                for &(i, c) in self.col(j) {
                    rhs[i as usize] -= c * v;
                }
            }
        }
        for (pos, &j) in self.basis.iter().enumerate() {
            let row = &self.binv[pos * m..(pos + 1) * m];
            self.x[j] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.form.m;
        let mut y = vec![0.0; m];
        for (pos, &j) in self.basis.iter().enumerate() {
            let c = self.cost[j];
            if c != 0.0 {
                let row = &self.binv[pos * m..(pos + 1) * m];
                for (yi, bi) in y.iter_mut().zip(row) {
                    *yi += c * bi;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, y: &[f64], j: usize) -> f64 {
        let mut d = self.cost[j];
        for &(i, c) in self.col(j) {
            d -= y[i as usize] * c;
        }
        d
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.form.m;
        let cj = self.col(j);
        let mut w = vec![0.0; m];
        for (pos, wp) in w.iter_mut().enumerate() {
            let row = &self.binv[pos * m..(pos + 1) * m];
            *wp = cj.iter().map(|&(i, c)| row[i as usize] * c).sum();
        }
        w
    }

    fn eta_update(&mut self, row: usize, w: &[f64]) {
        let m = self.form.m;
        let piv = w[row];
        for c in 0..m {
            self.binv[row * m + c] /= piv;
        }
        for (r, &f) in w.iter().enumerate() {
            if r != row && f != 0.0 {
                for c in 0..m {
                    self.binv[r * m + c] = self.binv[r * m + c] - f * self.binv[row * m + c];
                }
            }
        }
    }

    /// One simplex step under the current cost vector.
    fn step(&mut self) -> Result<StepOutcome, SolveError> {
        let y = self.duals();

        // Pricing: Dantzig by default, Bland when degeneracy has stalled us.
        let mut entering: Option<(usize, f64, f64)> = None; // (j, d, score)
        for j in 0..self.n_total {
            if self.state[j] == VarState::Basic {
                continue;
            }
            if self.lo[j] == self.up[j] {
                continue; // fixed, can never move
            }
            let d = self.reduced_cost(&y, j);
            let tol = FEAS_TOL * (1.0 + self.cost[j].abs());
            let eligible = match self.state[j] {
                VarState::AtLower => d < -tol,
                VarState::AtUpper => d > tol,
                VarState::FreeAtZero => d.abs() > tol,
                VarState::Basic => unreachable!(),
            };
            if !eligible {
                continue;
            }
            if self.bland {
                entering = Some((j, d, 0.0));
                break;
            }
            let score = d.abs();
            match entering {
                Some((_, _, best)) if best >= score => {}
                _ => entering = Some((j, d, score)),
            }
        }
        let (q, dq, _) = match entering {
            Some(e) => e,
            None => return Ok(StepOutcome::Optimal),
        };

        let dir: f64 = match self.state[q] {
            VarState::AtLower => 1.0,
            VarState::AtUpper => -1.0,
            VarState::FreeAtZero => {
                if dq < 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            VarState::Basic => unreachable!(),
        };

        let w = self.ftran(q);
        let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let piv_tol = PIVOT_REL_TOL * (1.0 + wmax);

        // Ratio test: blocking constraint among basic variables, or the
        // entering variable's own opposite bound.
        let own_range = if self.lo[q].is_finite() && self.up[q].is_finite() {
            self.up[q] - self.lo[q]
        } else {
            f64::INFINITY
        };
        let mut theta = own_range;
        let mut block: Option<usize> = None; // basis position
        for (pos, &jb) in self.basis.iter().enumerate() {
            let delta = dir * w[pos];
            if delta.abs() <= piv_tol {
                continue;
            }
            let v = self.x[jb];
            let limit = if delta > 0.0 {
                if self.lo[jb].is_finite() {
                    (v - self.lo[jb]) / delta
                } else {
                    continue;
                }
            } else if self.up[jb].is_finite() {
                (v - self.up[jb]) / delta
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let tie = 1e-12 * (1.0 + theta.abs());
            let replace = match block {
                None => limit < theta,
                Some(bpos) => {
                    if limit < theta - tie {
                        true
                    } else if limit <= theta + tie {
                        // Tie: Bland prefers the lowest variable index,
                        // otherwise prefer the larger pivot for stability.
                        if self.bland {
                            jb < self.basis[bpos]
                        } else {
                            w[pos].abs() > w[bpos].abs()
                        }
                    } else {
                        false
                    }
                }
            };
            if replace {
                theta = limit.min(theta);
                block = Some(pos);
            }
        }

        if theta.is_infinite() {
            return Ok(StepOutcome::Unbounded);
        }

        // Move the entering variable and every basic variable.
        let theta = theta.max(0.0);
        self.x[q] += dir * theta;
        for (pos, &jb) in self.basis.iter().enumerate() {
            self.x[jb] -= dir * theta * w[pos];
        }

        match block {
            None => {
                // Bound flip, basis unchanged.
                self.state[q] = match self.state[q] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    s => s,
                };
                // Snap to the exact bound.
                self.x[q] = match self.state[q] {
                    VarState::AtLower => self.lo[q],
                    VarState::AtUpper => self.up[q],
                    _ => self.x[q],
                };
            }
            Some(pos) => {
                let leaving = self.basis[pos];
                let hit_lower = dir * w[pos] > 0.0;
                self.state[leaving] = if hit_lower {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                self.x[leaving] = if hit_lower { self.lo[leaving] } else { self.up[leaving] };
                self.state[q] = VarState::Basic;
                self.basis[pos] = q;
                self.eta_update(pos, &w);
                self.pivots_since_refactor += 1;
            }
        }

        if theta <= 1e-11 * (1.0 + self.scale) {
            self.degenerate_run += 1;
            if self.degenerate_run >= BLAND_TRIGGER {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }

        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(StepOutcome::Pivoted)
    }

    fn run(&mut self, max_iters: usize) -> Result<SolveStatus, SolveError> {
        for _ in 0..max_iters {
            match self.step()? {
                StepOutcome::Optimal => return Ok(SolveStatus::Optimal),
                StepOutcome::Unbounded => return Ok(SolveStatus::Unbounded),
                StepOutcome::Pivoted => {}
            }
        }
        Ok(SolveStatus::IterationLimit)
    }

    fn objective(&self) -> f64 {
        (0..self.n_total).map(|j| self.cost[j] * self.x[j]).sum()
    }
}

/// Solves the standard form with the given structural bound overrides.
pub(crate) fn solve_std(
    form: &StdForm,
    lo_struct: &[f64],
    up_struct: &[f64],
) -> Result<SimplexResult, SolveError> {
    let m = form.m;
    let n_total = form.cols.len();
    let mut lo = form.lo.clone();
    let mut up = form.up.clone();
    lo[..form.n_struct].copy_from_slice(lo_struct);
    up[..form.n_struct].copy_from_slice(up_struct);
    for j in 0..form.n_struct {
        if lo[j] > up[j] {
            // Branching produced an empty box.
            return Ok(SimplexResult {
                status: SolveStatus::Infeasible,
                x: vec![0.0; n_total],
                y: vec![0.0; m],
                d: vec![0.0; form.n_struct],
                objective: 0.0,
            });
        }
    }

    let scale = form
        .b
        .iter()
        .fold(1.0f64, |a, v| a.max(v.abs()));

    // Start: structural variables at their nearest finite bound (zero when
    // free), slacks tentatively basic.
    let mut x = vec![0.0; n_total];
    let mut state = vec![VarState::FreeAtZero; n_total];
    for j in 0..form.n_struct {
        if lo[j].is_finite() {
            x[j] = lo[j];
            state[j] = VarState::AtLower;
        } else if up[j].is_finite() {
            x[j] = up[j];
            state[j] = VarState::AtUpper;
        } else {
            x[j] = 0.0;
            state[j] = VarState::FreeAtZero;
        }
    }

    let mut residual = form.b.clone();
    for (j, xj) in x.iter().enumerate().take(form.n_struct) {
        if *xj != 0.0 {
            for &(i, c) in &form.cols[j] {
                residual[i as usize] -= c * xj;
            }
        }
    }

    // Rows whose slack cannot absorb the residual get an artificial column.
    let mut extra_cols: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut artificials: Vec<usize> = Vec::new();
    let mut basis = Vec::with_capacity(m);
    let feas = FEAS_TOL * (1.0 + scale);
    for i in 0..m {
        let s = form.n_struct + i;
        let r = residual[i];
        if r >= lo[s] - feas && r <= up[s] + feas {
            x[s] = r;
            state[s] = VarState::Basic;
            basis.push(s);
        } else {
            let sv = r.clamp(lo[s], up[s]);
            let sv = if sv.is_finite() { sv } else { 0.0 };
            x[s] = sv;
            state[s] = if sv == lo[s] { VarState::AtLower } else { VarState::AtUpper };
            let gap = r - sv;
            extra_cols.push(vec![(i as u32, if gap >= 0.0 { 1.0 } else { -1.0 })]);
            let aj = n_total + extra_cols.len() - 1;
            artificials.push(aj);
            basis.push(aj);
            x.push(gap.abs());
            state.push(VarState::Basic);
            lo.push(0.0);
            up.push(f64::INFINITY);
        }
    }

    let total = n_total + extra_cols.len();
    let mut tab = Tableau {
        form,
        lo,
        up,
        cost: vec![0.0; total],
        extra_cols,
        n_total: total,
        basis,
        state,
        x,
        binv: Vec::new(),
        bland: false,
        degenerate_run: 0,
        pivots_since_refactor: 0,
        scale,
    };
    tab.refactor()?;

    let max_iters = 2000 + 200 * (m + total);

    // Phase 1: minimize the artificial mass.
    if !artificials.is_empty() {
        for &aj in &artificials {
            tab.cost[aj] = 1.0;
        }
        let status = tab.run(max_iters)?;
        if status == SolveStatus::IterationLimit {
            return Ok(SimplexResult {
                status,
                x: tab.x[..n_total].to_vec(),
                y: vec![0.0; m],
                d: vec![0.0; form.n_struct],
                objective: 0.0,
            });
        }
        let infeas: f64 = artificials.iter().map(|&aj| tab.x[aj]).sum();
        if infeas > feas {
            return Ok(SimplexResult {
                status: SolveStatus::Infeasible,
                x: tab.x[..n_total].to_vec(),
                y: vec![0.0; m],
                d: vec![0.0; form.n_struct],
                objective: 0.0,
            });
        }
        // Pin artificials at zero; basic ones that cannot be pivoted out sit
        // in redundant rows and stay harmlessly fixed.
        for &aj in &artificials {
            tab.lo[aj] = 0.0;
            tab.up[aj] = 0.0;
            if tab.state[aj] != VarState::Basic {
                tab.x[aj] = 0.0;
            }
        }
        for pos in 0..m {
            let jb = tab.basis[pos];
            if jb >= n_total {
                // Try to swap in any non-artificial column with an acceptable
                // pivot in this row.
                let mut best: Option<(usize, f64)> = None;
                for j in 0..n_total {
                    if tab.state[j] == VarState::Basic {
                        continue;
                    }
                    let cj = tab.col(j);
                    let row = &tab.binv[pos * m..(pos + 1) * m];
                    let piv: f64 = cj.iter().map(|&(i, c)| row[i as usize] * c).sum();
                    if piv.abs() > 1e-7 {
                        best = Some((j, piv));
                        break;
                    }
                }
                if let Some((j, _)) = best {
                    let w = tab.ftran(j);
                    let entering_val = tab.x[j];
                    tab.state[j] = VarState::Basic;
                    tab.state[jb] = VarState::AtLower;
                    tab.x[jb] = 0.0;
                    tab.basis[pos] = j;
                    tab.eta_update(pos, &w);
                    tab.x[j] = entering_val;
                    tab.recompute_basics();
                }
            }
        }
        tab.bland = false;
        tab.degenerate_run = 0;
    }

    // Phase 2: the real costs.
    for j in 0..total {
        tab.cost[j] = if j < n_total { form.cost[j] } else { 0.0 };
    }
    tab.refactor()?;
    let status = tab.run(max_iters)?;

    let y = tab.duals();
    let mut d = vec![0.0; form.n_struct];
    for (j, dj) in d.iter_mut().enumerate() {
        *dj = tab.reduced_cost(&y, j);
    }
    Ok(SimplexResult {
        status,
        objective: tab.objective(),
        x: tab.x[..n_total].to_vec(),
        y,
        d,
    })
}

/// Residual-based feasibility audit of a candidate point.
pub(crate) fn max_violation(p: &MathProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (j, v) in p.vars().iter().enumerate() {
        if v.lower.is_finite() {
            worst = worst.max(v.lower - x[j]);
        }
        if v.upper.is_finite() {
            worst = worst.max(x[j] - v.upper);
        }
    }
    for row in p.rows() {
        let lhs: f64 = row.terms.iter().map(|(j, c)| c * x[*j]).sum();
        let viol = match row.sense {
            RowSense::Le => lhs - row.rhs,
            RowSense::Ge => row.rhs - lhs,
            RowSense::Eq => (lhs - row.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    worst
}

/// Solves a continuous program.
pub fn solve_lp(p: &MathProgram) -> Result<SolveOutcome, SolveError> {
    if p.has_integer_vars() {
        return Err(SolveError::IntegerVariablesInLp(p.name().to_string()));
    }
    let form = StdForm::from_program(p)?;
    solve_lp_form(p, &form)
}

pub(crate) fn solve_lp_form(p: &MathProgram, form: &StdForm) -> Result<SolveOutcome, SolveError> {
    let res = solve_std(form, &form.lo[..form.n_struct], &form.up[..form.n_struct])?;
    finish_lp(p, form, res)
}

pub(crate) fn finish_lp(
    p: &MathProgram,
    form: &StdForm,
    res: SimplexResult,
) -> Result<SolveOutcome, SolveError> {
    match res.status {
        SolveStatus::Optimal => {}
        other => return Ok(SolveOutcome::status_only(other)),
    }
    let x = res.x[..form.n_struct].to_vec();

    // Self-audit: a reported optimum must actually satisfy the program.
    let scale = p
        .rows()
        .iter()
        .map(|r| r.rhs.abs())
        .fold(1.0f64, f64::max);
    let viol = max_violation(p, &x);
    if viol > 1e-6 * scale {
        return Err(SolveError::Numerical {
            context: format!("LP `{}`", p.name()),
            detail: format!("primal residual {viol:.3e} exceeds tolerance"),
        });
    }

    let sign = if form.negated { -1.0 } else { 1.0 };
    let objective = sign * res.objective;
    let duals: Vec<f64> = res.y.iter().map(|v| sign * v).collect();
    let reduced: Vec<f64> = res.d.iter().map(|v| sign * v).collect();
    Ok(SolveOutcome {
        status: SolveStatus::Optimal,
        objective: Some(objective),
        primal: Some(x),
        duals: Some(duals),
        reduced_costs: Some(reduced),
    })
}
