//! Branch-and-bound over the simplex LP relaxation.
//!
//! Node selection is best-bound, with a depth-first dive until the first
//! incumbent is found so an upper bound exists early. Branching picks the
//! most fractional binary (ties to the lowest variable index), which together
//! with deterministic LP pivoting makes every solve reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SolveError;
use crate::program::{MathProgram, SolveOutcome, SolveStatus};
use crate::simplex::{finish_lp, max_violation, solve_std, StdForm};

/// Integrality tolerance on LP values.
const INT_TOL: f64 = 1e-8;
/// A node whose bound is within this of the incumbent is pruned; tighter
/// than the advertised 1e-9 optimality gap so the gap always holds.
const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct MipOptions {
    pub node_limit: usize,
    /// Known valid bound on the optimum (in the program's own sense): for a
    /// minimization, no optimum can exceed it. Subtrees strictly worse than
    /// the cutoff are pruned even before an incumbent exists; a small margin
    /// keeps ties alive so the true optimum always survives.
    pub cutoff: Option<f64>,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self {
            node_limit: 2_000_000,
            cutoff: None,
        }
    }
}

struct Node {
    /// Structural bounds for this subtree.
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Parent LP bound (minimization space), used for ordering.
    bound: f64,
    depth: usize,
    id: u64,
}

/// Best-bound ordering: smaller bound wins, then smaller id.
struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse so the smallest bound pops first.
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

pub fn solve_mip(p: &MathProgram) -> Result<SolveOutcome, SolveError> {
    solve_mip_with(p, MipOptions::default())
}

pub fn solve_mip_with(p: &MathProgram, opts: MipOptions) -> Result<SolveOutcome, SolveError> {
    let form = StdForm::from_program(p)?;
    let int_vars = p.binary_var_indices();
    if int_vars.is_empty() {
        return finish_lp(p, &form, solve_std(&form, &form.lo[..form.n_struct], &form.up[..form.n_struct])?);
    }

    // External cutoff, translated into minimization space.
    let sign = if form.negated { -1.0 } else { 1.0 };
    let cutoff = opts.cutoff.map(|c| sign * c);

    let root = Node {
        lo: form.lo[..form.n_struct].to_vec(),
        up: form.up[..form.n_struct].to_vec(),
        bound: f64::NEG_INFINITY,
        depth: 0,
        id: 0,
    };
    let mut next_id: u64 = 1;

    let mut dive: Vec<Node> = vec![root];
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut incumbent: Option<(Vec<f64>, f64)> = None; // (x, objective in min space)
    let mut nodes = 0usize;
    let mut hit_limit = false;
    let mut root_unbounded = false;

    loop {
        // Depth-first dive until the first incumbent; best-bound afterwards.
        let node = if incumbent.is_none() {
            match dive.pop() {
                Some(n) => n,
                None => match heap.pop() {
                    Some(HeapEntry(n)) => n,
                    None => break,
                },
            }
        } else {
            if !dive.is_empty() {
                for n in dive.drain(..) {
                    heap.push(HeapEntry(n));
                }
            }
            match heap.pop() {
                Some(HeapEntry(n)) => n,
                None => break,
            }
        };

        if let Some((_, inc_obj)) = &incumbent {
            let cutoff = inc_obj - PRUNE_TOL * (1.0 + inc_obj.abs());
            if node.bound >= cutoff {
                continue;
            }
        }

        nodes += 1;
        if nodes > opts.node_limit {
            hit_limit = true;
            break;
        }

        let res = solve_std(&form, &node.lo, &node.up)?;
        match res.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if node.depth == 0 {
                    root_unbounded = true;
                    break;
                }
                // An unbounded node with a bounded root relaxation cannot
                // happen; treat as numerical trouble.
                return Err(SolveError::Numerical {
                    context: format!("MIP `{}`", p.name()),
                    detail: "unbounded node below a bounded root".into(),
                });
            }
            SolveStatus::IterationLimit => {
                hit_limit = true;
                break;
            }
            SolveStatus::Optimal => {}
        }
        let bound = res.objective;
        if let Some((_, inc_obj)) = &incumbent {
            if bound >= inc_obj - PRUNE_TOL * (1.0 + inc_obj.abs()) {
                continue;
            }
        }
        if let Some(c) = cutoff {
            if bound > c + 1e-7 * (1.0 + c.abs()) {
                continue;
            }
        }

        // Most fractional binary, ties to the lowest index.
        let mut branch: Option<(usize, f64, f64)> = None; // (var, value, dist to 0.5)
        for &j in &int_vars {
            let v = res.x[j];
            let frac = v - v.floor();
            if frac > INT_TOL && frac < 1.0 - INT_TOL {
                let dist = (frac - 0.5).abs();
                match branch {
                    Some((_, _, best)) if best <= dist => {}
                    _ => branch = Some((j, v, dist)),
                }
            }
        }

        match branch {
            None => {
                // Integer feasible: snap and keep if better.
                let mut x = res.x[..form.n_struct].to_vec();
                for &j in &int_vars {
                    x[j] = x[j].round();
                }
                let obj: f64 = x
                    .iter()
                    .zip(&form.cost)
                    .map(|(xi, ci)| xi * ci)
                    .sum();
                let better = match &incumbent {
                    None => true,
                    Some((_, best)) => obj < *best,
                };
                if better {
                    incumbent = Some((x, obj));
                }
            }
            Some((j, v, _)) => {
                let mut down = Node {
                    lo: node.lo.clone(),
                    up: node.up.clone(),
                    bound,
                    depth: node.depth + 1,
                    id: next_id,
                };
                next_id += 1;
                down.up[j] = v.floor();
                let mut up_child = Node {
                    lo: node.lo,
                    up: node.up,
                    bound,
                    depth: node.depth + 1,
                    id: next_id,
                };
                next_id += 1;
                up_child.lo[j] = v.ceil();

                if incumbent.is_none() {
                    // Dive toward the nearest integer first (popped last in).
                    let frac = v - v.floor();
                    if frac >= 0.5 {
                        dive.push(down);
                        dive.push(up_child);
                    } else {
                        dive.push(up_child);
                        dive.push(down);
                    }
                } else {
                    heap.push(HeapEntry(down));
                    heap.push(HeapEntry(up_child));
                }
            }
        }
    }

    if root_unbounded {
        return Ok(SolveOutcome::status_only(SolveStatus::Unbounded));
    }

    match incumbent {
        Some((x, obj)) => {
            let viol = max_violation(p, &x);
            let scale = p.rows().iter().map(|r| r.rhs.abs()).fold(1.0f64, f64::max);
            if viol > 1e-6 * scale {
                return Err(SolveError::Numerical {
                    context: format!("MIP `{}`", p.name()),
                    detail: format!("incumbent residual {viol:.3e} exceeds tolerance"),
                });
            }
            Ok(SolveOutcome {
                status: if hit_limit {
                    SolveStatus::IterationLimit
                } else {
                    SolveStatus::Optimal
                },
                objective: Some(sign * obj),
                primal: Some(x),
                duals: None,
                reduced_costs: None,
            })
        }
        None => Ok(SolveOutcome::status_only(if hit_limit {
            SolveStatus::IterationLimit
        } else {
            SolveStatus::Infeasible
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{MathProgram, RowSense, Sense};

    #[test]
    fn max_single_binary() {
        let mut p = MathProgram::new("t", Sense::Maximize);
        let b = p.add_binary("b");
        p.set_objective_coeff(b, 1.0);
        let out = solve_mip(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective_value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn knapsack_five_items_matches_enumeration() {
        // max 5a + 4b + 3c + 7d + 2e s.t. 4a + 3b + 2c + 6d + e <= 9
        let values = [5.0, 4.0, 3.0, 7.0, 2.0];
        let weights = [4.0, 3.0, 2.0, 6.0, 1.0];
        let mut p = MathProgram::new("knap", Sense::Maximize);
        let vars: Vec<_> = (0..5).map(|i| p.add_binary(format!("x{i}"))).collect();
        for (i, v) in vars.iter().enumerate() {
            p.set_objective_coeff(*v, values[i]);
        }
        let terms: Vec<_> = vars.iter().zip(weights).map(|(v, w)| (*v, w)).collect();
        p.add_row("cap", RowSense::Le, 9.0, &terms);
        let out = solve_mip(&p).unwrap();

        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..32 {
            let w: f64 = (0..5).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
            if w <= 9.0 {
                let v: f64 = (0..5).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).sum();
                best = best.max(v);
            }
        }
        assert!((out.objective_value() - best).abs() < 1e-9);
    }

    #[test]
    fn continuous_only_defers_to_lp() {
        let mut p = MathProgram::new("t", Sense::Minimize);
        let x = p.add_var("x", 0.0, 10.0);
        p.set_objective_coeff(x, 1.0);
        p.add_row("r", RowSense::Ge, 2.5, &[(x, 1.0)]);
        let mip = solve_mip(&p).unwrap();
        let lp = crate::simplex::solve_lp(&p).unwrap();
        assert_eq!(mip.objective_value(), lp.objective_value());
        assert!(mip.duals.is_some());
    }

    #[test]
    fn infeasible_integer_program() {
        let mut p = MathProgram::new("t", Sense::Maximize);
        let a = p.add_binary("a");
        let b = p.add_binary("b");
        p.add_row("need", RowSense::Ge, 3.0, &[(a, 1.0), (b, 1.0)]);
        let out = solve_mip(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn mixed_continuous_binary() {
        // max 3b + x s.t. x <= 2b, x <= 1.5 -> b=1, x=1.5, obj 4.5
        let mut p = MathProgram::new("t", Sense::Maximize);
        let b = p.add_binary("b");
        let x = p.add_var("x", 0.0, 1.5);
        p.set_objective_coeff(b, 3.0);
        p.set_objective_coeff(x, 1.0);
        p.add_row("link", RowSense::Le, 0.0, &[(x, 1.0), (b, -2.0)]);
        let out = solve_mip(&p).unwrap();
        assert!((out.objective_value() - 4.5).abs() < 1e-9);
    }

    #[test]
    fn node_limit_reports_iteration_limit() {
        // A problem that needs branching with a node limit of 1.
        let mut p = MathProgram::new("t", Sense::Maximize);
        let vars: Vec<_> = (0..6).map(|i| p.add_binary(format!("x{i}"))).collect();
        for v in &vars {
            p.set_objective_coeff(*v, 1.0);
        }
        let terms: Vec<_> = vars.iter().map(|v| (*v, 1.0)).collect();
        p.add_row("half", RowSense::Le, 2.5, &terms);
        let out = solve_mip_with(
            &p,
            MipOptions {
                node_limit: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.status, SolveStatus::IterationLimit);
    }
}
