//! Brute-force reference solvers used to certify the simplex and
//! branch-and-bound engines on small instances. Deliberately independent of
//! the solver internals: vertices come from solving small dense linear
//! systems over explicit hyperplane subsets.

use crate::error::SolveError;
use crate::program::{MathProgram, RowSense, Sense, VarKind};

const TOL: f64 = 1e-7;

/// Best objective over all vertices of the feasible polytope.
///
/// Requires every variable to be continuous with finite bounds, which makes
/// the feasible set a polytope whose optimum (if any) sits on a vertex.
/// Returns `None` when no feasible vertex exists.
pub fn best_vertex_objective(p: &MathProgram) -> Option<f64> {
    let n = p.num_vars();
    assert!(
        p.vars()
            .iter()
            .all(|v| v.kind == VarKind::Continuous && v.lower.is_finite() && v.upper.is_finite()),
        "vertex enumeration needs finite boxes on continuous variables"
    );

    // Hyperplane pool: every row as equality, plus both bound planes per var.
    enum Plane {
        Row(usize),
        Lower(usize),
        Upper(usize),
    }
    let mut planes = Vec::new();
    for r in 0..p.num_rows() {
        planes.push(Plane::Row(r));
    }
    for j in 0..n {
        planes.push(Plane::Lower(j));
        planes.push(Plane::Upper(j));
    }

    let minimize = p.sense() == Sense::Minimize;
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();

    // Iterate over all n-subsets of the plane pool in lexicographic order.
    let total = planes.len();
    if n > total {
        return None;
    }
    loop {
        // Bound planes for the same variable are parallel; skip those subsets.
        let mut degenerate_pair = false;
        for w in subset.windows(2) {
            if let (Plane::Lower(a), Plane::Upper(b)) = (&planes[w[0]], &planes[w[1]]) {
                if a == b {
                    degenerate_pair = true;
                    break;
                }
            }
        }
        if !degenerate_pair {
            let mut a = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            for (i, &pi) in subset.iter().enumerate() {
                match &planes[pi] {
                    Plane::Row(r) => {
                        for (j, c) in &p.rows()[*r].terms {
                            a[i * n + j] = *c;
                        }
                        rhs[i] = p.rows()[*r].rhs;
                    }
                    Plane::Lower(j) => {
                        a[i * n + j] = 1.0;
                        rhs[i] = p.vars()[*j].lower;
                    }
                    Plane::Upper(j) => {
                        a[i * n + j] = 1.0;
                        rhs[i] = p.vars()[*j].upper;
                    }
                }
            }
            if let Some(x) = solve_dense(&mut a, &mut rhs, n) {
                if feasible(p, &x) {
                    let obj: f64 = p
                        .vars()
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v.objective * x[j])
                        .sum();
                    best = Some(match best {
                        None => obj,
                        Some(b) => {
                            if minimize {
                                b.min(obj)
                            } else {
                                b.max(obj)
                            }
                        }
                    });
                }
            }
        }

        // Next subset.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] != i + total - n {
                subset[i] += 1;
                for k in (i + 1)..n {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let mut piv_row = k;
        let mut piv = a[k * n + k].abs();
        for r in (k + 1)..n {
            if a[r * n + k].abs() > piv {
                piv = a[r * n + k].abs();
                piv_row = r;
            }
        }
        if piv < 1e-9 {
            return None; // singular: planes do not meet at a point
        }
        if piv_row != k {
            for c in 0..n {
                a.swap(k * n + c, piv_row * n + c);
            }
            b.swap(k, piv_row);
        }
        for r in (k + 1)..n {
            let f = a[r * n + k] / a[k * n + k];
            if f != 0.0 {
                for c in k..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut v = b[k];
        for c in (k + 1)..n {
            v -= a[k * n + c] * x[c];
        }
        x[k] = v / a[k * n + k];
    }
    Some(x)
}

fn feasible(p: &MathProgram, x: &[f64]) -> bool {
    for (j, v) in p.vars().iter().enumerate() {
        if x[j] < v.lower - TOL || x[j] > v.upper + TOL {
            return false;
        }
    }
    for row in p.rows() {
        let lhs: f64 = row.terms.iter().map(|(j, c)| c * x[*j]).sum();
        let ok = match row.sense {
            RowSense::Le => lhs <= row.rhs + TOL,
            RowSense::Ge => lhs >= row.rhs - TOL,
            RowSense::Eq => (lhs - row.rhs).abs() <= TOL,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Best objective over every assignment of the binaries, solving the
/// remaining continuous LP for each. `None` when every assignment is
/// infeasible.
pub fn exhaustive_mip_objective(p: &MathProgram) -> Result<Option<f64>, SolveError> {
    let binaries = p.binary_var_indices();
    assert!(
        binaries.len() <= 20,
        "exhaustive enumeration capped at 20 binaries"
    );
    let has_continuous = p
        .vars()
        .iter()
        .any(|v| v.kind == VarKind::Continuous);
    let minimize = p.sense() == Sense::Minimize;

    // A continuous copy with the same rows; binaries become fixed boxes.
    let mut relaxed = MathProgram::new(p.name(), p.sense());
    for var in p.vars() {
        let id = relaxed.add_var(var.name.clone(), var.lower, var.upper);
        relaxed.set_objective_coeff(id, var.objective);
    }
    for row in p.rows() {
        let terms: Vec<_> = row
            .terms
            .iter()
            .map(|(j, c)| (crate::program::VarId(*j), *c))
            .collect();
        relaxed.add_row(row.name.clone(), row.sense, row.rhs, &terms);
    }

    let mut best: Option<f64> = None;
    for mask in 0u64..(1u64 << binaries.len()) {
        let obj = if has_continuous {
            for (pos, &j) in binaries.iter().enumerate() {
                let v = if mask >> pos & 1 == 1 { 1.0 } else { 0.0 };
                relaxed.fix_var(crate::program::VarId(j), v);
            }
            let out = crate::simplex::solve_lp(&relaxed)?;
            match out.status {
                crate::program::SolveStatus::Optimal => Some(out.objective_value()),
                _ => None,
            }
        } else {
            // Pure binary: evaluate feasibility directly.
            let x: Vec<f64> = (0..p.num_vars())
                .map(|j| {
                    let pos = binaries.iter().position(|&b| b == j).unwrap();
                    if mask >> pos & 1 == 1 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            if feasible(p, &x) {
                Some(
                    p.vars()
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v.objective * x[j])
                        .sum(),
                )
            } else {
                None
            }
        };
        if let Some(o) = obj {
            best = Some(match best {
                None => o,
                Some(b) => {
                    if minimize {
                        b.min(o)
                    } else {
                        b.max(o)
                    }
                }
            });
        }
    }
    Ok(best)
}
