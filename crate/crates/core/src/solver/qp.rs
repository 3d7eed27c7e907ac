//! Primal active-set method for strictly convex quadratic programs.

use super::linalg::solve_dense;
use super::lp::solve_lp;
use super::{Constraint, LinearProgram, QuadraticProgram, SolverError};

/// Minimizer of `qp`. Without constraints or finite bounds this is the
/// solution of `Q x = -c`; otherwise it starts from a feasible vertex and
/// walks the active set until the KKT multipliers are non-negative.
pub fn solve_qp(qp: &QuadraticProgram) -> Result<Vec<f64>, SolverError> {
    qp.check()?;
    let n = qp.dim();
    let rows = inequality_rows(qp);
    if rows.is_empty() {
        let rhs: Vec<f64> = qp.c.iter().map(|v| -v).collect();
        return solve_dense(&qp.q, &rhs).ok_or(SolverError::Singular);
    }

    let feasibility = LinearProgram {
        objective: vec![0.0; n],
        constraints: qp.constraints.clone(),
        lower_bounds: qp.lower_bounds.clone(),
        upper_bounds: qp.upper_bounds.clone(),
    };
    let mut x = solve_lp(&feasibility).map_err(|e| match e {
        SolverError::Unbounded => SolverError::Infeasible,
        e => e,
    })?;

    let mut working: Vec<usize> = Vec::new();
    let budget = 50 * (n + rows.len()) + 100;
    for _ in 0..budget {
        let g: Vec<f64> = (0..n)
            .map(|i| qp.q[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + qp.c[i])
            .collect();
        let (step, lambdas) = equality_step(qp, &rows, &working, &g)?;
        let xnorm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pnorm = step.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        if pnorm <= 1e-12 * (1.0 + xnorm) {
            let most_negative = lambdas
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .filter(|(_, &l)| l < -1e-11);
            match most_negative {
                None => return Ok(x),
                Some((k, _)) => {
                    working.remove(k);
                    continue;
                }
            }
        }

        let mut alpha = 1.0;
        let mut blocking = None;
        for (i, row) in rows.iter().enumerate() {
            if working.contains(&i) {
                continue;
            }
            let ap = row.eval(&step);
            if ap < -1e-14 {
                let t = ((row.bound - row.eval(&x)) / ap).max(0.0);
                if t < alpha {
                    alpha = t;
                    blocking = Some(i);
                }
            }
        }
        for (xi, pi) in x.iter_mut().zip(&step) {
            *xi += alpha * pi;
        }
        if let Some(i) = blocking {
            working.push(i);
        }
    }
    Err(SolverError::IterationLimit)
}

/// Constraints and finite bounds, all as `a · x ≥ b`.
fn inequality_rows(qp: &QuadraticProgram) -> Vec<Constraint> {
    let n = qp.dim();
    let unit = |i: usize, s: f64| {
        let mut e = vec![0.0; n];
        e[i] = s;
        e
    };
    let mut rows = qp.constraints.clone();
    for (i, &lb) in qp.lower_bounds.iter().enumerate() {
        if lb.is_finite() {
            rows.push(Constraint::at_least(unit(i, 1.0), lb));
        }
    }
    if let Some(ub) = &qp.upper_bounds {
        for (i, &u) in ub.iter().enumerate() {
            if u.is_finite() {
                rows.push(Constraint::at_least(unit(i, -1.0), -u));
            }
        }
    }
    rows
}

/// Solves `[Q Aᵀ; A 0] [p; -λ] = [-g; 0]` for the working rows `A`.
fn equality_step(
    qp: &QuadraticProgram,
    rows: &[Constraint],
    working: &[usize],
    g: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let n = qp.dim();
    let w = working.len();
    let mut kkt = vec![vec![0.0; n + w]; n + w];
    for (line, q) in kkt.iter_mut().zip(&qp.q) {
        line[..n].copy_from_slice(q);
    }
    for (k, &r) in working.iter().enumerate() {
        let coeffs = &rows[r].coeffs;
        for (line, &a) in kkt.iter_mut().zip(coeffs) {
            line[n + k] = a;
        }
        kkt[n + k][..n].copy_from_slice(coeffs);
    }
    let mut rhs: Vec<f64> = g.iter().map(|v| -v).collect();
    rhs.extend(std::iter::repeat_n(0.0, w));
    let sol = solve_dense(&kkt, &rhs).ok_or(SolverError::Singular)?;
    let step = sol[..n].to_vec();
    let lambdas = sol[n..].iter().map(|v| -v).collect();
    Ok((step, lambdas))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Vec<Vec<f64>> {
        (0..d.len())
            .map(|i| {
                let mut r = vec![0.0; d.len()];
                r[i] = d[i];
                r
            })
            .collect()
    }

    #[test]
    fn active_lower_constraint() {
        // min x² s.t. x ≥ 3
        let mut qp = QuadraticProgram::new(diag(&[2.0]), vec![0.0]);
        qp.constraints.push(Constraint::at_least(vec![1.0], 3.0));
        let x = solve_qp(&qp).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unconstrained_stationary_point() {
        // (x-1)² + (y-2)² = x² + y² - 2x - 4y + 5
        let qp = QuadraticProgram::new(diag(&[2.0, 2.0]), vec![-2.0, -4.0]);
        let x = solve_qp(&qp).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_halfplane() {
        let mut qp = QuadraticProgram::new(diag(&[2.0, 2.0]), vec![0.0, 0.0]);
        qp.constraints
            .push(Constraint::at_least(vec![1.0, 1.0], 2.0));
        let x = solve_qp(&qp).unwrap();
        assert!(
            (x[0] - 1.0).abs() < 1e-10 && (x[1] - 1.0).abs() < 1e-10,
            "{x:?}"
        );
    }

    #[test]
    fn inactive_constraint_is_ignored() {
        let mut qp = QuadraticProgram::new(diag(&[2.0, 2.0]), vec![-2.0, -4.0]);
        qp.constraints
            .push(Constraint::at_least(vec![1.0, 1.0], -5.0));
        qp.lower_bounds = vec![0.0, 0.0];
        let x = solve_qp(&qp).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_qp() {
        let mut qp = QuadraticProgram::new(diag(&[1.0]), vec![0.0]);
        qp.constraints.push(Constraint::at_least(vec![1.0], 2.0));
        qp.upper_bounds = Some(vec![1.0]);
        assert_eq!(solve_qp(&qp), Err(SolverError::Infeasible));
    }

    #[test]
    fn singular_unconstrained() {
        let qp = QuadraticProgram::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 0.0]);
        assert_eq!(solve_qp(&qp), Err(SolverError::Singular));
    }
}
