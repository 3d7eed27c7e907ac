//! Small dense linear and convex quadratic programs.
//!
//! Both solvers are exact-pivoting, deterministic, and meant for the problem
//! sizes the radius optimizers produce: a few dozen variables and a few
//! hundred inequality rows.

mod linalg;
mod lp;
mod qp;

use thiserror::Error;

pub use linalg::solve_dense;
pub use lp::solve_lp;
pub use qp::solve_qp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("the program is infeasible")]
    Infeasible,
    #[error("the program is unbounded")]
    Unbounded,
    #[error("the linear system is singular")]
    Singular,
    #[error("the solver exceeded its iteration budget")]
    IterationLimit,
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        got: usize,
        expected: usize,
    },
}

/// The inequality `coeffs · x ≥ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl Constraint {
    pub fn at_least(coeffs: Vec<f64>, bound: f64) -> Self {
        Self { coeffs, bound }
    }

    /// `coeffs · x ≤ bound`, stored negated.
    pub fn at_most(coeffs: Vec<f64>, bound: f64) -> Self {
        Self {
            coeffs: coeffs.into_iter().map(|v| -v).collect(),
            bound: -bound,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// How far `x` falls short of the constraint (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        (self.bound - self.eval(x)).max(0.0)
    }
}

/// Minimize `objective · x` subject to the constraints and
/// `lower_bounds ≤ x ≤ upper_bounds`. A lower bound of `-∞` frees the
/// variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<f64>,
    pub upper_bounds: Option<Vec<f64>>,
}

impl LinearProgram {
    /// Non-negative variables, no constraints yet.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![0.0; n],
            upper_bounds: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        bounds_violation(&self.lower_bounds, self.upper_bounds.as_deref(), x).max(
            self.constraints
                .iter()
                .map(|c| c.violation(x))
                .fold(0.0, f64::max),
        )
    }

    fn check(&self) -> Result<(), SolverError> {
        check_rows(
            self.dim(),
            &self.constraints,
            &self.lower_bounds,
            self.upper_bounds.as_deref(),
        )
    }
}

/// Minimize `½ xᵀ Q x + c · x` under the same constraint shapes as
/// [`LinearProgram`]. `Q` must be symmetric positive definite whenever
/// constraints are present, and nonsingular otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProgram {
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<f64>,
    pub upper_bounds: Option<Vec<f64>>,
}

impl QuadraticProgram {
    /// Free variables, no constraints.
    pub fn new(q: Vec<Vec<f64>>, c: Vec<f64>) -> Self {
        let n = c.len();
        Self {
            q,
            c,
            constraints: Vec::new(),
            lower_bounds: vec![f64::NEG_INFINITY; n],
            upper_bounds: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let quad: f64 = self
            .q
            .iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        0.5 * quad + self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        bounds_violation(&self.lower_bounds, self.upper_bounds.as_deref(), x).max(
            self.constraints
                .iter()
                .map(|c| c.violation(x))
                .fold(0.0, f64::max),
        )
    }

    fn check(&self) -> Result<(), SolverError> {
        let n = self.dim();
        for (row, r) in self.q.iter().enumerate() {
            if r.len() != n {
                return Err(SolverError::Dimension {
                    row,
                    got: r.len(),
                    expected: n,
                });
            }
        }
        if self.q.len() != n {
            return Err(SolverError::Dimension {
                row: self.q.len(),
                got: self.q.len(),
                expected: n,
            });
        }
        check_rows(
            n,
            &self.constraints,
            &self.lower_bounds,
            self.upper_bounds.as_deref(),
        )
    }
}

fn bounds_violation(lb: &[f64], ub: Option<&[f64]>, x: &[f64]) -> f64 {
    let low = lb
        .iter()
        .zip(x)
        .map(|(l, v)| (l - v).max(0.0))
        .fold(0.0, f64::max);
    let high = ub.map_or(0.0, |ub| {
        ub.iter()
            .zip(x)
            .map(|(u, v)| (v - u).max(0.0))
            .fold(0.0, f64::max)
    });
    low.max(high)
}

fn check_rows(
    n: usize,
    rows: &[Constraint],
    lb: &[f64],
    ub: Option<&[f64]>,
) -> Result<(), SolverError> {
    for (row, c) in rows.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(SolverError::Dimension {
                row,
                got: c.coeffs.len(),
                expected: n,
            });
        }
    }
    if lb.len() != n {
        return Err(SolverError::Dimension {
            row: rows.len(),
            got: lb.len(),
            expected: n,
        });
    }
    if let Some(ub) = ub {
        if ub.len() != n {
            return Err(SolverError::Dimension {
                row: rows.len() + 1,
                got: ub.len(),
                expected: n,
            });
        }
    }
    Ok(())
}
