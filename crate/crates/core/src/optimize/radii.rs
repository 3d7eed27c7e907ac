//! Radius optimization with fixed centers.
//!
//! Each round measures, for every ACS disk, how much it must grow to cover
//! its own cell inside the objective, then picks new radii of least cost
//! whose pairwise sums meet all of those requirements at once. Once a round
//! has produced a covering configuration the old radii stay feasible, so the
//! cost can only go down from there.

use crate::coverage::{CellWitnesses, DiskAlpha};
use crate::geom::PupilConfig;
use crate::solver::{solve_lp, solve_qp, Constraint, LinearProgram, QuadraticProgram, SolverError};

use super::{OptimizeError, OptimizerConfig, OptimizerTrace, TraceEntry};

/// The cost a radius optimizer minimizes, and how to minimize it under
/// linear constraints.
pub trait RadiusCost: Sync {
    fn name(&self) -> &'static str;

    fn cost(&self, radii: &[f64]) -> f64;

    fn solve(
        &self,
        rows: Vec<Constraint>,
        lower: Vec<f64>,
        upper: Option<Vec<f64>>,
    ) -> Result<Vec<f64>, SolverError>;
}

/// `Σ ρ_i`, minimized as a linear program.
#[derive(Debug, Clone, Copy, Default)]
pub struct SumOfRadii;

impl RadiusCost for SumOfRadii {
    fn name(&self) -> &'static str {
        "sum of radii"
    }

    fn cost(&self, radii: &[f64]) -> f64 {
        radii.iter().sum()
    }

    fn solve(
        &self,
        rows: Vec<Constraint>,
        lower: Vec<f64>,
        upper: Option<Vec<f64>>,
    ) -> Result<Vec<f64>, SolverError> {
        let lp = LinearProgram {
            objective: vec![1.0; lower.len()],
            constraints: rows,
            lower_bounds: lower,
            upper_bounds: upper,
        };
        solve_lp(&lp)
    }
}

/// `π Σ ρ_i²`, minimized as a quadratic program.
#[derive(Debug, Clone, Copy, Default)]
pub struct TotalArea;

impl RadiusCost for TotalArea {
    fn name(&self) -> &'static str {
        "total area"
    }

    fn cost(&self, radii: &[f64]) -> f64 {
        std::f64::consts::PI * radii.iter().map(|r| r * r).sum::<f64>()
    }

    fn solve(
        &self,
        rows: Vec<Constraint>,
        lower: Vec<f64>,
        upper: Option<Vec<f64>>,
    ) -> Result<Vec<f64>, SolverError> {
        let n = lower.len();
        let q = (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[i] = 2.0 * std::f64::consts::PI;
                row
            })
            .collect();
        let mut qp = QuadraticProgram::new(q, vec![0.0; n]);
        qp.constraints = rows;
        qp.lower_bounds = lower;
        qp.upper_bounds = upper;
        solve_qp(&qp)
    }
}

pub fn minimize_sum_radii(
    cfg: &PupilConfig,
    opts: &OptimizerConfig,
) -> Result<OptimizerTrace, OptimizeError> {
    minimize(cfg, opts, &SumOfRadii)
}

pub fn minimize_area(
    cfg: &PupilConfig,
    opts: &OptimizerConfig,
) -> Result<OptimizerTrace, OptimizeError> {
    minimize(cfg, opts, &TotalArea)
}

/// Runs the radius loop for any cost. The stopping test is skipped after the
/// first round, which may have to grow a non-covering start, and the loop
/// only ends on a covering configuration.
pub fn minimize(
    cfg: &PupilConfig,
    opts: &OptimizerConfig,
    cost: &dyn RadiusCost,
) -> Result<OptimizerTrace, OptimizeError> {
    opts.validate()?;
    let tol = &opts.tolerances;
    let n = cfg.len();
    let centers = cfg.centers();
    let lower = vec![opts.min_radius; n];
    let upper = opts.max_radius.map(|m| vec![m; n]);

    let mut overlap_rows = Vec::new();
    if opts.forbid_overlap {
        for i in 0..n {
            for j in i + 1..n {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                a[j] = 1.0;
                overlap_rows.push(Constraint::at_most(a, centers[i].dist(centers[j])));
            }
        }
    }

    let mut current = cfg.clone();
    let mut witnesses = CellWitnesses::compute(&current, tol);
    let mut iterations = Vec::new();
    for round in 0..opts.max_iterations {
        let radii = current.radii();
        let mut rows = overlap_rows.clone();
        for ((i, j), alpha) in witnesses.label_alphas(&current, tol) {
            let DiskAlpha::Constrained(alpha) = alpha else {
                continue;
            };
            let mut a = vec![0.0; n];
            a[i] += 1.0;
            a[j] += 1.0;
            rows.push(Constraint::at_least(a, radii[i] + radii[j] + alpha));
        }
        let solved = cost.solve(rows, lower.clone(), upper.clone())?;
        let next_radii: Vec<f64> = solved.iter().map(|&r| r.max(opts.min_radius)).collect();
        let next = current.with_radii(&next_radii)?;

        witnesses = CellWitnesses::compute(&next, tol);
        let covered = witnesses.covers(&next, tol);
        let improvement = cost.cost(&radii) - cost.cost(&next_radii);
        iterations.push(TraceEntry::of(&next, covered, cost.cost(&next_radii)));
        current = next;

        if round > 0 && improvement < opts.epsilon && covered {
            return Ok(OptimizerTrace {
                iterations,
                final_config: current,
                warnings: Vec::new(),
            });
        }
    }
    Err(OptimizeError::IterationLimit(opts.max_iterations))
}
