//! Optimizers over pupil radii and positions.
//!
//! Each optimizer is also available as a named [`Strategy`] through
//! [`StrategyRegistry`], so front ends can pick one (or chain several) at
//! run time.

mod exhaustive;
mod radii;
mod registry;
mod relocate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{ConfigError, PupilConfig, Tolerances};
use crate::solver::SolverError;

pub use exhaustive::{exhaustive_search, grid_size};
pub use radii::{minimize, minimize_area, minimize_sum_radii, RadiusCost, SumOfRadii, TotalArea};
pub use registry::{Pipeline, Strategy, StrategyRegistry};
pub use relocate::{fit_centers, move_pupils, relocation_objective, witness_terms, PairTerm};

/// Which degree of freedom pins the relocation problem, whose objective
/// only sees differences between centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    FixFirstCenter,
    #[default]
    FixCentroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// The radius loop stops once an iteration improves the cost by less.
    pub epsilon: f64,
    /// Radius step of the exhaustive search.
    pub theta: f64,
    pub max_iterations: usize,
    pub min_radius: f64,
    pub max_radius: Option<f64>,
    /// Keep every pair of pupils disjoint.
    pub forbid_overlap: bool,
    pub relocation_iterations: usize,
    pub gauge: Gauge,
    pub tolerances: Tolerances,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            theta: 0.05,
            max_iterations: 100,
            min_radius: 0.0,
            max_radius: None,
            forbid_overlap: false,
            relocation_iterations: 25,
            gauge: Gauge::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |msg: String| Err(OptimizeError::InvalidOptions(msg));
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.min_radius.is_finite() && self.min_radius >= 0.0) {
            return bad(format!(
                "min_radius must be non-negative, got {}",
                self.min_radius
            ));
        }
        if let Some(max) = self.max_radius {
            if !(max.is_finite() && max >= self.min_radius) {
                return bad(format!(
                    "max_radius {max} is below min_radius {}",
                    self.min_radius
                ));
            }
        }
        if !(self.tolerances.tau.is_finite() && self.tolerances.tau > 0.0) {
            return bad(format!(
                "tolerance must be positive, got {}",
                self.tolerances.tau
            ));
        }
        if self.tolerances.boundary_samples < 8 {
            return bad("at least 8 boundary samples are needed".to_string());
        }
        Ok(())
    }
}

/// State of the configuration after one optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub sum_of_radii: f64,
    pub total_area: f64,
    pub covered: bool,
    /// The quantity the optimizer minimizes: sum of radii, area, or the
    /// relocation least-squares residual.
    pub objective: f64,
}

impl TraceEntry {
    pub fn of(cfg: &PupilConfig, covered: bool, objective: f64) -> Self {
        Self {
            sum_of_radii: cfg.sum_of_radii(),
            total_area: cfg.total_area(),
            covered,
            objective,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: Vec<TraceEntry>,
    pub final_config: PupilConfig,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("the radius constraints cannot be met while covering the objective")]
    Infeasible,
    #[error("no convergence within {0} iterations")]
    IterationLimit(usize),
    #[error("the search grid has {0} points, more than the limit of 1e8")]
    SearchSpaceTooLarge(f64),
    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error("solver failure: {0}")]
    Solver(SolverError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl From<SolverError> for OptimizeError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Infeasible => OptimizeError::Infeasible,
            e => OptimizeError::Solver(e),
        }
    }
}
