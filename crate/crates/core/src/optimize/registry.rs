//! Optimizers selectable by name.

use std::collections::BTreeMap;

use crate::coverage::{alpha_star_with, decide_with};
use crate::geom::PupilConfig;

use super::{
    exhaustive_search, minimize_area, minimize_sum_radii, move_pupils, OptimizeError,
    OptimizerConfig, OptimizerTrace, TraceEntry,
};

pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    fn description(&self) -> &str;

    fn run(
        &self,
        cfg: &PupilConfig,
        opts: &OptimizerConfig,
    ) -> Result<OptimizerTrace, OptimizeError>;
}

type StrategyFn = fn(&PupilConfig, &OptimizerConfig) -> Result<OptimizerTrace, OptimizeError>;

/// A strategy backed by a plain function.
struct FnStrategy {
    name: &'static str,
    description: &'static str,
    run: StrategyFn,
}

impl Strategy for FnStrategy {
    fn name(&self) -> &str {
        self.name
    }

    fn description(&self) -> &str {
        self.description
    }

    fn run(
        &self,
        cfg: &PupilConfig,
        opts: &OptimizerConfig,
    ) -> Result<OptimizerTrace, OptimizeError> {
        (self.run)(cfg, opts)
    }
}

fn uniform_enlargement(
    cfg: &PupilConfig,
    opts: &OptimizerConfig,
) -> Result<OptimizerTrace, OptimizeError> {
    opts.validate()?;
    let tol = &opts.tolerances;
    let alpha = alpha_star_with(cfg, tol);
    let radii: Vec<f64> = cfg
        .radii()
        .iter()
        .map(|r| (r + 0.5 * alpha).max(0.0))
        .collect();
    let next = cfg.with_radii(&radii)?;
    let covered = decide_with(&next, tol).0;
    Ok(OptimizerTrace {
        iterations: vec![TraceEntry::of(&next, covered, alpha)],
        final_config: next,
        warnings: Vec::new(),
    })
}

fn grid_search(cfg: &PupilConfig, opts: &OptimizerConfig) -> Result<OptimizerTrace, OptimizeError> {
    let found = exhaustive_search(&cfg.centers(), cfg.objective_radius(), opts)?;
    Ok(OptimizerTrace {
        iterations: vec![TraceEntry::of(&found, true, found.sum_of_radii())],
        final_config: found,
        warnings: Vec::new(),
    })
}

/// Several strategies run back to back, each starting from the previous
/// one's final configuration.
pub struct Pipeline<'a> {
    stages: Vec<&'a dyn Strategy>,
}

impl Pipeline<'_> {
    pub fn run(
        &self,
        cfg: &PupilConfig,
        opts: &OptimizerConfig,
    ) -> Result<OptimizerTrace, OptimizeError> {
        let mut out = OptimizerTrace {
            iterations: Vec::new(),
            final_config: cfg.clone(),
            warnings: Vec::new(),
        };
        for stage in &self.stages {
            let t = stage.run(&out.final_config, opts)?;
            out.iterations.extend(t.iterations);
            out.warnings.extend(
                t.warnings
                    .into_iter()
                    .map(|w| format!("{}: {w}", stage.name())),
            );
            out.final_config = t.final_config;
        }
        Ok(out)
    }
}

pub struct StrategyRegistry {
    strategies: BTreeMap<String, Box<dyn Strategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            strategies: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        let builtins: [(&'static str, &'static str, StrategyFn); 5] = [
            (
                "alpha",
                "grow every pupil by the same amount until the objective is covered",
                uniform_enlargement,
            ),
            (
                "minsum",
                "minimize the sum of radii with centers fixed",
                minimize_sum_radii,
            ),
            (
                "minarea",
                "minimize the total pupil area with centers fixed",
                minimize_area,
            ),
            (
                "move",
                "move pupils toward their cells' witness points with radii fixed",
                move_pupils,
            ),
            (
                "exhaustive",
                "search radii on a grid of multiples of theta",
                grid_search,
            ),
        ];
        for (name, description, run) in builtins {
            r.register(Box::new(FnStrategy {
                name,
                description,
                run,
            }));
        }
        r
    }

    /// Adds or replaces a strategy under its own name.
    pub fn register(&mut self, strategy: Box<dyn Strategy>) {
        self.strategies
            .insert(strategy.name().to_string(), strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Strategy> {
        self.strategies.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.strategies.keys().map(String::as_str)
    }

    pub fn describe(&self) -> impl Iterator<Item = (&str, &str)> {
        self.strategies
            .values()
            .map(|s| (s.name(), s.description()))
    }

    /// Parses `"move+minarea"` style specs into a pipeline.
    pub fn pipeline(&self, chain: &str) -> Result<Pipeline<'_>, OptimizeError> {
        let stages = chain
            .split('+')
            .map(|name| {
                let name = name.trim();
                self.get(name)
                    .ok_or_else(|| OptimizeError::UnknownStrategy(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Pipeline { stages })
    }

    pub fn run(
        &self,
        chain: &str,
        cfg: &PupilConfig,
        opts: &OptimizerConfig,
    ) -> Result<OptimizerTrace, OptimizeError> {
        self.pipeline(chain)?.run(cfg, opts)
    }
}
