//! Brute-force search over radii restricted to multiples of a step.

use rayon::prelude::*;

use crate::coverage::decide_with;
use crate::geom::{Point, Pupil, PupilConfig};

use super::{OptimizeError, OptimizerConfig};

const GRID_LIMIT: f64 = 1e8;

/// Number of radius vectors the search may visit: `(K + 1)^n` with
/// `K = ⌈R / 2θ⌉`.
pub fn grid_size(n: usize, objective_radius: f64, theta: f64) -> f64 {
    (steps(objective_radius, theta) as f64 + 1.0).powi(n as i32)
}

fn steps(objective_radius: f64, theta: f64) -> usize {
    (objective_radius / (2.0 * theta) - 1e-9).ceil().max(0.0) as usize
}

/// The covering configuration of least total radius whose radii are all
/// multiples of `opts.theta`. Among equal sums the lexicographically
/// smallest radius vector wins.
pub fn exhaustive_search(
    centers: &[Point],
    objective_radius: f64,
    opts: &OptimizerConfig,
) -> Result<PupilConfig, OptimizeError> {
    opts.validate()?;
    let n = centers.len();
    let size = grid_size(n, objective_radius, opts.theta);
    if size > GRID_LIMIT {
        return Err(OptimizeError::SearchSpaceTooLarge(size));
    }
    // Validates the centers and the objective radius once.
    PupilConfig::new(
        centers.iter().map(|&c| Pupil::new(c, 0.0)).collect(),
        objective_radius,
    )?;
    let k_max = steps(objective_radius, opts.theta);
    let theta = opts.theta;

    let admissible = |ks: &[usize]| -> Option<PupilConfig> {
        let radii: Vec<f64> = ks.iter().map(|&k| k as f64 * theta).collect();
        if radii.iter().any(|&r| r < opts.min_radius - 1e-12) {
            return None;
        }
        if let Some(max) = opts.max_radius {
            if radii.iter().any(|&r| r > max + 1e-12) {
                return None;
            }
        }
        if opts.forbid_overlap {
            for i in 0..n {
                for j in i + 1..n {
                    if radii[i] + radii[j] > centers[i].dist(centers[j]) + 1e-12 {
                        return None;
                    }
                }
            }
        }
        let cfg = PupilConfig::new(
            centers
                .iter()
                .zip(&radii)
                .map(|(&c, &r)| Pupil::new(c, r))
                .collect(),
            objective_radius,
        )
        .ok()?;
        decide_with(&cfg, &opts.tolerances).0.then_some(cfg)
    };

    for total in 0..=n * k_max {
        let level = compositions(n, total, k_max);
        if let Some(found) = level.par_iter().find_map_first(|ks| admissible(ks)) {
            return Ok(found);
        }
    }
    Err(OptimizeError::Infeasible)
}

/// All vectors of `n` integers in `0..=cap` summing to `total`, in
/// lexicographic order.
fn compositions(n: usize, total: usize, cap: usize) -> Vec<Vec<usize>> {
    fn fill(
        prefix: &mut Vec<usize>,
        left: usize,
        slots: usize,
        cap: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if slots == 0 {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let rest_cap = (slots - 1) * cap;
        let lo = left.saturating_sub(rest_cap);
        for k in lo..=left.min(cap) {
            prefix.push(k);
            fill(prefix, left - k, slots - 1, cap, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n), total, n, cap, &mut out);
    out
}
