//! Moving pupils with fixed radii so each ACS disk drifts toward the
//! witness points of its cell.

use crate::apollonius::vertex_sets;
use crate::coverage::{decide_with, tied_labels};
use crate::geom::{build_acs, Point, PupilConfig, Tolerances};
use crate::solver::{solve_qp, QuadraticProgram, SolverError};

use super::{Gauge, OptimizeError, OptimizerConfig, OptimizerTrace, TraceEntry};

/// One least-squares term: the difference `c_i - c_j` should sit on `point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub point: Point,
}

/// Witness points of every off-diagonal label. Diagonal labels are dropped
/// since `c_i - c_i` cannot move.
pub fn witness_terms(cfg: &PupilConfig, tol: &Tolerances) -> Vec<PairTerm> {
    let acs = build_acs(cfg, tol);
    let sets = vertex_sets(&acs, cfg.objective_radius(), tol);
    let mut terms = Vec::new();
    for (k, set) in sets.iter().enumerate() {
        for (i, j) in tied_labels(cfg, &acs, k, tol) {
            if i == j {
                continue;
            }
            terms.extend(set.points.iter().map(|vp| PairTerm {
                i,
                j,
                point: vp.point,
            }));
        }
    }
    terms
}

/// `Σ ‖(c_i - c_j) - p‖²` over the terms.
pub fn relocation_objective(centers: &[Point], terms: &[PairTerm]) -> f64 {
    terms
        .iter()
        .map(|t| (centers[t.i] - centers[t.j] - t.point).norm_sq())
        .sum()
}

/// Exact minimizer of [`relocation_objective`] starting from `centers`.
///
/// Only differences inside a connected group of pupils are determined, so
/// each group is pinned by the gauge: its centroid or its first center stays
/// where it was. Pupils that appear in no term do not move.
pub fn fit_centers(
    centers: &[Point],
    terms: &[PairTerm],
    gauge: Gauge,
) -> Result<Vec<Point>, SolverError> {
    let n = centers.len();
    let mut laplacian = vec![vec![0.0; n]; n];
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for t in terms {
        laplacian[t.i][t.i] += 1.0;
        laplacian[t.j][t.j] += 1.0;
        laplacian[t.i][t.j] -= 1.0;
        laplacian[t.j][t.i] -= 1.0;
        bx[t.i] += t.point.x;
        bx[t.j] -= t.point.x;
        by[t.i] += t.point.y;
        by[t.j] -= t.point.y;
        let (a, b) = (root(&mut parent, t.i), root(&mut parent, t.j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; n];
    for k in 0..n {
        let r = root(&mut parent, k);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[r]].push(k);
    }

    let mut q = laplacian;
    let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
    for members in &groups {
        let pinned: Vec<usize> = match gauge {
            Gauge::FixCentroid => members.clone(),
            Gauge::FixFirstCenter => vec![members[0]],
        };
        let (sx, sy) = pinned.iter().fold((0.0, 0.0), |(x, y), &k| {
            (x + centers[k].x, y + centers[k].y)
        });
        for &a in &pinned {
            for &b in &pinned {
                q[a][b] += 1.0;
            }
            gx[a] += sx;
            gy[a] += sy;
        }
    }
    for row in &mut q {
        for v in row.iter_mut() {
            *v *= 2.0;
        }
    }
    let solve = |b: &[f64], g: &[f64]| {
        let c = b.iter().zip(g).map(|(b, g)| -2.0 * (b + g)).collect();
        solve_qp(&QuadraticProgram::new(q.clone(), c))
    };
    let xs = solve(&bx, &gx)?;
    let ys = solve(&by, &gy)?;
    Ok(xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Point::new(x, y))
        .collect())
}

/// Repeatedly refits the centers to the current witness points for the
/// configured number of rounds. Coverage is recorded, not enforced.
pub fn move_pupils(
    cfg: &PupilConfig,
    opts: &OptimizerConfig,
) -> Result<OptimizerTrace, OptimizeError> {
    opts.validate()?;
    let tol = &opts.tolerances;
    let mut current = cfg.clone();
    let mut iterations = Vec::new();
    let mut warnings = Vec::new();
    for _ in 0..opts.relocation_iterations {
        let terms = witness_terms(&current, tol);
        if terms.is_empty() {
            warnings.push(
                "no witness points outside the origin cell; centers left unchanged".to_string(),
            );
            break;
        }
        let centers = fit_centers(&current.centers(), &terms, opts.gauge)?;
        let objective = relocation_objective(&centers, &terms);
        current = current.with_centers(&centers)?;
        let covered = decide_with(&current, tol).0;
        iterations.push(TraceEntry::of(&current, covered, objective));
    }
    Ok(OptimizerTrace {
        iterations,
        final_config: current,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pupil;

    #[test]
    fn exact_terms_are_a_fixed_point() {
        let centers = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(-0.3, 0.8),
        ];
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    terms.push(PairTerm {
                        i,
                        j,
                        point: centers[i] - centers[j],
                    });
                }
            }
        }
        for gauge in [Gauge::FixCentroid, Gauge::FixFirstCenter] {
            let fitted = fit_centers(&centers, &terms, gauge).unwrap();
            for (a, b) in fitted.iter().zip(&centers) {
                assert!(a.approx_eq(*b, 1e-12), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn single_pupil_stays_put() {
        let cfg = PupilConfig::new(vec![Pupil::at(0.3, -0.2, 0.2)], 1.0).unwrap();
        let t = move_pupils(&cfg, &OptimizerConfig::default()).unwrap();
        assert_eq!(t.final_config, cfg);
        assert!(t.iterations.is_empty());
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn gauge_pins_the_centroid_or_first_center() {
        let centers = [Point::new(0.0, 0.0), Point::new(2.0, 0.0)];
        let terms = [PairTerm {
            i: 1,
            j: 0,
            point: Point::new(1.0, 1.0),
        }];
        let fitted = fit_centers(&centers, &terms, Gauge::FixCentroid).unwrap();
        assert!((fitted[1] - fitted[0]).approx_eq(Point::new(1.0, 1.0), 1e-12));
        assert!((fitted[0] + fitted[1]).approx_eq(Point::new(2.0, 0.0), 1e-12));
        let fitted = fit_centers(&centers, &terms, Gauge::FixFirstCenter).unwrap();
        assert!(fitted[0].approx_eq(Point::ORIGIN, 1e-12));
        assert!(fitted[1].approx_eq(Point::new(1.0, 1.0), 1e-12));
    }

    #[test]
    fn fit_never_increases_the_objective() {
        let cfg = PupilConfig::new(
            (0..5)
                .map(|k| Pupil::at(-0.8 + 0.4 * k as f64, 0.02 * k as f64, 0.08))
                .collect(),
            1.0,
        )
        .unwrap();
        let tol = Tolerances::default();
        let terms = witness_terms(&cfg, &tol);
        assert!(!terms.is_empty());
        let before = relocation_objective(&cfg.centers(), &terms);
        let fitted = fit_centers(&cfg.centers(), &terms, Gauge::FixCentroid).unwrap();
        assert!(relocation_objective(&fitted, &terms) <= before + 1e-12);
    }
}
