//! Deciding whether the ACS covers the objective, and by how much it misses.
//!
//! Every cell of the Apollonius diagram is checked only at its witness points:
//! its vertices inside the objective, the crossings of its boundary with the
//! objective circle, and the point of the objective circle farthest from the
//! disk center when that point lies in the cell. Along a cell edge the
//! additive distance is unimodal, and along an arc of the objective circle it
//! peaks at the farthest point, so the largest `δ` over a cell's part of the
//! objective is always attained at one of these points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apollonius::{vertex_sets, VertexKind};
use crate::geom::{build_acs, delta_min, Acs, Label, Point, PupilConfig, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CoverageError {
    #[error("the ACS covers no neighbourhood of the origin")]
    NoCoverage,
}

/// Per-label enlargement needed for the label's disk to cover its cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DiskAlpha {
    Constrained(f64),
    /// The label's cell does not meet the objective.
    Unconstrained,
}

impl DiskAlpha {
    pub fn value(self) -> Option<f64> {
        match self {
            DiskAlpha::Constrained(v) => Some(v),
            DiskAlpha::Unconstrained => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered: bool,
    /// The worst uncovered witness when `covered` is false.
    pub witness: Option<Point>,
    pub alpha_star: f64,
    pub per_disk_alpha: BTreeMap<Label, DiskAlpha>,
    /// `None` when the ACS covers no neighbourhood of the origin.
    pub r_star: Option<f64>,
}

/// All witness points of each ACS disk's cell.
#[derive(Debug, Clone)]
pub struct CellWitnesses {
    pub acs: Acs,
    pub points: Vec<Vec<Point>>,
}

impl CellWitnesses {
    pub fn compute(cfg: &PupilConfig, tol: &Tolerances) -> Self {
        let acs = build_acs(cfg, tol);
        let radius = cfg.objective_radius();
        let sets = vertex_sets(&acs, radius, tol);
        let in_cell = |k: usize, x: Point| acs.disks[k].delta(x) <= delta_min(&acs, x).0 + tol.tau;
        let mut points = Vec::with_capacity(sets.len());
        for (k, set) in sets.into_iter().enumerate() {
            let d = &acs.disks[k];
            let mut pts = Vec::with_capacity(set.points.len() + 1);
            let far = if d.center.norm() > 0.0 {
                Some(d.center * (-radius / d.center.norm()))
            } else {
                // Every point of the circle is equally far from the origin;
                // take the middle of the widest arc the cell owns.
                let crossings: Vec<f64> = set
                    .points
                    .iter()
                    .filter(|vp| vp.kind == VertexKind::BoundaryCrossing)
                    .map(|vp| vp.point.angle())
                    .collect();
                widest_arc_midpoint(crossings, radius, |x| in_cell(k, x))
            };
            if let Some(far) = far.filter(|&x| in_cell(k, x)) {
                pts.push(far);
            }
            pts.extend(set.points.into_iter().map(|vp| vp.point));
            points.push(pts);
        }
        Self { acs, points }
    }

    /// Largest `δ` over each disk's witnesses, `None` when the cell misses
    /// the objective. Among witnesses within tolerance of the maximum the
    /// earliest is reported.
    pub fn disk_maxima(&self) -> Vec<Option<(f64, Point)>> {
        self.acs
            .disks
            .iter()
            .zip(&self.points)
            .map(|(d, pts)| first_near_max(pts.iter().map(|&p| (d.delta(p), p))))
            .collect()
    }

    /// The worst witness over all cells.
    pub fn worst(&self) -> (f64, Point) {
        first_near_max(self.disk_maxima().into_iter().flatten())
            .unwrap_or((f64::NEG_INFINITY, Point::ORIGIN))
    }

    /// Same answer as [`decide_with`] for the configuration these witnesses
    /// were computed from.
    pub fn covers(&self, cfg: &PupilConfig, tol: &Tolerances) -> bool {
        2.0 * cfg.max_radius() >= cfg.objective_radius() || self.worst().0 <= tol.tau
    }

    /// Same answer as [`per_disk_alpha_with`].
    pub fn label_alphas(&self, cfg: &PupilConfig, tol: &Tolerances) -> BTreeMap<Label, DiskAlpha> {
        alphas_from(cfg, self, tol)
    }
}

const TIE: f64 = 1e-9;

/// The maximum value, paired with the first point whose value is within
/// `TIE` of it.
fn first_near_max(items: impl Iterator<Item = (f64, Point)> + Clone) -> Option<(f64, Point)> {
    let max = items
        .clone()
        .map(|(v, _)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    items
        .into_iter()
        .find(|&(v, _)| v >= max - TIE)
        .map(|(_, p)| (max, p))
}

/// Midpoint of the longest arc of the circle of `radius` between
/// consecutive `angles` whose midpoint passes `keep`. With no angles the
/// whole circle is one arc.
fn widest_arc_midpoint(
    mut angles: Vec<f64>,
    radius: f64,
    keep: impl Fn(Point) -> bool,
) -> Option<Point> {
    use std::f64::consts::TAU;
    if angles.is_empty() {
        return Some(Point::new(radius, 0.0));
    }
    angles.sort_by(f64::total_cmp);
    let mut best: Option<(f64, Point)> = None;
    for (k, &a) in angles.iter().enumerate() {
        let b = if k + 1 < angles.len() {
            angles[k + 1]
        } else {
            angles[0] + TAU
        };
        let mid = Point::polar(radius, 0.5 * (a + b));
        if b - a > 1e-12 && keep(mid) && best.is_none_or(|(len, _)| b - a > len + 1e-12) {
            best = Some((b - a, mid));
        }
    }
    best.map(|(_, p)| p)
}

/// Labels that inherit a deduplicated disk's constraint: its own label and
/// every merged label of equal radius. Strictly smaller concentric disks
/// have empty cells.
pub fn tied_labels(cfg: &PupilConfig, acs: &Acs, disk: usize, tol: &Tolerances) -> Vec<Label> {
    let d = &acs.disks[disk];
    let p = cfg.pupils();
    let mut out = vec![d.label()];
    out.extend(
        d.merged_from
            .iter()
            .copied()
            .filter(|&(k, l)| p[k].radius + p[l].radius >= d.radius - tol.tau),
    );
    out
}

/// Whether the ACS covers the objective, with an uncovered witness if not.
pub fn decide(cfg: &PupilConfig) -> (bool, Option<Point>) {
    decide_with(cfg, &Tolerances::default())
}

pub fn decide_with(cfg: &PupilConfig, tol: &Tolerances) -> (bool, Option<Point>) {
    if 2.0 * cfg.max_radius() >= cfg.objective_radius() {
        return (true, None);
    }
    let (worst, at) = CellWitnesses::compute(cfg, tol).worst();
    if worst <= tol.tau {
        (true, None)
    } else {
        (false, Some(at))
    }
}

/// Smallest uniform enlargement of every ACS disk that makes it cover the
/// objective. Negative when there is slack.
pub fn alpha_star(cfg: &PupilConfig) -> f64 {
    alpha_star_with(cfg, &Tolerances::default())
}

pub fn alpha_star_with(cfg: &PupilConfig, tol: &Tolerances) -> f64 {
    CellWitnesses::compute(cfg, tol).worst().0
}

/// Enlargement of each label's disk needed to cover its own cell.
pub fn per_disk_alpha(cfg: &PupilConfig) -> BTreeMap<Label, DiskAlpha> {
    per_disk_alpha_with(cfg, &Tolerances::default())
}

pub fn per_disk_alpha_with(cfg: &PupilConfig, tol: &Tolerances) -> BTreeMap<Label, DiskAlpha> {
    let w = CellWitnesses::compute(cfg, tol);
    alphas_from(cfg, &w, tol)
}

fn alphas_from(
    cfg: &PupilConfig,
    w: &CellWitnesses,
    tol: &Tolerances,
) -> BTreeMap<Label, DiskAlpha> {
    let n = cfg.len();
    let mut out: BTreeMap<Label, DiskAlpha> = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i, j), DiskAlpha::Unconstrained)))
        .collect();
    for (k, max) in w.disk_maxima().into_iter().enumerate() {
        if let Some((alpha, _)) = max {
            for label in tied_labels(cfg, &w.acs, k, tol) {
                out.insert(label, DiskAlpha::Constrained(alpha));
            }
        }
    }
    out
}

/// Largest radius of an origin-centered objective covered by the ACS.
pub fn max_objective(cfg: &PupilConfig) -> Result<f64, CoverageError> {
    max_objective_with(cfg, &Tolerances::default())
}

/// The covered radius is the distance from the origin to the boundary of the
/// union. That boundary is made of circle arcs meeting at corners, so the
/// nearest boundary point is either a corner (two circles meeting with no
/// third disk strictly containing the point) or the nearest point of a single
/// circle. When the origin disk's own circle is on the boundary, no corner
/// can be nearer than its radius.
pub fn max_objective_with(cfg: &PupilConfig, tol: &Tolerances) -> Result<f64, CoverageError> {
    let acs = build_acs(cfg, tol);
    if delta_min(&acs, Point::ORIGIN).0 > tol.tau {
        return Err(CoverageError::NoCoverage);
    }
    let origin = acs.origin_disk();
    let r0 = acs.disks[origin].radius;
    let on_boundary = |x: Point| delta_min(&acs, x).0 >= -tol.tau;

    // The origin disk is inside its own cell iff no other disk reaches
    // strictly inside its boundary circle.
    let own_cell = acs
        .disks
        .iter()
        .enumerate()
        .all(|(k, d)| k == origin || (d.center.norm() - r0).abs() >= d.radius - tol.tau);
    let mut best = if own_cell { r0 } else { f64::INFINITY };

    if !own_cell {
        for (a, da) in acs.disks.iter().enumerate() {
            for db in &acs.disks[a + 1..] {
                for x in circle_intersections(da.center, da.radius, db.center, db.radius, tol.tau) {
                    if x.norm() < best && on_boundary(x) {
                        best = x.norm();
                    }
                }
            }
            let c = da.center.norm();
            if c > 0.0 {
                let nearest = da.center * ((c - da.radius) / c);
                if nearest.norm() < best && on_boundary(nearest) {
                    best = nearest.norm();
                }
            }
        }
    }
    if !(best.is_finite() && best > tol.tau) {
        return Err(CoverageError::NoCoverage);
    }
    Ok(best)
}

/// Intersection points of two circles; a zero radius circle is its center.
fn circle_intersections(c1: Point, r1: f64, c2: Point, r2: f64, eps: f64) -> Vec<Point> {
    let sep = c2 - c1;
    let d = sep.norm();
    if d <= eps {
        return Vec::new();
    }
    if d > r1 + r2 + eps || d < (r1 - r2).abs() - eps {
        return Vec::new();
    }
    let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - along * along;
    let u = sep * (1.0 / d);
    let base = c1 + u * along;
    if h2 <= 0.0 {
        return vec![base];
    }
    let h = h2.sqrt();
    vec![base + u.perp() * h, base - u.perp() * h]
}

/// Everything about one configuration's coverage in one pass.
pub fn analyze(cfg: &PupilConfig, tol: &Tolerances) -> CoverageReport {
    let w = CellWitnesses::compute(cfg, tol);
    let (alpha_star, at) = w.worst();
    let early = 2.0 * cfg.max_radius() >= cfg.objective_radius();
    let covered = early || alpha_star <= tol.tau;
    CoverageReport {
        covered,
        witness: (!covered).then_some(at),
        alpha_star,
        per_disk_alpha: alphas_from(cfg, &w, tol),
        r_star: max_objective_with(cfg, tol).ok(),
    }
}

/// Brute-force coverage check on a `resolution × resolution` grid over the
/// objective's bounding square. Samples within one grid diagonal of the
/// objective circle are skipped. A `false` answer is definitive; a `true`
/// answer holds up to the grid resolution.
pub fn coverage_oracle(cfg: &PupilConfig, resolution: usize) -> (bool, Option<Point>) {
    assert!(resolution >= 16, "oracle resolution must be at least 16");
    let radius = cfg.objective_radius();
    let h = 2.0 * radius / resolution as f64;
    let limit = radius - 2.0 * radius / resolution as f64;

    // Bucket all n² difference disks by the grid cells their bounding boxes
    // touch, so each sample only tests nearby disks.
    let buckets_per_side = resolution.min(64);
    let bw = 2.0 * radius / buckets_per_side as f64;
    let bucket_of =
        |v: f64| (((v + radius) / bw).floor().max(0.0) as usize).min(buckets_per_side - 1);
    let mut buckets: Vec<Vec<(Point, f64)>> = vec![Vec::new(); buckets_per_side * buckets_per_side];
    for p in cfg.pupils() {
        for q in cfg.pupils() {
            let c = p.center - q.center;
            let r = p.radius + q.radius;
            if c.x + r < -radius || c.x - r > radius || c.y + r < -radius || c.y - r > radius {
                continue;
            }
            let (x0, x1) = (bucket_of(c.x - r), bucket_of(c.x + r));
            let (y0, y1) = (bucket_of(c.y - r), bucket_of(c.y + r));
            for by in y0..=y1 {
                for bx in x0..=x1 {
                    buckets[by * buckets_per_side + bx].push((c, r * r));
                }
            }
        }
    }

    for iy in 0..resolution {
        let y = -radius + (iy as f64 + 0.5) * h;
        for ix in 0..resolution {
            let x = -radius + (ix as f64 + 0.5) * h;
            let s = Point::new(x, y);
            if s.norm() > limit {
                continue;
            }
            let bucket = &buckets[bucket_of(y) * buckets_per_side + bucket_of(x)];
            if !bucket.iter().any(|&(c, r2)| (s - c).norm_sq() <= r2) {
                return (false, Some(s));
            }
        }
    }
    (true, None)
}
