//! The parts of the additively weighted Voronoi (Apollonius) diagram of the
//! ACS that the coverage test needs: bisectors, vertices and the points where
//! cell boundaries cross the objective circle.
//!
//! The diagram is never built topologically. Vertices come from solving every
//! disk triple and keeping the solutions that no fourth disk beats, and
//! crossings come from root-finding `δ_a - δ_b` around the objective circle.
//! This is cubic in the number of ACS disks, which is fine for the pupil
//! counts the optimizers deal with.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{delta_min, Acs, Disk, Point, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ApolloniusError {
    #[error("disks are concentric, their bisector is empty")]
    ConcentricDisks,
    #[error("one disk contains the other, their bisector is empty")]
    NestedDisks,
    #[error("disk centers are collinear and the vertex system has no isolated solution")]
    DegenerateTriple,
}

/// One sheet of the hyperbola `|x - c_far| - |x - c_near| = 2a` on which two
/// disks are at equal additive distance. With equal radii it is the
/// perpendicular bisector of the two centers.
///
/// The canonical frame has its origin at the midpoint of the centers and its
/// abscissa pointing from the larger disk's center towards the smaller one's,
/// so the branch lives at abscissa `≥ a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisector {
    pub disk_a: usize,
    pub disk_b: usize,
    /// Index (`disk_a` or `disk_b`) of the smaller disk, whose center is the
    /// focus the branch wraps around.
    pub near: usize,
    /// Semi-axis `a = |ρ_b - ρ_a| / 2`.
    pub semi_axis: f64,
    /// Focal half-distance `c = |c_b - c_a| / 2`.
    pub focal_half_distance: f64,
    origin: Point,
    axis: Point,
}

impl Bisector {
    /// Bisector of two disks, `ia` and `ib` being their labels.
    pub fn between(
        ia: usize,
        a: &Disk,
        ib: usize,
        b: &Disk,
        tol: &Tolerances,
    ) -> Result<Self, ApolloniusError> {
        let sep = b.center - a.center;
        let dist = sep.norm();
        if dist <= tol.tau {
            return Err(ApolloniusError::ConcentricDisks);
        }
        let semi_axis = (b.radius - a.radius).abs() / 2.0;
        let focal_half_distance = dist / 2.0;
        if semi_axis >= focal_half_distance {
            return Err(ApolloniusError::NestedDisks);
        }
        // Axis points from the far focus (larger disk) to the near one.
        let (near, axis) = if a.radius <= b.radius {
            (ia, sep * (-1.0 / dist))
        } else {
            (ib, sep * (1.0 / dist))
        };
        Ok(Self {
            disk_a: ia,
            disk_b: ib,
            near,
            semi_axis,
            focal_half_distance,
            origin: (a.center + b.center) * 0.5,
            axis,
        })
    }

    pub fn is_line(&self) -> bool {
        self.semi_axis == 0.0
    }

    /// `e = c / a`; `None` for a straight bisector.
    pub fn eccentricity(&self) -> Option<f64> {
        (!self.is_line()).then(|| self.focal_half_distance / self.semi_axis)
    }

    /// Point on the branch at parameter `t`. For a hyperbola `t` is the
    /// hyperbolic angle, for a line it is the signed distance from the
    /// midpoint. `t = 0` is the apex in both cases.
    pub fn point(&self, t: f64) -> Point {
        let a = self.semi_axis;
        let b = (self.focal_half_distance.powi(2) - a * a).sqrt();
        let normal = self.axis.perp();
        if self.is_line() {
            return self.origin + normal * t;
        }
        self.origin + self.axis * (a * t.cosh()) + normal * (b * t.sinh())
    }

    /// Coordinates of `p` in the canonical frame.
    pub fn to_canonical(&self, p: Point) -> Point {
        let d = p - self.origin;
        Point::new(d.dot(self.axis), d.dot(self.axis.perp()))
    }

    /// Center of the larger disk, at canonical `(-c, 0)`.
    pub fn far_focus(&self) -> Point {
        self.origin - self.axis * self.focal_half_distance
    }

    /// Center of the smaller disk, at canonical `(c, 0)`.
    pub fn near_focus(&self) -> Point {
        self.origin + self.axis * self.focal_half_distance
    }
}

/// Bisector of ACS disks `a` and `b`.
pub fn bisector(
    acs: &Acs,
    a: usize,
    b: usize,
    tol: &Tolerances,
) -> Result<Bisector, ApolloniusError> {
    Bisector::between(a, &acs.disks[a].disk(), b, &acs.disks[b].disk(), tol)
}

/// Point on `b` at parameter `t`; see [`Bisector::point`].
pub fn bisector_point(b: &Bisector, t: f64) -> Point {
    b.point(t)
}

/// All `(x, r)` with `‖x - c_k‖ - ρ_k = r` for the three disks.
///
/// Subtracting the squared equations pairwise leaves two linear equations
/// in `(x, y, r)`. Their solution line is substituted back into one of the
/// quadratics, and each real root is Newton-polished on the unsquared system.
pub fn tri_disk_vertices(
    d1: &Disk,
    d2: &Disk,
    d3: &Disk,
    tol: &Tolerances,
) -> Result<Vec<(Point, f64)>, ApolloniusError> {
    let disks = [d1, d2, d3];
    for (u, v) in [(0, 1), (0, 2), (1, 2)] {
        if disks[u].center.approx_eq(disks[v].center, tol.dedup_eps) {
            return Err(ApolloniusError::ConcentricDisks);
        }
    }
    // Work relative to c1.
    let q2 = d2.center - d1.center;
    let q3 = d3.center - d1.center;
    let (r1, r2, r3) = (d1.radius, d2.radius, d3.radius);
    let row2 = [2.0 * q2.x, 2.0 * q2.y, 2.0 * (r2 - r1)];
    let row3 = [2.0 * q3.x, 2.0 * q3.y, 2.0 * (r3 - r1)];
    let rhs = [
        q2.norm_sq() - r2 * r2 + r1 * r1,
        q3.norm_sq() - r3 * r3 + r1 * r1,
    ];

    let dir = cross3(row2, row3);
    let det = dot3(dir, dir);
    let scale = dot3(row2, row2) * dot3(row3, row3);
    if det <= 1e-24 * scale {
        return Err(ApolloniusError::DegenerateTriple);
    }

    // Minimum-norm particular solution p0 = Aᵀ (A Aᵀ)⁻¹ rhs.
    let g11 = dot3(row2, row2);
    let g12 = dot3(row2, row3);
    let g22 = dot3(row3, row3);
    let gdet = g11 * g22 - g12 * g12;
    let m2 = (g22 * rhs[0] - g12 * rhs[1]) / gdet;
    let m3 = (g11 * rhs[1] - g12 * rhs[0]) / gdet;
    let p0 = [
        row2[0] * m2 + row3[0] * m3,
        row2[1] * m2 + row3[1] * m3,
        row2[2] * m2 + row3[2] * m3,
    ];

    // (x', r + ρ1) along the line, with ‖x'‖² = (r + ρ1)² as the quadratic.
    let w0 = [p0[0], p0[1], p0[2] + r1];
    let lorentz = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
    let qa = lorentz(dir, dir);
    let qb = 2.0 * lorentz(w0, dir);
    let qc = lorentz(w0, w0);

    let mut lambdas = Vec::with_capacity(2);
    let lead_scale = dot3(dir, dir);
    if qa.abs() <= 1e-14 * lead_scale {
        if qb.abs() > 0.0 {
            lambdas.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        let slack = 1e-12 * (qb * qb + (4.0 * qa * qc).abs());
        if disc >= -slack {
            let sq = disc.max(0.0).sqrt();
            // Stable quadratic roots.
            let q = -0.5 * (qb + qb.signum() * sq);
            if q != 0.0 {
                lambdas.push(q / qa);
                lambdas.push(qc / q);
            } else {
                lambdas.push(-qb / (2.0 * qa));
            }
        }
    }

    let mut out: Vec<(Point, f64)> = Vec::with_capacity(2);
    for lambda in lambdas {
        let x = Point::new(p0[0] + lambda * dir[0], p0[1] + lambda * dir[1]) + d1.center;
        let r = p0[2] + lambda * dir[2];
        let (x, r) = newton_polish(&disks, x, r);
        let residual = disks
            .iter()
            .map(|d| (d.delta(x) - r).abs())
            .fold(0.0, f64::max);
        if !residual.is_finite() || residual > tol.tau {
            // Spurious root of the squared system, ‖x - c_k‖ = -(r + ρ_k).
            continue;
        }
        if out
            .iter()
            .any(|(p, _)| p.approx_eq(x, 1e-12 * (1.0 + x.norm())))
        {
            continue;
        }
        out.push((x, r));
    }
    Ok(out)
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn newton_polish(disks: &[&Disk; 3], mut x: Point, mut r: f64) -> (Point, f64) {
    for _ in 0..8 {
        let mut jac = [[0.0; 3]; 3];
        let mut f = [0.0; 3];
        for (k, d) in disks.iter().enumerate() {
            let v = x - d.center;
            let n = v.norm();
            if n == 0.0 {
                return (x, r);
            }
            f[k] = n - d.radius - r;
            jac[k] = [v.x / n, v.y / n, -1.0];
        }
        if f.iter().all(|v| v.abs() <= 1e-13) {
            break;
        }
        let Some(step) = solve3(jac, f) else {
            break;
        };
        x = Point::new(x.x - step[0], x.y - step[1]);
        r -= step[2];
    }
    (x, r)
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *o = det(mc) / d;
    }
    Some(out)
}

/// `true` when no ACS disk is strictly closer to `x` than `r`.
pub fn is_global_vertex(acs: &Acs, x: Point, r: f64, tol: &Tolerances) -> bool {
    delta_min(acs, x).0 >= r - tol.tau
}

/// Points of the objective circle `‖x‖ = R` where the cells of disks `a`
/// and `b` meet.
pub fn boundary_crossings(
    acs: &Acs,
    a: usize,
    b: usize,
    radius: f64,
    tol: &Tolerances,
) -> Vec<Point> {
    let ring = Ring::sample(acs, radius, tol.boundary_samples);
    ring.crossings(acs, a, b, tol)
}

/// `δ` of every ACS disk sampled on a uniform angular grid of the circle.
struct Ring {
    radius: f64,
    samples: usize,
    /// `deltas[k * samples + m]` is `δ_k` at sample `m`.
    deltas: Vec<f64>,
    minima: Vec<f64>,
}

impl Ring {
    fn sample(acs: &Acs, radius: f64, samples: usize) -> Self {
        let samples = samples.max(8);
        let points: Vec<Point> = (0..samples)
            .map(|m| Point::polar(radius, TAU * m as f64 / samples as f64))
            .collect();
        let mut deltas = Vec::with_capacity(acs.len() * samples);
        for d in &acs.disks {
            deltas.extend(points.iter().map(|&p| d.delta(p)));
        }
        let minima = (0..samples)
            .map(|m| {
                (0..acs.len())
                    .map(|k| deltas[k * samples + m])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Self {
            radius,
            samples,
            deltas,
            minima,
        }
    }

    fn angle(&self, m: usize) -> f64 {
        TAU * m as f64 / self.samples as f64
    }

    fn crossings(&self, acs: &Acs, a: usize, b: usize, tol: &Tolerances) -> Vec<Point> {
        let ms = self.samples;
        let da = &self.deltas[a * ms..(a + 1) * ms];
        let db = &self.deltas[b * ms..(b + 1) * ms];
        // δ is 1-Lipschitz and neighbouring samples are this far apart.
        let reach = 2.0 * self.radius * TAU / ms as f64 + tol.tau;
        let f = |theta: f64| {
            let p = Point::polar(self.radius, theta);
            acs.disks[a].delta(p) - acs.disks[b].delta(p)
        };

        let mut out = Vec::new();
        for m in 0..ms {
            let next = (m + 1) % ms;
            let near_min = |k: usize| da[k].min(db[k]) - self.minima[k] <= reach;
            if !(near_min(m) || near_min(next)) {
                continue;
            }
            let (f0, f1) = (da[m] - db[m], da[next] - db[next]);
            let theta = if f0 == 0.0 {
                self.angle(m)
            } else if f0 * f1 < 0.0 {
                let hi = if next == 0 { TAU } else { self.angle(next) };
                bisect(f, self.angle(m), hi, f0)
            } else {
                continue;
            };
            let p = Point::polar(self.radius, theta);
            let (dmin, _) = delta_min(acs, p);
            let level = acs.disks[a].delta(p).max(acs.disks[b].delta(p));
            if level <= dmin + tol.tau {
                out.push(p);
            }
        }
        out
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    InteriorVertex,
    BoundaryCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexPoint {
    pub point: Point,
    pub kind: VertexKind,
}

/// Witness points of one ACS disk's cell: its vertices inside the objective
/// and the points where its boundary crosses the objective circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub disk: usize,
    pub points: Vec<VertexPoint>,
}

/// Witness sets of every ACS disk, indexed like `acs.disks`.
pub fn vertex_sets(acs: &Acs, radius: f64, tol: &Tolerances) -> Vec<VertexSet> {
    let n = acs.len();
    let mut candidates: Vec<VertexPoint> = Vec::new();

    if n >= 3 {
        let interior: Vec<VertexPoint> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut found = Vec::new();
                for j in i + 1..n {
                    for k in j + 1..n {
                        let Ok(solutions) = tri_disk_vertices(
                            &acs.disks[i].disk(),
                            &acs.disks[j].disk(),
                            &acs.disks[k].disk(),
                            tol,
                        ) else {
                            continue;
                        };
                        for (x, r) in solutions {
                            if x.norm() <= radius + tol.tau && is_global_vertex(acs, x, r, tol) {
                                let kind = if (x.norm() - radius).abs() <= tol.tau {
                                    VertexKind::BoundaryCrossing
                                } else {
                                    VertexKind::InteriorVertex
                                };
                                found.push(VertexPoint { point: x, kind });
                            }
                        }
                    }
                }
                found
            })
            .collect();
        candidates.extend(interior);
    }

    if n >= 2 {
        let ring = Ring::sample(acs, radius, tol.boundary_samples);
        let crossings: Vec<VertexPoint> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let ring = &ring;
                (a + 1..n).flat_map(move |b| {
                    ring.crossings(acs, a, b, tol)
                        .into_iter()
                        .map(|point| VertexPoint {
                            point,
                            kind: VertexKind::BoundaryCrossing,
                        })
                })
            })
            .collect();
        candidates.extend(crossings);
    }

    let merged = merge_points(candidates, 10.0 * tol.tau * radius.max(1.0));

    let mut sets: Vec<VertexSet> = (0..n)
        .map(|disk| VertexSet {
            disk,
            points: Vec::new(),
        })
        .collect();
    for vp in merged {
        let (dmin, _) = delta_min(acs, vp.point);
        for (k, d) in acs.disks.iter().enumerate() {
            if d.delta(vp.point) <= dmin + tol.tau {
                sets[k].points.push(vp);
            }
        }
    }
    for set in &mut sets {
        set.points.sort_by(|p, q| {
            p.point
                .angle()
                .total_cmp(&q.point.angle())
                .then(p.point.norm_sq().total_cmp(&q.point.norm_sq()))
        });
    }
    sets
}

/// Collapses candidates closer than `eps`; a boundary crossing wins over an
/// interior vertex at the same place.
fn merge_points(mut pts: Vec<VertexPoint>, eps: f64) -> Vec<VertexPoint> {
    pts.sort_by(|p, q| {
        p.point
            .x
            .total_cmp(&q.point.x)
            .then(p.point.y.total_cmp(&q.point.y))
    });
    let mut out: Vec<VertexPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        let hit = out
            .iter_mut()
            .rev()
            .take_while(|q| p.point.x - q.point.x <= eps)
            .find(|q| (p.point.y - q.point.y).abs() <= eps);
        match hit {
            Some(q) => {
                if p.kind == VertexKind::BoundaryCrossing && q.kind == VertexKind::InteriorVertex {
                    *q = p;
                }
            }
            None => out.push(p),
        }
    }
    out
}
