//! Planar primitives: points, disks, pupils and the autocorrelation support.
//!
//! The autocorrelation support (ACS) of a pupil set is the union of all
//! pairwise Minkowski differences `P_i ⊖ P_j`. Each difference is again a
//! disk, centered at `c_i - c_j` with radius `ρ_i + ρ_j`, so the ACS is a
//! finite union of disks and every question about it reduces to questions
//! about the additively weighted distance `δ(x) = ‖x - c‖ - ρ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Numerical tolerances shared by the geometric predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Boundary classification tolerance, in length units.
    pub tau: f64,
    /// Two ACS centers closer than this are treated as coincident.
    pub dedup_eps: f64,
    /// Angular samples used when scanning `∂O` for cell-boundary crossings.
    pub boundary_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau: 1e-9,
            dedup_eps: 1e-12,
            boundary_samples: 720,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("a configuration needs at least one pupil")]
    NoPupils,
    #[error("objective radius must be finite and positive, got {0}")]
    ObjectiveRadius(f64),
    #[error("pupil {index}: center must be finite")]
    NonFiniteCenter { index: usize },
    #[error("pupil {index}: radius must be finite and non-negative, got {radius}")]
    InvalidRadius { index: usize, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at distance `radius` from the origin in direction `angle`.
    #[inline]
    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(radius * c, radius * s)
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `true` when both coordinates agree within `eps`.
    #[inline]
    pub fn approx_eq(self, other: Point, eps: f64) -> bool {
        (self.x - other.x).abs() <= eps && (self.y - other.y).abs() <= eps
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed disk. A zero radius denotes a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub const fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Signed additive distance to the boundary circle.
    #[inline]
    pub fn delta(&self, x: Point) -> f64 {
        delta(self, x)
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        x.dist(self.center) <= self.radius
    }
}

/// `‖x - c‖ - ρ`: negative inside the disk, zero on its boundary, positive outside.
#[inline]
pub fn delta(d: &Disk, x: Point) -> f64 {
    x.dist(d.center) - d.radius
}

/// One aperture of the design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pupil {
    pub center: Point,
    pub radius: f64,
}

impl Pupil {
    pub const fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn at(x: f64, y: f64, radius: f64) -> Self {
        Self::new(Point::new(x, y), radius)
    }

    pub fn disk(&self) -> Disk {
        Disk::new(self.center, self.radius)
    }
}

/// `p ⊖ q` for two disks: centered at `c_p - c_q` with radius `ρ_p + ρ_q`.
#[inline]
pub fn minkowski_diff(p: &Pupil, q: &Pupil) -> Disk {
    Disk::new(p.center - q.center, p.radius + q.radius)
}

/// A pupil set together with the radius of the objective disk, which is
/// always centered at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilConfig {
    pupils: Vec<Pupil>,
    objective_radius: f64,
}

impl PupilConfig {
    pub fn new(pupils: Vec<Pupil>, objective_radius: f64) -> Result<Self, ConfigError> {
        if pupils.is_empty() {
            return Err(ConfigError::NoPupils);
        }
        if !(objective_radius.is_finite() && objective_radius > 0.0) {
            return Err(ConfigError::ObjectiveRadius(objective_radius));
        }
        for (index, p) in pupils.iter().enumerate() {
            if !p.center.is_finite() {
                return Err(ConfigError::NonFiniteCenter { index });
            }
            if !(p.radius.is_finite() && p.radius >= 0.0) {
                return Err(ConfigError::InvalidRadius {
                    index,
                    radius: p.radius,
                });
            }
        }
        Ok(Self {
            pupils,
            objective_radius,
        })
    }

    pub fn pupils(&self) -> &[Pupil] {
        &self.pupils
    }

    pub fn len(&self) -> usize {
        self.pupils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pupils.is_empty()
    }

    pub fn objective_radius(&self) -> f64 {
        self.objective_radius
    }

    pub fn centers(&self) -> Vec<Point> {
        self.pupils.iter().map(|p| p.center).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.pupils.iter().map(|p| p.radius).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.pupils.iter().map(|p| p.radius).fold(0.0, f64::max)
    }

    pub fn sum_of_radii(&self) -> f64 {
        self.pupils.iter().map(|p| p.radius).sum()
    }

    pub fn total_area(&self) -> f64 {
        std::f64::consts::PI * self.pupils.iter().map(|p| p.radius * p.radius).sum::<f64>()
    }

    /// Same centers, new radii.
    pub fn with_radii(&self, radii: &[f64]) -> Result<Self, ConfigError> {
        assert_eq!(radii.len(), self.pupils.len(), "radius vector length");
        let pupils = self
            .pupils
            .iter()
            .zip(radii)
            .map(|(p, &r)| Pupil::new(p.center, r))
            .collect();
        Self::new(pupils, self.objective_radius)
    }

    /// Same radii, new centers.
    pub fn with_centers(&self, centers: &[Point]) -> Result<Self, ConfigError> {
        assert_eq!(centers.len(), self.pupils.len(), "center vector length");
        let pupils = self
            .pupils
            .iter()
            .zip(centers)
            .map(|(p, &c)| Pupil::new(c, p.radius))
            .collect();
        Self::new(pupils, self.objective_radius)
    }

    pub fn with_objective_radius(&self, objective_radius: f64) -> Result<Self, ConfigError> {
        Self::new(self.pupils.clone(), objective_radius)
    }

    /// Every pupil radius increased by `amount` (which may be negative).
    pub fn enlarged(&self, amount: f64) -> Result<Self, ConfigError> {
        let radii: Vec<f64> = self.pupils.iter().map(|p| p.radius + amount).collect();
        self.with_radii(&radii)
    }
}

/// An ordered pupil pair `(i, j)` naming the disk `P_i ⊖ P_j`.
pub type Label = (usize, usize);

/// One disk of the deduplicated ACS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsDisk {
    pub i: usize,
    pub j: usize,
    pub center: Point,
    pub radius: f64,
    /// Labels of concentric disks contained in this one.
    pub merged_from: Vec<Label>,
}

impl AcsDisk {
    pub fn disk(&self) -> Disk {
        Disk::new(self.center, self.radius)
    }

    pub fn label(&self) -> Label {
        (self.i, self.j)
    }

    #[inline]
    pub fn delta(&self, x: Point) -> f64 {
        x.dist(self.center) - self.radius
    }
}

/// The autocorrelation support, with concentric contained disks merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Acs {
    pub disks: Vec<AcsDisk>,
    pub n: usize,
}

impl Acs {
    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn contains(&self, x: Point) -> bool {
        self.disks.iter().any(|d| d.delta(x) <= 0.0)
    }

    /// Index of the disk centered at the origin. There is always exactly one.
    pub fn origin_disk(&self) -> usize {
        self.disks
            .iter()
            .position(|d| d.i == d.j)
            .expect("the diagonal disks always survive deduplication")
    }
}

/// Smallest additive distance from `x` to the ACS disks and the index of a
/// minimizer (lowest index on ties).
pub fn delta_min(acs: &Acs, x: Point) -> (f64, usize) {
    assert!(!acs.is_empty(), "delta_min on an empty ACS");
    let mut best = (f64::INFINITY, 0);
    for (k, d) in acs.disks.iter().enumerate() {
        let v = d.delta(x);
        if v < best.0 {
            best = (v, k);
        }
    }
    best
}

/// All `n²` Minkowski-difference disks with exactly concentric contained
/// disks merged into their container. The union is unchanged.
pub fn build_acs(cfg: &PupilConfig, tol: &Tolerances) -> Acs {
    let pupils = cfg.pupils();
    let n = pupils.len();
    let mut raw = Vec::with_capacity(n * n);
    for (i, p) in pupils.iter().enumerate() {
        for (j, q) in pupils.iter().enumerate() {
            raw.push(((i, j), minkowski_diff(p, q)));
        }
    }

    // Group coincident centers. Sorting by x bounds the look-back window.
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (raw[a].1.center, raw[b].1.center);
        ca.x.total_cmp(&cb.x)
            .then(ca.y.total_cmp(&cb.y))
            .then(a.cmp(&b))
    });
    let eps = tol.dedup_eps;
    let mut group_of = vec![usize::MAX; raw.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let c = raw[k].1.center;
        let mut found = None;
        for &prev in order[..pos].iter().rev() {
            let pc = raw[prev].1.center;
            if c.x - pc.x > eps {
                break;
            }
            if (c.y - pc.y).abs() <= eps {
                found = Some(group_of[prev]);
                break;
            }
        }
        let g = found.unwrap_or_else(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        group_of[k] = g;
        groups[g].push(k);
    }

    // Representative: largest radius, lowest row-major label on ties.
    let mut reps: Vec<(usize, Vec<usize>)> = groups
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let rep = *members
                .iter()
                .max_by(|&&a, &&b| raw[a].1.radius.total_cmp(&raw[b].1.radius).then(b.cmp(&a)))
                .expect("groups are non-empty");
            (rep, members)
        })
        .collect();
    reps.sort_by_key(|(rep, _)| *rep);

    let disks = reps
        .into_iter()
        .map(|(rep, members)| {
            let ((i, j), d) = raw[rep];
            AcsDisk {
                i,
                j,
                center: d.center,
                radius: d.radius,
                merged_from: members
                    .into_iter()
                    .filter(|&m| m != rep)
                    .map(|m| raw[m].0)
                    .collect(),
            }
        })
        .collect();
    Acs { disks, n }
}
