#![allow(dead_code)]

use proptest::prelude::*;
use pupil_cover::geom::{Point, Pupil, PupilConfig};

/// Random configurations of `n` pupils around a unit objective.
pub fn config(
    n: std::ops::RangeInclusive<usize>,
    max_r: f64,
) -> impl Strategy<Value = PupilConfig> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.0..max_r), n).prop_map(|ps| {
        PupilConfig::new(
            ps.into_iter().map(|(x, y, r)| Pupil::at(x, y, r)).collect(),
            1.0,
        )
        .unwrap()
    })
}

/// Every difference disk, including duplicates, as (center, radius).
pub fn raw_disks(cfg: &PupilConfig) -> Vec<(Point, f64)> {
    let ps = cfg.pupils();
    ps.iter()
        .flat_map(|p| {
            ps.iter()
                .map(move |q| (p.center - q.center, p.radius + q.radius))
        })
        .collect()
}

/// Additive distance to the nearest difference disk, computed from scratch.
pub fn raw_delta_min(cfg: &PupilConfig, x: Point) -> f64 {
    raw_disks(cfg)
        .into_iter()
        .map(|(c, r)| x.dist(c) - r)
        .fold(f64::INFINITY, f64::min)
}

/// Polar sample grid over the closed objective disk, boundary included.
pub fn objective_samples(radius: f64, rings: usize, spokes: usize) -> Vec<Point> {
    let mut out = vec![Point::ORIGIN];
    for k in 1..=rings {
        let rho = radius * k as f64 / rings as f64;
        for s in 0..spokes {
            out.push(Point::polar(
                rho,
                std::f64::consts::TAU * s as f64 / spokes as f64,
            ));
        }
    }
    out
}

/// Largest gap between a point of the objective and the nearest sample of
/// [`objective_samples`].
pub fn sample_spacing(radius: f64, rings: usize, spokes: usize) -> f64 {
    let radial = radius / rings as f64;
    let angular = radius * std::f64::consts::PI / spokes as f64;
    radial + angular
}
