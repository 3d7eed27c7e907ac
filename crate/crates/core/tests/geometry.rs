mod common;

use proptest::prelude::*;
use pupil_cover::apollonius::{boundary_crossings, vertex_sets};
use pupil_cover::geom::{build_acs, delta_min, minkowski_diff, Point, Pupil, Tolerances};

use common::{config, objective_samples, raw_delta_min, raw_disks};

fn pupil() -> impl Strategy<Value = Pupil> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.0..1.0f64).prop_map(|(x, y, r)| Pupil::at(x, y, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn differences_of_pupil_points_lie_in_the_difference_disk(
        p in pupil(), q in pupil(),
        (ra, ta, rb, tb) in (0.0..=1.0f64, 0.0..6.3f64, 0.0..=1.0f64, 0.0..6.3f64),
    ) {
        let a = p.center + Point::polar(ra * p.radius, ta);
        let b = q.center + Point::polar(rb * q.radius, tb);
        prop_assert!(minkowski_diff(&p, &q).delta(a - b) <= 1e-12);
    }

    #[test]
    fn every_point_of_the_difference_disk_is_a_difference(
        p in pupil(), q in pupil(), s in 0.0..=1.0f64, t in 0.0..6.3f64,
    ) {
        let d = minkowski_diff(&p, &q);
        prop_assert!((d.center - (p.center - q.center)).norm() < 1e-12);
        prop_assert!((d.radius - (p.radius + q.radius)).abs() < 1e-12);
        // Split the offset from the disk center proportionally to the radii.
        let total = p.radius + q.radius;
        let offset = Point::polar(s * total, t);
        let share = if total > 0.0 { p.radius / total } else { 0.5 };
        let a = p.center + offset * share;
        let b = q.center - offset * (1.0 - share);
        prop_assert!(a.dist(p.center) <= p.radius + 1e-12);
        prop_assert!(b.dist(q.center) <= q.radius + 1e-12);
        prop_assert!(((a - b) - (d.center + offset)).norm() < 1e-12);
    }

    #[test]
    fn acs_is_symmetric_and_matches_raw_union(cfg in config(1..=5, 0.5), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        let acs = build_acs(&cfg, &Tolerances::default());
        for d in &acs.disks {
            let mirror = acs.disks.iter().any(|e| e.center.approx_eq(-d.center, 1e-12) && (e.radius - d.radius).abs() < 1e-12);
            prop_assert!(mirror, "no mirror for {:?}", d.label());
        }
        let p = Point::new(x, y);
        prop_assert!((delta_min(&acs, p).0 - raw_delta_min(&cfg, p)).abs() < 1e-12);
    }

    #[test]
    fn cells_meet_on_the_objective_circle_exactly_at_the_crossings(cfg in config(2..=4, 0.5)) {
        let tol = Tolerances::default();
        let acs = build_acs(&cfg, &tol);
        let r = cfg.objective_radius();
        // Owner changes between a and b around the circle, counted on a fine
        // scan; the scan can miss crossings but never invents them.
        let samples = 20_000;
        let owner = |k: usize| {
            let x = Point::polar(r, std::f64::consts::TAU * k as f64 / samples as f64);
            let mut ds: Vec<(f64, usize)> = acs.disks.iter().enumerate().map(|(i, d)| (d.delta(x), i)).collect();
            ds.sort_by(|u, v| u.0.total_cmp(&v.0));
            // Ambiguous samples are skipped.
            (ds.len() < 2 || ds[1].0 - ds[0].0 > 1e-6).then_some(ds[0].1)
        };
        let owners: Vec<Option<usize>> = (0..=samples).map(owner).collect();
        for a in 0..acs.len() {
            for b in a + 1..acs.len() {
                let crossings = boundary_crossings(&acs, a, b, r, &tol);
                prop_assert!(crossings.len() <= 2);
                for x in &crossings {
                    prop_assert!((x.norm() - r).abs() < 1e-9);
                    let (da, db) = (acs.disks[a].delta(*x), acs.disks[b].delta(*x));
                    prop_assert!((da - db).abs() < 1e-9);
                    prop_assert!(da <= raw_delta_min(&cfg, *x) + 1e-9);
                }
                let changes = owners
                    .windows(2)
                    .filter(|w| matches!((w[0], w[1]), (Some(u), Some(v)) if (u, v) == (a, b) || (u, v) == (b, a)))
                    .count();
                prop_assert!(changes <= crossings.len(), "{changes} owner changes, {} crossings", crossings.len());
                // A crossing the scan missed sits next to a near-tie.
                let missed_near_tie = crossings.iter().any(|x| {
                    let k = (x.angle().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * samples as f64) as usize;
                    owners[k].is_none() || owners[(k + 1).min(samples)].is_none()
                });
                prop_assert!(changes == crossings.len() || missed_near_tie);
            }
        }
    }

    #[test]
    fn vertex_points_are_nearest_points_of_their_cells(cfg in config(2..=4, 0.5)) {
        let tol = Tolerances::default();
        let acs = build_acs(&cfg, &tol);
        let r = cfg.objective_radius();
        for set in vertex_sets(&acs, r, &tol) {
            for vp in &set.points {
                prop_assert!(vp.point.norm() <= r + 1e-9);
                let own = acs.disks[set.disk].delta(vp.point);
                prop_assert!(own <= raw_delta_min(&cfg, vp.point) + 1e-7, "{:?} not in cell of {}", vp.point, set.disk);
            }
        }
    }

    #[test]
    fn cells_on_the_objective_circle_have_vertices(cfg in config(2..=4, 0.5)) {
        let tol = Tolerances::default();
        let acs = build_acs(&cfg, &tol);
        let r = cfg.objective_radius();
        let sets = vertex_sets(&acs, r, &tol);
        // Owner of each sample on the circle; any disk owning two different
        // arcs, or sharing the circle, must report a crossing.
        let owners: Vec<usize> = (0..3600)
            .map(|k| {
                let x = Point::polar(r, std::f64::consts::TAU * k as f64 / 3600.0);
                let (best, _) = acs.disks.iter().enumerate().fold((0, f64::INFINITY), |(bi, bv), (i, d)| {
                    let v = d.delta(x);
                    if v < bv { (i, v) } else { (bi, bv) }
                });
                best
            })
            .collect();
        let distinct: std::collections::BTreeSet<usize> = owners.iter().copied().collect();
        if distinct.len() > 1 {
            for &k in &distinct {
                prop_assert!(!sets[k].points.is_empty(), "disk {k} owns part of the circle but has no vertex");
            }
        }
    }
}

#[test]
fn objective_samples_cover_the_disk() {
    let s = objective_samples(1.0, 4, 8);
    assert_eq!(s.len(), 33);
    assert!(s.iter().all(|p| p.norm() <= 1.0 + 1e-12));
    assert_eq!(
        raw_disks(&pupil_cover::design::three_pupil_optimal(1.0).unwrap()).len(),
        9
    );
}
