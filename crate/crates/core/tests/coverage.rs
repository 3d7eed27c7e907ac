mod common;

use proptest::prelude::*;
use pupil_cover::coverage::{analyze, decide, max_objective, DiskAlpha};
use pupil_cover::geom::{PupilConfig, Tolerances};

use common::{config, objective_samples, raw_delta_min, sample_spacing};

const RINGS: usize = 60;
const SPOKES: usize = 360;

fn sampled_worst(cfg: &PupilConfig) -> f64 {
    objective_samples(cfg.objective_radius(), RINGS, SPOKES)
        .into_iter()
        .map(|x| raw_delta_min(cfg, x))
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_star_is_the_largest_gap_in_the_objective(cfg in config(1..=4, 0.5)) {
        let report = analyze(&cfg, &Tolerances::default());
        let sampled = sampled_worst(&cfg);
        prop_assert!(report.alpha_star >= sampled - 1e-9, "{} < sampled {}", report.alpha_star, sampled);
        prop_assert!(report.alpha_star <= sampled + sample_spacing(1.0, RINGS, SPOKES));
        prop_assert_eq!(report.covered, report.alpha_star <= 1e-9);
    }

    #[test]
    fn the_witness_certifies_alpha_star(cfg in config(1..=4, 0.5)) {
        let report = analyze(&cfg, &Tolerances::default());
        if let Some(w) = report.witness {
            prop_assert!(w.norm() <= cfg.objective_radius() + 1e-9);
            // Any smaller uniform enlargement leaves w uncovered.
            prop_assert!((raw_delta_min(&cfg, w) - report.alpha_star).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_enlargement_by_alpha_star_covers(cfg in config(1..=4, 0.5)) {
        let a = analyze(&cfg, &Tolerances::default()).alpha_star;
        prop_assume!(a > 0.0);
        // Each pupil grows by half, so every difference disk grows by a.
        let grown = cfg.enlarged(a / 2.0 + 1e-9).unwrap();
        prop_assert!(decide(&grown).0);
        prop_assert!(sampled_worst(&grown) <= 1e-9);
    }

    #[test]
    fn per_disk_enlargements_cover(cfg in config(1..=4, 0.5)) {
        let alphas = analyze(&cfg, &Tolerances::default()).per_disk_alpha;
        let n = cfg.len();
        prop_assert_eq!(alphas.len(), n * n);
        let ps = cfg.pupils();
        for x in objective_samples(1.0, RINGS / 2, SPOKES / 2) {
            let covered = alphas.iter().any(|(&(i, j), a)| {
                let extra = match a {
                    DiskAlpha::Constrained(v) => v.max(0.0),
                    DiskAlpha::Unconstrained => 0.0,
                };
                x.dist(ps[i].center - ps[j].center) <= ps[i].radius + ps[j].radius + extra + 1e-9
            });
            prop_assert!(covered, "{:?} uncovered after per-disk enlargement", x);
        }
    }

    #[test]
    fn covered_radius_is_tight(cfg in config(1..=4, 0.6)) {
        let Ok(r) = max_objective(&cfg) else {
            prop_assert!(raw_delta_min(&cfg, pupil_cover::geom::Point::ORIGIN) > 0.0);
            return Ok(());
        };
        prop_assume!(r > 1e-3);
        prop_assert!(decide(&cfg.with_objective_radius(r * (1.0 - 1e-7)).unwrap()).0);
        prop_assert!(!decide(&cfg.with_objective_radius(r * (1.0 + 1e-4)).unwrap()).0);
    }

    #[test]
    fn coverage_is_monotone_in_the_objective_radius(cfg in config(1..=4, 0.6), s in 0.05..1.0f64, t in 0.0..1.0f64) {
        let big = 0.2 + 2.0 * s;
        let small = big * t.max(0.01);
        if decide(&cfg.with_objective_radius(big).unwrap()).0 {
            prop_assert!(decide(&cfg.with_objective_radius(small).unwrap()).0);
        }
    }
}
