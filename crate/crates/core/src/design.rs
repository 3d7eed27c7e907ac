//! Constructive pupil designs.
//!
//! [`three_pupil_optimal`] is the cheapest three-pupil cover. [`prime_design`]
//! covers any objective with equal pupils by placing centers on the product
//! of an integer difference cover with itself: for a prime `p`, the `4p`
//! values
//!
//! ```text
//! x_k      = k·p + (k(k+1)/2 mod p)   for k < 2p
//! x_{k+2p} = x_k + p
//! ```
//!
//! have pairwise differences that include every integer of absolute value
//! below `p²`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{ConfigError, Point, Pupil, PupilConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("pupil radius {radius} must be positive and at most half the objective radius {objective_radius}")]
    InvalidRadius { radius: f64, objective_radius: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// One pupil of radius `R/2` at the origin and two point pupils at `(±R, 0)`.
pub fn three_pupil_optimal(objective_radius: f64) -> Result<PupilConfig, ConfigError> {
    let r = objective_radius;
    PupilConfig::new(
        vec![
            Pupil::at(0.0, 0.0, r / 2.0),
            Pupil::at(r, 0.0, 0.0),
            Pupil::at(-r, 0.0, 0.0),
        ],
        r,
    )
}

pub fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= k {
        if k.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `≥ k`.
pub fn next_prime(k: u64) -> u64 {
    let mut c = k.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceCoverSequence {
    pub p: u64,
    pub values: Vec<i64>,
}

pub fn difference_cover_sequence(p: u64) -> Result<DifferenceCoverSequence, DesignError> {
    if !is_prime(p) {
        return Err(DesignError::NotPrime(p));
    }
    let pi = p as i64;
    let mut values: Vec<i64> = (0..2 * pi)
        .map(|k| k * pi + (k * (k + 1) / 2) % pi)
        .collect();
    let shifted: Vec<i64> = values.iter().map(|x| x + pi).collect();
    values.extend(shifted);
    Ok(DifferenceCoverSequence { p, values })
}

/// Whether every integer strictly between `-p²` and `p²` is a difference of
/// two sequence values.
pub fn verify_difference_cover(seq: &DifferenceCoverSequence) -> bool {
    let span = (seq.p * seq.p) as i64;
    let mut seen = vec![false; span as usize];
    for a in &seq.values {
        for b in &seq.values {
            let d = a - b;
            if (0..span).contains(&d) {
                seen[d as usize] = true;
            }
        }
    }
    // Differences come in ± pairs, so the non-negative half suffices.
    seen.into_iter().all(|s| s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeDesign {
    pub p: u64,
    /// Length of one lattice step.
    pub scale: f64,
    pub pupil_radius: f64,
    pub objective_radius: f64,
    pub pupils: Vec<Pupil>,
}

impl PrimeDesign {
    pub fn config(&self) -> PupilConfig {
        PupilConfig::new(self.pupils.clone(), self.objective_radius)
            .expect("prime designs are valid configurations")
    }

    /// The trivial lower bound `⌈R / ρ⌉` on the pupil count.
    pub fn lower_bound(&self) -> u64 {
        tolerant_ceil(self.objective_radius / self.pupil_radius) as u64
    }

    pub fn approximation_ratio(&self) -> f64 {
        self.pupils.len() as f64 / self.lower_bound() as f64
    }

    /// The count bound `⌈8√2 R / ρ⌉`, met with equality when `R / scale` is
    /// the square of the chosen prime.
    pub fn count_bound(&self) -> u64 {
        tolerant_ceil(8.0 * std::f64::consts::SQRT_2 * self.objective_radius / self.pupil_radius)
            as u64
    }
}

fn tolerant_ceil(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

/// `16p²` pupils of radius `rho` whose ACS covers the objective of radius
/// `objective_radius`. The lattice step is `rho·√2` and `p` is the least
/// prime with `p²` steps reaching the objective radius.
pub fn prime_design(objective_radius: f64, rho: f64) -> Result<PrimeDesign, DesignError> {
    if !(objective_radius.is_finite() && objective_radius > 0.0) {
        return Err(ConfigError::ObjectiveRadius(objective_radius).into());
    }
    if !(rho.is_finite() && rho > 0.0 && rho <= objective_radius / 2.0) {
        return Err(DesignError::InvalidRadius {
            radius: rho,
            objective_radius,
        });
    }
    let scale = rho * std::f64::consts::SQRT_2;
    // Inputs such as 0.70710678 for 1/√2 land a hair above a perfect square.
    let root = ((objective_radius / scale).sqrt() - 1e-6).ceil().max(2.0);
    let p = next_prime(root as u64);
    let seq = difference_cover_sequence(p)?;
    let m = seq.values.len();
    let pupils = (0..m * m)
        .map(|i| {
            let c = Point::new(seq.values[i / m] as f64, seq.values[i % m] as f64) * scale;
            Pupil::new(c, rho)
        })
        .collect();
    Ok(PrimeDesign {
        p,
        scale,
        pupil_radius: rho,
        objective_radius,
        pupils,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2));
        assert!(!is_prime(9));
        assert!(!is_prime(0) && !is_prime(1));
        assert_eq!(next_prime(8), 11);
        assert_eq!(next_prime(0), 2);
        assert_eq!(next_prime(13), 13);
    }

    #[test]
    fn small_sequences() {
        assert_eq!(
            difference_cover_sequence(2).unwrap().values,
            [0, 3, 5, 6, 2, 5, 7, 8]
        );
        assert_eq!(
            difference_cover_sequence(3).unwrap().values,
            [0, 4, 6, 9, 13, 15, 3, 7, 9, 12, 16, 18]
        );
        assert_eq!(difference_cover_sequence(4), Err(DesignError::NotPrime(4)));
    }

    #[test]
    fn short_sequence_fails_the_check() {
        let seq = DifferenceCoverSequence {
            p: 2,
            values: vec![0, 1],
        };
        assert!(!verify_difference_cover(&seq));
    }

    #[test]
    fn three_pupils_scale() {
        let cfg = three_pupil_optimal(2.0).unwrap();
        assert_eq!(cfg.radii(), [1.0, 0.0, 0.0]);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn canonical_prime_design_count() {
        let d = prime_design(4.0, 0.70710678).unwrap();
        assert_eq!(d.p, 2);
        assert_eq!(d.pupils.len(), 64);
        let d = prime_design(4.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert_eq!(d.count_bound(), 64);
        assert!(d.approximation_ratio() <= 8.0 * std::f64::consts::SQRT_2);
        assert!(matches!(
            prime_design(1.0, 0.6),
            Err(DesignError::InvalidRadius { .. })
        ));
    }
}
