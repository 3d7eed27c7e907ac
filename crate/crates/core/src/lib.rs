//! Covering a disk with the autocorrelation support of a set of pupils.
//!
//! A pupil is a disk in the plane. The autocorrelation support (ACS) of a
//! pupil set is the union of the pairwise differences `P_i ⊖ P_j`, and a
//! configuration is valid when its ACS covers the objective disk of radius
//! `R` centered at the origin. This crate decides validity exactly through
//! the additively weighted Voronoi diagram of the ACS disks, measures how far
//! an invalid configuration is from validity, and optimizes radii and
//! positions.
//!
//! ```
//! use pupil_cover::coverage::{alpha_star, decide};
//! use pupil_cover::geom::{Pupil, PupilConfig};
//!
//! let cfg = PupilConfig::new(vec![Pupil::at(0.0, 0.0, 0.3)], 1.0).unwrap();
//! assert!(!decide(&cfg).0);
//! assert!((alpha_star(&cfg) - 0.4).abs() < 1e-12);
//! ```

pub mod apollonius;
pub mod coverage;
pub mod design;
pub mod geom;
pub mod optimize;
pub mod solver;
