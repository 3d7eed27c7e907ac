//! SVG drawings of a configuration.
//!
//! The square `[-1.2R, 1.2R]²` maps onto a 1000×1000 canvas with the y axis
//! pointing up. Numbers are printed with a fixed number of decimals so the
//! same input always produces the same bytes.

use std::fmt::Write;
use std::str::FromStr;

use pupil_cover::apollonius::vertex_sets;
use pupil_cover::geom::{build_acs, Point, PupilConfig, Tolerances};

const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 1.2;
/// Canvas radius used for point pupils so they stay visible.
const POINT_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Objective,
    Acs,
    Diagram,
    Pupils,
}

impl FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "objective" => Ok(Layer::Objective),
            "acs" => Ok(Layer::Acs),
            "diagram" => Ok(Layer::Diagram),
            "pupils" => Ok(Layer::Pupils),
            other => Err(format!(
                "unknown layer '{other}' (expected pupils, acs, diagram or objective)"
            )),
        }
    }
}

pub const ALL_LAYERS: [Layer; 4] = [Layer::Objective, Layer::Acs, Layer::Diagram, Layer::Pupils];

struct Frame {
    scale: f64,
    half: f64,
}

impl Frame {
    fn new(objective_radius: f64) -> Self {
        Self {
            scale: CANVAS / (2.0 * MARGIN * objective_radius),
            half: MARGIN * objective_radius,
        }
    }

    fn x(&self, v: f64) -> f64 {
        (v + self.half) * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        (self.half - v) * self.scale
    }

    fn len(&self, v: f64) -> f64 {
        v * self.scale
    }
}

/// Layers are drawn back to front in the fixed order objective, ACS,
/// diagram, pupils, whatever order they were requested in.
pub fn render_svg(cfg: &PupilConfig, layers: &[Layer], tol: &Tolerances) -> String {
    let mut layers = layers.to_vec();
    layers.sort();
    layers.dedup();
    let f = Frame::new(cfg.objective_radius());
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="1000" height="1000" viewBox="0 0 1000 1000">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="1000" height="1000" fill="#ffffff"/>"##
    );
    for layer in layers {
        match layer {
            Layer::Objective => {
                let _ = writeln!(out, r#"<g id="objective">"#);
                let _ = writeln!(
                    out,
                    r##"<circle class="objective" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#000000" stroke-width="4"/>"##,
                    f.x(0.0),
                    f.y(0.0),
                    f.len(cfg.objective_radius())
                );
                let _ = writeln!(out, "</g>");
            }
            Layer::Acs => {
                let acs = build_acs(cfg, tol);
                let _ = writeln!(out, r#"<g id="acs">"#);
                for d in &acs.disks {
                    let _ = writeln!(
                        out,
                        r##"<circle class="acs" data-label="{},{}" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#3b6ea8" stroke-width="1"/>"##,
                        d.i,
                        d.j,
                        f.x(d.center.x),
                        f.y(d.center.y),
                        f.len(d.radius)
                    );
                }
                let _ = writeln!(out, "</g>");
            }
            Layer::Diagram => {
                let acs = build_acs(cfg, tol);
                let mut points: Vec<Point> = vertex_sets(&acs, cfg.objective_radius(), tol)
                    .into_iter()
                    .flat_map(|s| s.points.into_iter().map(|vp| vp.point))
                    .collect();
                points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
                points.dedup_by(|a, b| a.approx_eq(*b, 1e-9));
                let _ = writeln!(out, r#"<g id="diagram">"#);
                for p in points {
                    let (x, y, s) = (f.x(p.x), f.y(p.y), 6.0);
                    let _ = writeln!(
                        out,
                        r##"<path class="vertex" d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}" stroke="#c0392b" stroke-width="2"/>"##,
                        x - s,
                        y - s,
                        x + s,
                        y + s,
                        x - s,
                        y + s,
                        x + s,
                        y - s
                    );
                }
                let _ = writeln!(out, "</g>");
            }
            Layer::Pupils => {
                let _ = writeln!(out, r#"<g id="pupils">"#);
                for p in cfg.pupils() {
                    let _ = writeln!(
                        out,
                        r##"<circle class="pupil" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#e67e22" fill-opacity="0.8"/>"##,
                        f.x(p.center.x),
                        f.y(p.center.y),
                        f.len(p.radius).max(POINT_RADIUS)
                    );
                }
                let _ = writeln!(out, "</g>");
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pupil_cover::geom::Pupil;

    #[test]
    fn frame_maps_the_margin_square_onto_the_canvas() {
        let f = Frame::new(2.0);
        assert!((f.x(-2.4)).abs() < 1e-12 && (f.x(2.4) - 1000.0).abs() < 1e-12);
        assert!((f.y(2.4)).abs() < 1e-12 && (f.y(-2.4) - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn layers_parse() {
        assert_eq!("acs".parse::<Layer>(), Ok(Layer::Acs));
        assert!("grid".parse::<Layer>().is_err());
    }

    #[test]
    fn element_counts() {
        let cfg = PupilConfig::new(
            vec![Pupil::at(0.0, 0.0, 0.3), Pupil::at(1.0, 0.0, 0.2)],
            1.0,
        )
        .unwrap();
        let svg = render_svg(&cfg, &ALL_LAYERS, &Tolerances::default());
        assert_eq!(svg.matches(r#"class="objective""#).count(), 1);
        assert_eq!(svg.matches(r#"class="pupil""#).count(), 2);
        assert_eq!(svg.matches(r#"class="acs""#).count(), 3);
        assert!(svg.matches(r#"class="vertex""#).count() > 0);
    }
}
