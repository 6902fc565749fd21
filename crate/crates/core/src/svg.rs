//! SVG pictures of a decomposition in dimension 1 or 2: the fundamental
//! parallelogram of the lattice with one translate of every cell, labeled by
//! its type. Floating point is used only for drawing.

use std::fmt::Write;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::jacobian::{Decomposition, Zonotope};
use crate::linalg;
use crate::rational::{self, Rational};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const FILLS: [&str; 6] = ["#cfe3f7", "#f7dccf", "#d7f0d2", "#efe0f5", "#f5f0c8", "#d3eeee"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn label(d: &Decomposition, i: usize) -> String {
    let g = &d.graph;
    let t = &d.cells[i].label;
    let s: Vec<&str> = t.s.iter().map(|e| g.edge(e).id.as_str()).collect();
    let deg: Vec<String> = t.d.0.iter().map(|x| x.to_string()).collect();
    escape(&format!("({{{}}},({}))", s.join(","), deg.join(",")))
}

/// The translate of a cell whose center has lattice coefficients in `[0, 1)`.
fn in_domain(d: &Decomposition, z: &Zonotope) -> Zonotope {
    let k: Vec<BigInt> = d
        .lattice
        .lattice_coefficients(&z.center())
        .iter()
        .map(rational::floor_int)
        .collect();
    z.translated(&linalg::scale(&d.lattice.lattice_point(&k), &rational::int(-1)))
}

fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter().map(rational::to_f64).collect()
}

/// Convex hull in counterclockwise order (monotone chain).
fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

struct Frame {
    lo: (f64, f64),
    scale: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for p in points {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        Frame {
            lo,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (p.0 - self.lo.0) * self.scale,
            SIZE - MARGIN - (p.1 - self.lo.1) * self.scale,
        )
    }
}

fn polyline(f: &Frame, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&p| {
            let (x, y) = f.map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders a decomposition of a graph with first Betti number 1 or 2.
pub fn decomposition_svg(d: &Decomposition) -> Result<String> {
    let n = d.dim();
    if n != 1 && n != 2 {
        return Err(Error::Domain(format!("pictures need dimension 1 or 2, not {n}")));
    }
    let lift = |p: Vec<f64>| if n == 1 { (p[0], 0.0) } else { (p[0], p[1]) };
    let cells: Vec<(usize, Vec<(f64, f64)>, (f64, f64))> = d
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let z = in_domain(d, &c.zonotope);
            let corners = z.corners().iter().map(|p| lift(to_f64(p))).collect();
            (i, hull(corners), lift(to_f64(&z.center())))
        })
        .collect();
    let cube = Zonotope {
        base: vec![Rational::from_integer(BigInt::from(0)); n],
        generators: d.lattice.gram.clone(),
    };
    let domain: Vec<(f64, f64)> = cube.corners().into_iter().map(|p| lift(to_f64(&p))).collect();
    let domain = hull(domain);
    let mut all: Vec<(f64, f64)> = domain.clone();
    all.extend(cells.iter().flat_map(|(_, h, _)| h.iter().copied()));
    let f = Frame::fit(&all);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if n == 2 {
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##,
            polyline(&f, &domain)
        );
    }
    let mut by_dim = cells.clone();
    by_dim.sort_by_key(|(i, _, _)| std::cmp::Reverse(d.cells[*i].dim));
    for (i, h, center) in &by_dim {
        let dim = d.cells[*i].dim;
        let (cx, cy) = f.map(*center);
        match (dim, n) {
            (2, _) => {
                let _ = writeln!(
                    out,
                    r##"<polygon points="{}" fill="{}" stroke="#333"/>"##,
                    polyline(&f, h),
                    FILLS[*i % FILLS.len()]
                );
            }
            (1, _) => {
                let color = if n == 1 { FILLS[*i % FILLS.len()] } else { "#333" };
                let width = if n == 1 { 8 } else { 2 };
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" stroke="{color}" stroke-width="{width}" fill="none"/>"#,
                    polyline(&f, h)
                );
            }
            _ => {
                let _ = writeln!(out, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="#c0392b"/>"##);
            }
        }
        let dy = if dim == 0 {
            -8.0
        } else if n == 1 {
            20.0 * (1.0 + (*i % 2) as f64)
        } else {
            4.0
        };
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            cy + dy,
            label(d, *i)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::jacobian::{namikawa_decomposition, Kind};

    #[test]
    fn draws_small_decompositions() {
        let g = fixtures::triangle();
        let h = crate::stability::Polarization::uniform(3);
        let d = namikawa_decomposition(&g, &h, 1, 0, Kind::Polystable).unwrap();
        let svg = decomposition_svg(&d).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<text").count(), d.cells.len());

        let g = fixtures::dumbbell();
        let h = crate::stability::Polarization::uniform(2);
        let d = namikawa_decomposition(&g, &h, 1, 0, Kind::Polystable).unwrap();
        let svg = decomposition_svg(&d).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1 + d.maximal_cells().count());
    }

    #[test]
    fn rejects_higher_dimension() {
        let mut b = crate::graph::MetricGraph::builder().vertex("a", 0).vertex("b", 0);
        for e in ["e1", "e2", "e3", "e4"] {
            b = b.edge(e, "a", "b", rational::int(1));
        }
        let g = b.build().unwrap();
        let h = crate::stability::Polarization::uniform(2);
        let d = namikawa_decomposition(&g, &h, 3, 0, Kind::Polystable).unwrap();
        assert_eq!(d.dim(), 3);
        assert!(matches!(decomposition_svg(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = hull(vec![(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(h.len(), 4);
    }
}
