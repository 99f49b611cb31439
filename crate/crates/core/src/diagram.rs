//! SVG lattice-point diagrams of the allowable index sets.
//!
//! The α1 axis points right and the α2 axis points down, so the fourth
//! quadrant fills the picture.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{boundary_ray, format_rational, int, BoundaryRay, GammaShape, LatticeIndex, Rational};

pub const MAX_EXTENT: u32 = 64;

const UNIT: f64 = 40.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 50.0;
const RIGHT: f64 = 90.0;
const BOTTOM: f64 = 80.0;
const LABEL_ROW: f64 = 16.0;

mod rational_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exact::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// What to draw: the lattice window, one boundary ray and shaded cone per
/// exponent, and optional derivative arrows at highlighted indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    pub shape: GammaShape,
    #[serde(with = "rational_list")]
    pub p_list: Vec<Rational>,
    /// Columns 0..=alpha1_extent.
    pub alpha1_extent: u32,
    /// Rows 0 down to -alpha2_extent.
    pub alpha2_extent: u32,
    #[serde(default)]
    pub highlight: Vec<LatticeIndex>,
}

/// A derivative arrow: ∂1 shifts left, ∂2 shifts down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub label: &'static str,
    pub from: LatticeIndex,
    pub to: (i64, i64),
}

impl DiagramSpec {
    pub fn new(shape: GammaShape, p_list: Vec<Rational>, alpha1_extent: u32, alpha2_extent: u32) -> Self {
        Self { shape, p_list, alpha1_extent, alpha2_extent, highlight: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("alpha1_extent", self.alpha1_extent), ("alpha2_extent", self.alpha2_extent)] {
            if e == 0 || e > MAX_EXTENT {
                return Err(Error::InvalidParameter(format!("{name} = {e} must lie in 1..={MAX_EXTENT}")));
            }
        }
        if self.p_list.is_empty() {
            return Err(Error::InvalidParameter("p_list is empty".into()));
        }
        if let Some(&p) = self.p_list.iter().find(|&&p| p < int(1)) {
            return Err(Error::ExponentBelowOne(p));
        }
        Ok(())
    }

    pub fn arrows(&self) -> Vec<Arrow> {
        self.highlight
            .iter()
            .flat_map(|&idx| {
                [
                    Arrow { label: "∂₁", from: idx, to: (idx.a1() - 1, idx.a2()) },
                    Arrow { label: "∂₂", from: idx, to: (idx.a1(), idx.a2() - 1) },
                ]
            })
            .collect()
    }

    /// Renders an SVG 1.1 document; identical specs give identical bytes.
    pub fn render_svg(&self) -> Result<String> {
        self.validate()?;
        let rays = self.p_list.iter().map(|&p| Ok((p, boundary_ray(self.shape, p)?))).collect::<Result<Vec<_>>>()?;
        let (xmax, ymin) = (self.alpha1_extent as f64, -(self.alpha2_extent as f64));
        let width = LEFT + xmax * UNIT + RIGHT;
        let height = TOP + (-ymin) * UNIT + BOTTOM;
        let px = |x: f64| num(LEFT + x * UNIT);
        let py = |y: f64| num(TOP - y * UNIT);

        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            num(width),
            num(height),
            num(width),
            num(height)
        );
        let _ = writeln!(w, "<title>Lattice points of H_{{{}}}</title>", self.shape);
        let _ = writeln!(
            w,
            r##"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#000"/></marker></defs>"##
        );
        let _ = writeln!(w, r##"<rect x="0" y="0" width="{}" height="{}" fill="#fff"/>"##, num(width), num(height));

        let _ = writeln!(w, r##"<g id="cones" fill="#808080" fill-opacity="0.18" stroke="none">"##);
        for (p, ray) in &rays {
            let pts = cone_polygon(ray, xmax, ymin);
            if pts.len() < 3 {
                continue;
            }
            let list: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", px(x), py(y))).collect();
            let _ = writeln!(
                w,
                r#"<polygon points="{}"><title>L^{} cone</title></polygon>"#,
                list.join(" "),
                format_rational(p)
            );
        }
        let _ = writeln!(w, "</g>");

        let _ = writeln!(w, r##"<g id="axes" stroke="#000" stroke-width="2" marker-end="url(#head)">"##);
        let _ = writeln!(w, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(0.0), py(0.0), px(xmax + 0.8), py(0.0));
        let _ = writeln!(w, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(0.0), py(0.0), px(0.0), py(ymin - 0.8));
        let _ = writeln!(w, "</g>");
        let _ = writeln!(
            w,
            r#"<g font-family="serif" font-size="18" font-style="italic"><text x="{}" y="{}">α<tspan baseline-shift="sub" font-size="12">1</tspan></text><text x="{}" y="{}" text-anchor="end">α<tspan baseline-shift="sub" font-size="12">2</tspan></text></g>"#,
            px(xmax + 0.6),
            py(0.3),
            px(-0.4),
            py(ymin - 0.55)
        );

        let _ = writeln!(w, r##"<g id="lattice" fill="#000">"##);
        for j in 0..=self.alpha2_extent as i64 {
            for i in 0..=self.alpha1_extent as i64 {
                let _ = writeln!(w, r#"<circle cx="{}" cy="{}" r="2.5"/>"#, px(i as f64), py(-j as f64));
            }
        }
        let _ = writeln!(w, "</g>");
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="serif" font-size="14" text-anchor="end">(0,0)</text>"#,
            px(-0.15),
            py(0.15)
        );

        let groups = coinciding(&rays);
        let _ = writeln!(w, r##"<g id="rays" stroke="#000" stroke-width="1.2" fill="none">"##);
        for (ps, ray) in &groups {
            let (start, end) = ray_segment(ray, xmax, ymin);
            let dash = if ps.contains(&int(2)) { "" } else { r#" stroke-dasharray="6,4""# };
            let _ = writeln!(
                w,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"{}><title>{}</title></line>"#,
                px(start.0),
                py(start.1),
                px(end.0),
                py(end.1),
                dash,
                ray_title(ray, ps)
            );
        }
        let _ = writeln!(w, "</g>");
        let _ = writeln!(w, r#"<g id="ray-labels" font-family="serif" font-size="16">"#);
        // Rays leaving through the bottom edge get labels below it, dropping a
        // row on overlap; rays leaving through the right edge get labels
        // beside it, pushed apart vertically.
        let mut row_ends: Vec<f64> = Vec::new();
        let mut last_side_y = f64::INFINITY;
        for (ps, ray) in &groups {
            let (_, end) = ray_segment(ray, xmax, ymin);
            let sup = ps.iter().map(format_rational).collect::<Vec<_>>().join(",");
            let (x, y) = if end.1 > ymin {
                let y = (TOP - end.1 * UNIT + 5.0).min(last_side_y - LABEL_ROW);
                last_side_y = y;
                (LEFT + xmax * UNIT + 6.0, y)
            } else {
                let x = LEFT + (end.0 + 0.1) * UNIT;
                let width = 12.0 + 7.0 * sup.chars().count() as f64;
                let row = row_ends.iter().position(|&e| e + 4.0 <= x).unwrap_or(row_ends.len());
                if row == row_ends.len() {
                    row_ends.push(x + width);
                } else {
                    row_ends[row] = x + width;
                }
                (x, TOP - (end.1 - 0.35) * UNIT + LABEL_ROW * row as f64)
            };
            let _ = writeln!(
                w,
                r#"<text x="{}" y="{}">L<tspan baseline-shift="super" font-size="11">{}</tspan></text>"#,
                num(x),
                num(y),
                sup
            );
        }
        let _ = writeln!(w, "</g>");

        let arrows = self.arrows();
        if !arrows.is_empty() {
            let _ = writeln!(w, r##"<g id="derivatives" stroke="#000" stroke-width="2.5" marker-end="url(#head)">"##);
            for a in &arrows {
                let (fx, fy) = (a.from.a1() as f64, a.from.a2() as f64);
                let (tx, ty) = (a.to.0 as f64, a.to.1 as f64);
                // stop short of the target dot
                let (ex, ey) = (fx + 0.9 * (tx - fx), fy + 0.9 * (ty - fy));
                let _ = writeln!(
                    w,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"><title>{} ({},{}) → ({},{})</title></line>"#,
                    px(fx),
                    py(fy),
                    px(ex),
                    py(ey),
                    a.label,
                    a.from.a1(),
                    a.from.a2(),
                    a.to.0,
                    a.to.1
                );
            }
            let _ = writeln!(w, "</g>");
        }
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="serif" font-size="16" text-anchor="middle">γ = {}</text>"#,
            num(width / 2.0),
            num(height - 12.0),
            format_rational(&self.shape.gamma())
        );
        let _ = writeln!(w, "</svg>");
        Ok(s)
    }
}

fn ray_title(ray: &BoundaryRay, ps: &[Rational]) -> String {
    let names: Vec<String> = ps.iter().map(|p| format!("L^{}", format_rational(p))).collect();
    format!("{}: {}·α1 + {}·α2 = {}", names.join(", "), ray.x_coeff, ray.y_coeff, ray.constant)
}

/// Groups exponents whose rays coincide, ordered by where the ray ends.
fn coinciding(rays: &[(Rational, BoundaryRay)]) -> Vec<(Vec<Rational>, BoundaryRay)> {
    let mut groups: Vec<(Vec<Rational>, BoundaryRay)> = Vec::new();
    for (p, ray) in rays {
        match groups.iter_mut().find(|(_, r)| r == ray) {
            Some((ps, _)) => ps.push(*p),
            None => groups.push((vec![*p], *ray)),
        }
    }
    for (ps, _) in &mut groups {
        ps.sort_by(|a, b| b.cmp(a));
    }
    groups.sort_by_key(|g| g.1.constant);
    groups
}

/// Fixed two-decimal rendering without a negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = if s == "-0.00" { "0.00".to_string() } else { s };
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// The ray n·x + m·y = T from the α2 axis to the edge of the window.
fn ray_segment(ray: &BoundaryRay, xmax: f64, ymin: f64) -> ((f64, f64), (f64, f64)) {
    let (a, b, t) = (ray.x_coeff as f64, ray.y_coeff as f64, ray.constant as f64);
    let start = (0.0, t / b);
    let x_at_bottom = (t - b * ymin) / a;
    let end = if x_at_bottom <= xmax { (x_at_bottom, ymin) } else { (xmax, (t - a * xmax) / b) };
    (start, end)
}

/// The window [0, xmax] × [ymin, 0] clipped to n·x + m·y ≥ T.
fn cone_polygon(ray: &BoundaryRay, xmax: f64, ymin: f64) -> Vec<(f64, f64)> {
    let (a, b, t) = (ray.x_coeff as f64, ray.y_coeff as f64, ray.constant as f64);
    let inside = |p: (f64, f64)| a * p.0 + b * p.1 >= t;
    let rect = [(0.0, 0.0), (xmax, 0.0), (xmax, ymin), (0.0, ymin)];
    let mut out = Vec::new();
    for k in 0..4 {
        let (p, q) = (rect[k], rect[(k + 1) % 4]);
        if inside(p) {
            out.push(p);
        }
        if inside(p) != inside(q) {
            let fp = a * p.0 + b * p.1 - t;
            let fq = a * q.0 + b * q.1 - t;
            let s = fp / (fp - fq);
            out.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
        }
    }
    out
}
