//! Planar figures: points, edges, induced discs, the witness and, when the
//! open discs have no common point, the ball `Omega` of radius `F(x*)`.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::graphs::Edge;
use crate::tverberg::{induced_balls, TverbergCertificate};

const WIDTH: f64 = 800.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        (x - self.min_x) * self.scale
    }

    /// SVG y grows downward.
    fn y(&self, y: f64) -> f64 {
        (self.max_y - y) * self.scale
    }

    fn len(&self, r: f64) -> f64 {
        r * self.scale
    }
}

fn num(v: f64) -> String {
    // Shortest round-trip form, at most six decimals.
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

pub fn render_svg(ps: &PointSet, edges: &[Edge], cert: Option<&TverbergCertificate>) -> Result<String> {
    if ps.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "figures are planar only, got dimension {}",
            ps.dim()
        )));
    }
    let balls = induced_balls(ps, edges)?;
    let omega = cert.filter(|c| c.value >= 0.0);

    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut include = |x: f64, y: f64, r: f64| {
        lo_x = lo_x.min(x - r);
        lo_y = lo_y.min(y - r);
        hi_x = hi_x.max(x + r);
        hi_y = hi_y.max(y + r);
    };
    for p in ps.points() {
        include(p.coords()[0], p.coords()[1], 0.0);
    }
    for b in &balls {
        include(b.center.coords()[0], b.center.coords()[1], b.radius);
    }
    if let Some(c) = cert {
        include(c.witness.coords()[0], c.witness.coords()[1], 0.0);
    }
    if let Some(c) = omega {
        include(c.witness.coords()[0], c.witness.coords()[1], c.value);
    }
    let extent = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let pad = 0.1 * extent;
    let (w, h) = (hi_x - lo_x + 2.0 * pad, hi_y - lo_y + 2.0 * pad);
    let frame = Frame {
        min_x: lo_x - pad,
        max_y: hi_y + pad,
        scale: WIDTH / w,
    };
    let height = h * frame.scale;
    let dot = 0.006 * WIDTH;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(WIDTH),
        num(height),
        num(WIDTH),
        num(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<g class="discs" fill="steelblue" fill-opacity="0.12" stroke="steelblue" stroke-width="1">"#);
    for b in &balls {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(frame.x(b.center.coords()[0])),
            num(frame.y(b.center.coords()[1])),
            num(frame.len(b.radius))
        );
    }
    let _ = writeln!(s, "</g>");
    if let Some(c) = omega {
        let _ = writeln!(
            s,
            r#"<circle class="omega" cx="{}" cy="{}" r="{}" fill="none" stroke="firebrick" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            num(frame.x(c.witness.coords()[0])),
            num(frame.y(c.witness.coords()[1])),
            num(frame.len(c.value))
        );
    }
    let _ = writeln!(s, r#"<g class="edges" stroke="black" stroke-width="1.5">"#);
    for &(i, j) in edges {
        let (a, b) = (ps.point(i).coords(), ps.point(j).coords());
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(frame.x(a[0])),
            num(frame.y(a[1])),
            num(frame.x(b[0])),
            num(frame.y(b[1]))
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="points" fill="black">"#);
    for p in ps.points() {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(frame.x(p.coords()[0])),
            num(frame.y(p.coords()[1])),
            num(dot)
        );
    }
    let _ = writeln!(s, "</g>");
    if let Some(c) = cert {
        let (x, y) = (frame.x(c.witness.coords()[0]), frame.y(c.witness.coords()[1]));
        let _ = writeln!(
            s,
            r#"<path class="witness" d="M {} {} L {} {} M {} {} L {} {}" stroke="firebrick" stroke-width="2"/>"#,
            num(x - dot),
            num(y - dot),
            num(x + dot),
            num(y + dot),
            num(x - dot),
            num(y + dot),
            num(x + dot),
            num(y - dot)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
