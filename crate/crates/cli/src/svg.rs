//! Static SVG: Newton diagrams (`t1` rightward, `t2` upward, unit grid) and log-log decay plots.

use std::fmt::Write;

use rheight::newton::{Face, NewtonPolyhedron, Point, RHeight, Weight};
use rheight::numerics::DecayFit;
use rheight::Rational;

fn f(q: &Rational) -> f64 {
    rheight::to_f64(q)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Viewport in exponent space.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub t1_min: f64,
    pub t1_max: f64,
    pub t2_min: f64,
    pub t2_max: f64,
    pub scale: f64,
    pub margin: f64,
}

impl Frame {
    fn fit(t1: (f64, f64), t2: (f64, f64)) -> Self {
        let (t1_min, t1_max) = (t1.0.floor(), t1.1.ceil());
        let (t2_min, t2_max) = (t2.0.floor(), t2.1.ceil());
        let span = (t1_max - t1_min).max(t2_max - t2_min).max(1.0);
        let scale = (640.0 / span).clamp(6.0, 60.0);
        Frame { t1_min, t1_max, t2_min, t2_max, scale, margin: 48.0 }
    }

    pub fn x(&self, t1: f64) -> f64 {
        self.margin + (t1 - self.t1_min) * self.scale
    }

    pub fn y(&self, t2: f64) -> f64 {
        self.margin + (self.t2_max - t2) * self.scale
    }

    /// Inverse of `(x, y)`.
    pub fn to_exponent(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.margin) / self.scale + self.t1_min, self.t2_max - (y - self.margin) / self.scale)
    }

    fn width(&self) -> f64 {
        2.0 * self.margin + (self.t1_max - self.t1_min) * self.scale
    }

    fn height(&self) -> f64 {
        2.0 * self.margin + (self.t2_max - self.t2_min) * self.scale
    }

    /// Clips the line `{p + s·d}` to the frame, limited to `s ∈ [s_lo, s_hi]`.
    fn clip(&self, p: (f64, f64), d: (f64, f64), s_lo: f64, s_hi: f64) -> Option<((f64, f64), (f64, f64))> {
        let (mut lo, mut hi) = (s_lo, s_hi);
        for (pc, dc, a, b) in [(p.0, d.0, self.t1_min, self.t1_max), (p.1, d.1, self.t2_min, self.t2_max)] {
            if dc == 0.0 {
                if pc < a || pc > b {
                    return None;
                }
            } else {
                let (s1, s2) = ((a - pc) / dc, (b - pc) / dc);
                lo = lo.max(s1.min(s2));
                hi = hi.min(s1.max(s2));
            }
        }
        (lo < hi).then(|| ((p.0 + lo * d.0, p.1 + lo * d.1), (p.0 + hi * d.0, p.1 + hi * d.1)))
    }
}

/// What to draw beyond the Newton polyhedron itself.
pub struct DiagramSpec<'a> {
    pub title: String,
    pub support: &'a [Point],
    pub polyhedron: &'a NewtonPolyhedron,
    /// Principal line `L` with its r-height data; draws `L⁺`, `Δ^(m)` and the crossing.
    pub r_height: Option<&'a RHeight>,
}

fn pt(p: &Point) -> (f64, f64) {
    (f(&p.t1), f(&p.t2))
}

fn frame_for(spec: &DiagramSpec<'_>) -> Frame {
    let mut t1 = (0.0f64, 1.0f64);
    let mut t2 = (0.0f64, 1.0f64);
    let mut include = |(a, b): (f64, f64)| {
        t1 = (t1.0.min(a), t1.1.max(a));
        t2 = (t2.0.min(b), t2.1.max(b));
    };
    for p in spec.support {
        include(pt(p));
    }
    if let Some(r) = spec.r_height {
        let c = pt(&r.crossing);
        include(c);
        include((c.0 - 1.0, c.1 + 1.0));
    }
    t1.1 += 1.0;
    t2.1 += 1.0;
    Frame::fit(t1, t2)
}

fn edge_label(w: &Weight, l: usize) -> String {
    format!("κ^{l} = ({}, {})", w.k1, w.k2)
}

fn line(out: &mut String, fr: &Frame, a: (f64, f64), b: (f64, f64), class: &str, extra: &str) {
    let _ = writeln!(
        out,
        r#"  <line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"{extra}/>"#,
        fr.x(a.0),
        fr.y(a.1),
        fr.x(b.0),
        fr.y(b.1)
    );
}

fn text(out: &mut String, x: f64, y: f64, class: &str, s: &str) {
    let _ = writeln!(out, r#"  <text class="{class}" x="{x:.3}" y="{y:.3}">{}</text>"#, esc(s));
}

/// Newton diagram with lattice, support, boundary, bisectrix, principal face and
/// (when given) the augmented half-line `L⁺`, the line `Δ^(m)` and its crossing.
pub fn newton_diagram(spec: &DiagramSpec<'_>) -> (String, Frame) {
    let fr = frame_for(spec);
    let poly = spec.polyhedron;
    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = fr.width(),
        h = fr.height()
    );
    o.push_str(concat!(
        "  <style>\n",
        "    text { font-family: monospace; font-size: 11px; fill: #222; }\n",
        "    .lattice { stroke: #e4e4e4; stroke-width: 1; }\n",
        "    .axis { stroke: #888; stroke-width: 1.2; }\n",
        "    .boundary { stroke: #1f4e9c; stroke-width: 2; fill: none; }\n",
        "    .region { fill: #dfe8f7; stroke: none; }\n",
        "    .principal { stroke: #d2461e; stroke-width: 4; }\n",
        "    .bisectrix { stroke: #555; stroke-dasharray: 2 3; }\n",
        "    .delta { stroke: #2a8f3a; stroke-width: 1.5; }\n",
        "    .lplus { stroke: #9c1f8c; stroke-width: 1.5; stroke-dasharray: 6 4; }\n",
        "    .support { fill: #222; }\n",
        "    .vertex { fill: #1f4e9c; }\n",
        "    .crossing { fill: #2a8f3a; stroke: #fff; }\n",
        "  </style>\n"
    ));
    text(&mut o, fr.margin, fr.margin / 2.0, "title", &spec.title);

    // Shaded polyhedron: vertices, then out to the frame corners.
    let vs: Vec<(f64, f64)> = poly.vertices().iter().map(pt).collect();
    let mut region = format!("{:.3},{:.3}", fr.x(vs[0].0), fr.y(fr.t2_max));
    for v in &vs {
        let _ = write!(region, " {:.3},{:.3}", fr.x(v.0), fr.y(v.1));
    }
    let last = vs[vs.len() - 1];
    let _ = write!(region, " {:.3},{:.3} {:.3},{:.3}", fr.x(fr.t1_max), fr.y(last.1), fr.x(fr.t1_max), fr.y(fr.t2_max));
    let _ = writeln!(o, r#"  <polygon class="region" points="{region}"/>"#);

    for k in (fr.t1_min as i64)..=(fr.t1_max as i64) {
        line(&mut o, &fr, (k as f64, fr.t2_min), (k as f64, fr.t2_max), "lattice", "");
    }
    for k in (fr.t2_min as i64)..=(fr.t2_max as i64) {
        line(&mut o, &fr, (fr.t1_min, k as f64), (fr.t1_max, k as f64), "lattice", "");
    }
    line(&mut o, &fr, (0.0, fr.t2_min), (0.0, fr.t2_max), "axis", "");
    line(&mut o, &fr, (fr.t1_min, 0.0), (fr.t1_max, 0.0), "axis", "");
    for k in (fr.t1_min as i64)..=(fr.t1_max as i64) {
        if k >= 0 {
            text(&mut o, fr.x(k as f64) - 3.0, fr.y(fr.t2_min) + 14.0, "tick", &k.to_string());
        }
    }
    for k in (fr.t2_min as i64)..=(fr.t2_max as i64) {
        text(&mut o, fr.margin - 22.0, fr.y(k as f64) + 4.0, "tick", &k.to_string());
    }
    text(&mut o, fr.x(fr.t1_max) - 10.0, fr.y(fr.t2_min) + 30.0, "axis-label", "t1");
    text(&mut o, fr.margin - 30.0, fr.margin - 10.0, "axis-label", "t2");

    if let Some(((a0, a1), (b0, b1))) = fr.clip((0.0, 0.0), (1.0, 1.0), f64::NEG_INFINITY, f64::INFINITY) {
        line(&mut o, &fr, (a0, a1), (b0, b1), "bisectrix", "");
    }

    // Boundary: vertical ray, compact edges, horizontal ray.
    let mut path = format!("M {:.3} {:.3}", fr.x(vs[0].0), fr.y(fr.t2_max));
    for v in &vs {
        let _ = write!(path, " L {:.3} {:.3}", fr.x(v.0), fr.y(v.1));
    }
    let _ = write!(path, " L {:.3} {:.3}", fr.x(fr.t1_max), fr.y(last.1));
    let _ = writeln!(o, r#"  <path class="boundary" d="{path}"/>"#);

    match poly.principal_face() {
        Face::CompactEdge { index, edge } => {
            let extra = format!(r#" data-edge="{}""#, index + 1);
            line(&mut o, &fr, pt(&edge.left), pt(&edge.right), "principal", &extra);
        }
        Face::Unbounded { ray, point, .. } => {
            let p = pt(&point);
            let end = match ray {
                rheight::newton::Ray::Horizontal => (fr.t1_max, p.1),
                rheight::newton::Ray::Vertical => (p.0, fr.t2_max),
            };
            line(&mut o, &fr, p, end, "principal", "");
        }
        Face::Vertex { point, .. } => {
            let p = pt(&point);
            let _ = writeln!(o, r#"  <circle class="principal" cx="{:.3}" cy="{:.3}" r="7" fill="none"/>"#, fr.x(p.0), fr.y(p.1));
        }
    }

    for (l, e) in poly.edges().iter().enumerate() {
        let (a, b) = (pt(&e.left), pt(&e.right));
        let (mx, my) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        text(&mut o, fr.x(mx) + 6.0, fr.y(my) - 6.0, "edge-label", &edge_label(&e.weight, l + 1));
    }

    if let Some(r) = spec.r_height {
        let anchor = pt(&r.anchor);
        let dir = (-f(&r.line.k2), f(&r.line.k1));
        if let Some((a, b)) = fr.clip(anchor, dir, 0.0, f64::INFINITY) {
            let extra = format!(r#" data-k1="{}" data-k2="{}""#, r.line.k1, r.line.k2);
            line(&mut o, &fr, a, b, "lplus", &extra);
            text(&mut o, fr.x(b.0) + 4.0, fr.y(b.1) + 12.0, "lplus-label", "L+");
        }
        let shift = f(&r.m) + 1.0;
        if let Some((a, b)) = fr.clip((0.0, shift), (1.0, 1.0), f64::NEG_INFINITY, f64::INFINITY) {
            let extra = format!(r#" data-m="{}""#, r.m);
            line(&mut o, &fr, a, b, "delta", &extra);
            text(&mut o, fr.x(b.0) - 40.0, fr.y(b.1) + 14.0, "delta-label", &format!("Δ^({})", r.m));
        }
        let c = pt(&r.crossing);
        let _ = writeln!(
            o,
            r#"  <circle class="crossing" cx="{:.3}" cy="{:.3}" r="5" data-t1="{}" data-t2="{}"/>"#,
            fr.x(c.0),
            fr.y(c.1),
            r.crossing.t1,
            r.crossing.t2
        );
        text(
            &mut o,
            fr.x(c.0) + 8.0,
            fr.y(c.1) - 8.0,
            "crossing-label",
            &format!("({}, {}) = (h_r - m, h_r + 1)", r.crossing.t1, r.crossing.t2),
        );
    }

    for p in spec.support {
        let c = pt(p);
        let _ = writeln!(
            o,
            r#"  <circle class="support" cx="{:.3}" cy="{:.3}" r="3" data-t1="{}" data-t2="{}"/>"#,
            fr.x(c.0),
            fr.y(c.1),
            p.t1,
            p.t2
        );
    }
    for v in poly.vertices() {
        let c = pt(v);
        let _ = writeln!(
            o,
            r#"  <circle class="vertex" cx="{:.3}" cy="{:.3}" r="4.5" data-t1="{}" data-t2="{}"/>"#,
            fr.x(c.0),
            fr.y(c.1),
            v.t1,
            v.t2
        );
        text(&mut o, fr.x(c.0) + 7.0, fr.y(c.1) + 14.0, "vertex-label", &format!("({}, {})", v.t1, v.t2));
    }
    o.push_str("</svg>\n");
    (o, fr)
}

/// `log10|I|` against `log10 λ` for each fit, with the fitted line over the fit window.
pub fn loglog_plot(fits: &[(String, &DecayFit)]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const M: f64 = 64.0;
    let pts: Vec<(f64, f64)> = fits
        .iter()
        .flat_map(|(_, d)| d.lambda_grid.iter().zip(&d.magnitudes))
        .filter(|(_, m)| **m > 0.0)
        .map(|(l, m)| (l.log10(), m.log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (2.0, 5.0, -5.0, 0.0);
    }
    let (x0, x1, y0, y1) = (x0.floor(), x1.ceil(), y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let palette = ["#1f4e9c", "#d2461e", "#2a8f3a", "#9c1f8c", "#b8860b", "#555555", "#008b8b", "#8b0000"];
    let mut o = String::new();
    let _ = writeln!(o, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    o.push_str("  <style>\n    text { font-family: monospace; font-size: 11px; fill: #222; }\n    .grid { stroke: #e4e4e4; }\n  </style>\n");
    for k in (x0 as i64)..=(x1 as i64) {
        let x = sx(k as f64);
        let _ = writeln!(o, r#"  <line class="grid" x1="{x:.2}" y1="{M}" x2="{x:.2}" y2="{:.2}"/>"#, H - M);
        text(&mut o, x - 12.0, H - M + 16.0, "tick", &format!("1e{k}"));
    }
    for k in (y0 as i64)..=(y1 as i64) {
        let y = sy(k as f64);
        let _ = writeln!(o, r#"  <line class="grid" x1="{M}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, W - M);
        text(&mut o, 8.0, y + 4.0, "tick", &format!("1e{k}"));
    }
    text(&mut o, W / 2.0 - 20.0, H - 12.0, "axis-label", "lambda");
    text(&mut o, 8.0, M - 24.0, "axis-label", "|I(lambda)|");
    for (i, (label, d)) in fits.iter().enumerate() {
        let col = palette[i % palette.len()];
        let mut poly = String::new();
        for (l, m) in d.lambda_grid.iter().zip(&d.magnitudes) {
            if *m > 0.0 {
                let _ = write!(poly, "{:.2},{:.2} ", sx(l.log10()), sy(m.log10()));
            }
        }
        let _ = writeln!(o, r#"  <polyline points="{}" fill="none" stroke="{col}" stroke-width="1.5"/>"#, poly.trim_end());
        let s = d.fit_start.min(d.lambda_grid.len().saturating_sub(1));
        if d.fitted_exponent.is_finite() && d.magnitudes[s] > 0.0 {
            let (la, lb) = (d.lambda_grid[s].log10(), d.lambda_grid[d.lambda_grid.len() - 1].log10());
            let ya = d.magnitudes[s].log10();
            let yb = ya - d.fitted_exponent * (lb - la);
            let _ = writeln!(
                o,
                r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{col}" stroke-dasharray="5 3"/>"#,
                sx(la),
                sy(ya),
                sx(lb),
                sy(yb)
            );
        }
        let legend = format!("{label}: fitted {:.4}, expected {:.4} ({:?})", d.fitted_exponent, d.expected_exponent, d.verdict);
        let _ = writeln!(o, r#"  <rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{col}"/>"#, W - 2.0 * M - 300.0, M + 14.0 * i as f64);
        text(&mut o, W - 2.0 * M - 286.0, M + 9.0 + 14.0 * i as f64, "legend", &legend);
    }
    o.push_str("</svg>\n");
    o
}
