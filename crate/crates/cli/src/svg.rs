//! Space-time diagrams: fronts as segments in the `(x, t)` plane, `x`
//! across the unit period and `t` upwards.

use std::fmt::Write;

use shockcost_core::{FrontKind, SpaceTimeSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub stroke_width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 640.0,
            height: 480.0,
            margin: 48.0,
            stroke_width: 1.2,
        }
    }
}

/// A front piece inside one period, in model coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub t0: f64,
    pub x1: f64,
    pub t1: f64,
    pub kind: FrontKind,
}

/// Every front of every slab cut at integer crossings of `x` and shifted
/// into `[0, 1]`.
pub fn segments(sol: &SpaceTimeSolution) -> Vec<Segment> {
    let mut out = Vec::new();
    for slab in sol.slabs() {
        if slab.duration <= 0.0 {
            continue;
        }
        for f in &slab.fronts {
            let (mut xa, mut ta) = (f.x_start, slab.t_start);
            let (xb, tb) = (f.x_end, slab.t_end);
            let dir = if xb >= xa { 1.0 } else { -1.0 };
            loop {
                let base = if dir > 0.0 { xa.floor() } else { xa.ceil() - 1.0 };
                let edge = if dir > 0.0 { base + 1.0 } else { base };
                let done = if dir > 0.0 { xb <= edge } else { xb >= edge };
                let (xc, tc) = if done || xb == xa {
                    (xb, tb)
                } else {
                    (edge, slab.t_start + (tb - slab.t_start) * (edge - f.x_start) / (xb - f.x_start))
                };
                out.push(Segment {
                    x0: xa - base,
                    t0: ta,
                    x1: xc - base,
                    t1: tc,
                    kind: f.kind,
                });
                if done || xb == xa {
                    break;
                }
                xa = xc;
                ta = tc;
            }
        }
    }
    out
}

fn color(kind: FrontKind) -> &'static str {
    match kind {
        FrontKind::Entropic => "#1f5fbf",
        FrontKind::AntiEntropic => "#c8202a",
        FrontKind::Mixed => "#7b3fa0",
    }
}

pub fn emit_svg(sol: &SpaceTimeSolution, style: &SvgStyle) -> String {
    let (w, h, pad) = (style.width, style.height, style.margin);
    let t_max = sol.t_final();
    let t_span = if t_max > 0.0 { t_max } else { 1.0 };
    let px = |x: f64| pad + x * (w - 2.0 * pad);
    let py = |t: f64| h - pad - t / t_span * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1" fill="none"><rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/></g>"#,
        px(0.0),
        py(t_span),
        px(1.0) - px(0.0),
        py(0.0) - py(t_span)
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12" fill="black">"#);
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">0</text>"#, px(0.0), py(0.0) + 16.0);
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">1</text>"#, px(1.0), py(0.0) + 16.0);
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">x</text>"#, px(0.5), py(0.0) + 30.0);
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">0</text>"#, px(0.0) - 6.0, py(0.0));
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
        px(0.0) - 6.0,
        py(t_span) + 4.0,
        trim(t_span)
    );
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">t</text>"#, px(0.0) - 6.0, py(0.5 * t_span));
    let _ = writeln!(s, "</g>");

    let segs = segments(sol);
    if !segs.is_empty() {
        let _ = writeln!(s, r#"<g stroke-width="{:.3}" stroke-linecap="round">"#, style.stroke_width);
        for g in &segs {
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}"/>"#,
                px(g.x0),
                py(g.t0),
                px(g.x1),
                py(g.t1),
                color(g.kind)
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
    let legend = [
        (FrontKind::Entropic, "entropic"),
        (FrontKind::AntiEntropic, "anti-entropic"),
        (FrontKind::Mixed, "mixed"),
    ];
    for (k, (kind, label)) in legend.iter().enumerate() {
        let x = px(0.0) + 110.0 * k as f64;
        let y = pad * 0.5;
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{label}</text>"#,
            x,
            x + 18.0,
            color(*kind),
            x + 22.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let t = format!("{v:.4}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}
