//! Static SVG rendering of a styled, laid-out network.

use std::fmt::Write as _;

use crate::graph::{Layout, SemanticNetwork};

pub const CANVAS: f64 = 800.0;
/// Stroke width of an edge of weight 1.
pub const MAX_STROKE: f64 = 3.0;
pub const DEFAULT_RADIUS: f64 = 4.0;

/// Index 0 is reserved for unassigned vertices; classes 1.. cycle through
/// the remaining seven colors.
pub const PALETTE: [&str; 8] = [
    "#9e9e9e", // 0 unassigned
    "#1f77b4", // 1 blue
    "#d62728", // 2 red
    "#2ca02c", // 3 green
    "#ff7f0e", // 4 orange
    "#9467bd", // 5 purple
    "#8c564b", // 6 brown
    "#17becf", // 7 cyan
];

pub fn palette_color(class: usize) -> &'static str {
    if class == 0 {
        PALETTE[0]
    } else {
        PALETTE[1 + (class - 1) % (PALETTE.len() - 1)]
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Positions come from `layout`; vertices beyond its length sit at the centre.
pub fn write_svg(network: &SemanticNetwork, layout: &Layout) -> Vec<u8> {
    let px = |i: usize| {
        let (x, y) = layout.positions.get(i).copied().unwrap_or((0.5, 0.5));
        // SVG y grows downwards
        (x * CANVAS, (1.0 - y) * CANVAS)
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push_str("<g stroke=\"#666666\" stroke-opacity=\"0.6\">\n");
    for e in network.edges() {
        let (x1, y1) = px(e.u);
        let (x2, y2) = px(e.v);
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke-width="{:.2}"/>"#,
            e.weight * MAX_STROKE
        );
    }
    out.push_str("</g>\n<g stroke=\"black\" stroke-width=\"0.5\">\n");
    for (i, v) in network.vertices().iter().enumerate() {
        let (x, y) = px(i);
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{}"/>"#,
            v.size.unwrap_or(DEFAULT_RADIUS),
            palette_color(v.color.unwrap_or(0))
        );
    }
    out.push_str("</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n");
    for (i, v) in network.vertices().iter().enumerate() {
        let (x, y) = px(i);
        let r = v.size.unwrap_or(DEFAULT_RADIUS);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + r + 2.0,
            y + 4.0,
            escape(&v.label)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Vertex};

    fn layout(positions: Vec<(f64, f64)>) -> Layout {
        Layout {
            positions,
            stress: 0.0,
            initial_stress: 0.0,
            iterations: 0,
            seed: 1,
        }
    }

    #[test]
    fn empty_drawing_is_valid() {
        let text = String::from_utf8(write_svg(&SemanticNetwork::default(), &layout(vec![]))).unwrap();
        assert!(text.contains("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(!text.contains("<circle"));
    }

    #[test]
    fn stroke_ratio_and_determinism() {
        let net = SemanticNetwork::new(
            vec![Vertex::new("a<b"), Vertex::new("c"), Vertex::new("d")],
            vec![Edge { u: 0, v: 1, weight: 1.0 }, Edge { u: 1, v: 2, weight: 0.2 }],
        )
        .unwrap();
        let l = layout(vec![(0.1, 0.1), (0.5, 0.5), (0.9, 0.9)]);
        let a = write_svg(&net, &l);
        assert_eq!(a, write_svg(&net, &l));
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("stroke-width=\"3.00\""));
        assert!(text.contains("stroke-width=\"0.60\""));
        assert!(text.contains("a&lt;b"));
        assert_eq!(text.matches("<circle").count(), 3);
        assert_eq!(text.matches("<text").count(), 3);
    }

    #[test]
    fn palette_cycles_past_seven() {
        assert_eq!(palette_color(0), "#9e9e9e");
        assert_eq!(palette_color(1), palette_color(8));
        assert_ne!(palette_color(1), palette_color(2));
    }
}
