//! Grouped bar charts of MRLT distributions as standalone SVG 1.1.

use std::fmt::Write;

/// Indices past the last one where some series exceeds this are dropped.
pub const TRUNCATION_MASS: f64 = 1e-3;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

/// Number of leading indices kept: up to and including the last index at
/// which any series has mass above [`TRUNCATION_MASS`], and at least one.
pub fn shown_indices(series: &[Series<'_>]) -> usize {
    let mut last = 0;
    for s in series {
        for (i, &v) in s.values.iter().enumerate() {
            if v > TRUNCATION_MASS {
                last = last.max(i);
            }
        }
    }
    let longest = series.iter().map(|s| s.values.len()).max().unwrap_or(1);
    (last + 1).min(longest.max(1))
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

/// Render the series on a shared `[0, 1]` axis.
pub fn render_svg(series: &[Series<'_>]) -> String {
    let shown = shown_indices(series);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let group_w = plot_w / shown as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let y_of = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }

    for (s_idx, s) in series.iter().enumerate() {
        let colour = PALETTE[s_idx % PALETTE.len()];
        let _ = writeln!(svg, r#"<g fill="{colour}">"#);
        for i in 0..shown {
            let v = s.values.get(i).copied().unwrap_or(0.0);
            let x = LEFT + group_w * (i as f64 + 0.1) + bar_w * s_idx as f64;
            let y = y_of(v);
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{:.2}"><title>{}: i={i}, {v:.4}</title></rect>"#,
                TOP + plot_h - y,
                escape(s.label)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let base = TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base:.2}" stroke="black"/>"#
    );
    for i in 0..shown {
        let x = LEFT + group_w * (i as f64 + 0.5);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{i}</text>"#,
            base + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">number of one-dimensional holes</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">MRLT</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (s_idx, s) in series.iter().enumerate() {
        let colour = PALETTE[s_idx % PALETTE.len()];
        let y = TOP + 16.0 * s_idx as f64;
        let x = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{colour}"/>"#,
            y
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 14.0,
            y + 9.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
