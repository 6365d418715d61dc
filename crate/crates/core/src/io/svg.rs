use std::fmt::Write;

use crate::persistence::PersistencePoint;

/// Height at which points that never die are drawn.
pub const INFINITY_DRAWN_AT: f64 = 1.1;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const MAX: f64 = 1.15;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One colour of points in a diagram plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Plot coordinates of diagram points, with infinite deaths at [`INFINITY_DRAWN_AT`].
pub fn diagram_series<'a>(label: &str, points: impl IntoIterator<Item = &'a PersistencePoint<f64>>) -> Series {
    Series {
        label: label.to_string(),
        points: points
            .into_iter()
            .map(|p| (p.birth, p.death.plotted(INFINITY_DRAWN_AT)))
            .collect(),
    }
}

fn x(v: f64) -> f64 {
    MARGIN + v.clamp(0.0, MAX) / MAX * (SIZE - 2.0 * MARGIN)
}

fn y(v: f64) -> f64 {
    SIZE - x(v)
}

/// Birth/death scatter with the diagonal, the `.5` guides and a dashed line at the
/// infinity height.
pub fn scatter_svg(title: &str, series: &[Series]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let line = |s: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, style: &str| {
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#
        );
    };
    line(&mut s, x(0.0), y(0.0), x(MAX), y(0.0), r#"stroke="black""#);
    line(&mut s, x(0.0), y(0.0), x(0.0), y(MAX), r#"stroke="black""#);
    line(&mut s, x(0.0), y(0.0), x(MAX), y(MAX), r#"stroke="gray""#);
    line(
        &mut s,
        x(0.5),
        y(0.0),
        x(0.5),
        y(MAX),
        r#"stroke="gray" stroke-dasharray="4 3""#,
    );
    line(
        &mut s,
        x(0.0),
        y(0.5),
        x(MAX),
        y(0.5),
        r#"stroke="gray" stroke-dasharray="4 3""#,
    );
    line(
        &mut s,
        x(0.0),
        y(INFINITY_DRAWN_AT),
        x(MAX),
        y(INFINITY_DRAWN_AT),
        r#"stroke="lightgray" stroke-dasharray="1 3""#,
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="10">{tick}</text>"#,
            x(tick),
            y(0.0) + 14.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{tick}</text>"#,
            x(0.0) - 4.0,
            y(tick) + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">inf</text>"#,
        x(0.0) - 4.0,
        y(INFINITY_DRAWN_AT) + 3.0
    );
    for (i, series) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            s,
            r#"<g fill="{color}" fill-opacity="0.6"><title>{}</title>"#,
            escape(&series.label)
        );
        for &(b, d) in &series.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, x(b), y(d));
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            x(0.62),
            y(0.35) + 14.0 * i as f64,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
