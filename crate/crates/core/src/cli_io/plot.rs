use std::fmt::Write;

use super::format_g6;
use crate::simulator::SweepRow;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

struct Series {
    title: &'static str,
    y_label: &'static str,
    /// (x, mean, std)
    points: Vec<(f64, f64, f64)>,
    y_max: f64,
}

/// Two side-by-side line charts of a sweep, PDR on the left and energy rate
/// on the right, each point with a ±1 standard deviation whisker.
pub fn sweep_svg(axis: &str, rows: &[SweepRow]) -> String {
    let pdr = Series {
        title: "Packet delivery ratio",
        y_label: "PDR",
        points: rows.iter().filter_map(|r| r.pdr.map(|(m, s)| (r.value, m, s))).collect(),
        y_max: 1.0,
    };
    let energy_points: Vec<_> = rows.iter().map(|r| (r.value, r.energy_rate.0, r.energy_rate.1)).collect();
    let top = energy_points.iter().map(|p| p.1 + p.2).fold(0.0, f64::max);
    let energy = Series {
        title: "Energy consumption rate",
        y_label: "energy consumed (%)",
        points: energy_points,
        y_max: if top > 0.0 { top * 1.1 } else { 1.0 },
    };
    let (x_min, x_max) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.value), hi.max(r.value)));
    let (x_min, x_max) = if x_min < x_max { (x_min, x_max) } else { (x_min - 1.0, x_min + 1.0) };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = 2.0 * PANEL_W,
        h = PANEL_H
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, series) in [pdr, energy].iter().enumerate() {
        panel(&mut svg, i as f64 * PANEL_W, series, axis, x_min, x_max, rows);
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, dx: f64, s: &Series, axis: &str, x_min: f64, x_max: f64, rows: &[SweepRow]) {
    let (left, right) = (dx + MARGIN_L, dx + PANEL_W - MARGIN_R);
    let (top, bottom) = (MARGIN_T, PANEL_H - MARGIN_B);
    let px = |x: f64| left + (x - x_min) / (x_max - x_min) * (right - left);
    let py = |y: f64| bottom - (y / s.y_max).clamp(0.0, 1.0) * (bottom - top);

    let _ = writeln!(svg, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (left + right) / 2.0, s.title);
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.1},{top:.1} V{bottom:.1} H{right:.1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let y = s.y_max * k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y1:.1}" x2="{right:.1}" y2="{y1:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            left,
            left - 6.0,
            py(y) + 4.0,
            format_g6((y * 1e4).round() / 1e4),
            y1 = py(y)
        );
    }
    for r in rows {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(r.value),
            bottom + 16.0,
            format_g6(r.value)
        );
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{axis}</text>"#, (left + right) / 2.0, PANEL_H - 12.0);
    let _ = writeln!(
        svg,
        r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        dx + 16.0,
        (top + bottom) / 2.0,
        s.y_label
    );

    if s.points.is_empty() {
        return;
    }
    let line: Vec<String> = s.points.iter().map(|&(x, m, _)| format!("{:.1},{:.1}", px(x), py(m))).collect();
    let _ = writeln!(svg, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##, line.join(" "));
    for &(x, m, sd) in &s.points {
        let (x, lo, hi) = (px(x), py(m - sd), py(m + sd));
        let _ = writeln!(
            svg,
            r##"<path d="M{x:.1},{lo:.1} V{hi:.1} M{:.1},{lo:.1} H{:.1} M{:.1},{hi:.1} H{:.1}" stroke="#1f77b4"/><circle cx="{x:.1}" cy="{:.1}" r="3.5" fill="#1f77b4"/>"##,
            x - 4.0,
            x + 4.0,
            x - 4.0,
            x + 4.0,
            py(m)
        );
    }
}
