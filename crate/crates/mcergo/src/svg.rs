//! Minimal deterministic log-log line chart (SVG 1.1).

use std::fmt::Write;

use crate::error::{HarnessError, Result};

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Plots every series with positive coordinates on log10 axes. Output
/// depends only on the input values.
pub fn emit_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if series.is_empty() || pts.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    let (x0, x1) = padded(pts.iter().map(|p| p.0));
    let (y0, y1) = padded(pts.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            b + 5.0,
            b + 18.0
        );
    }
    for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            l - 5.0,
            l - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let visible: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|&(x, y)| (sx(x), sy(y)))
            .collect();
        if visible.len() > 1 {
            let d: Vec<String> = visible
                .iter()
                .enumerate()
                .map(|(j, (x, y))| format!("{}{x:.2} {y:.2}", if j == 0 { "M" } else { "L" }))
                .collect();
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                d.join(" ")
            );
        }
        for (x, y) in &visible {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            r - 150.0,
            ly - 9.0,
            r - 135.0,
            ly,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn padded(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(0.1);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(points: Vec<(f64, f64)>) -> Vec<Series> {
        vec![Series {
            label: "t_H".into(),
            points,
        }]
    }

    #[test]
    fn single_point_has_one_marker() {
        let svg = emit_svg("t", "c", "steps", &one(vec![(0.125, 30.0)])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("<path d=\"M") || svg.matches("<path").count() == 1);
    }

    #[test]
    fn identical_input_identical_bytes() {
        let s = one(vec![(0.125, 30.0), (0.0625, 110.0)]);
        assert_eq!(emit_svg("t", "c", "y", &s).unwrap(), emit_svg("t", "c", "y", &s).unwrap());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(emit_svg("t", "c", "y", &[]), Err(HarnessError::EmptySeries)));
        assert!(matches!(emit_svg("t", "c", "y", &one(vec![])), Err(HarnessError::EmptySeries)));
    }
}
