//! Static line plots. Output depends only on the input values, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            x,
            y,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const DASHES: [&str; 3] = ["", "8 4", "3 3"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// `(lo, hi)` over finite values, padded when flat; `(0, 1)` when empty.
fn range<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64, span: f64) -> String {
    let decimals = (2.0 - span.log10().floor()).clamp(0.0, 6.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        format!("{:.decimals$}", 0.0)
    } else {
        s
    }
}

/// Renders the plot as an SVG document.
pub fn render_svg(series: &[Series], title: &str, x_label: &str) -> Result<String> {
    for s in series {
        if s.x.len() != s.y.len() {
            return Err(invalid(
                "series",
                format!(
                    "`{}` has {} x and {} y values",
                    s.label,
                    s.x.len(),
                    s.y.len()
                ),
            ));
        }
    }
    let (x0, x1) = range(series.iter().flat_map(|s| &s.x));
    let (y0, y1) = range(series.iter().flat_map(|s| &s.y));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let w = &mut out;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (sx, sy) = (px(xv), py(yv));
        writeln!(
            w,
            r#"<line x1="{sx:.2}" y1="{b:.2}" x2="{sx:.2}" y2="{b2:.2}" stroke="black"/><text x="{sx:.2}" y="{ty:.2}" text-anchor="middle">{}</text>"#,
            tick_label(xv, x1 - x0),
            b = TOP + ph,
            b2 = TOP + ph + 5.0,
            ty = TOP + ph + 18.0,
        )
        .unwrap();
        writeln!(
            w,
            r#"<line x1="{l2:.2}" y1="{sy:.2}" x2="{LEFT:.2}" y2="{sy:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{}</text>"#,
            tick_label(yv, y1 - y0),
            l2 = LEFT - 5.0,
            tx = LEFT - 8.0,
            ty = sy + 4.0,
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let dash = DASHES[(k / COLORS.len()) % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let mut points = String::new();
        for (&x, &y) in s.x.iter().zip(&s.y) {
            if x.is_finite() && y.is_finite() {
                write!(points, "{:.2},{:.2} ", px(x), py(y)).unwrap();
            }
        }
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            points.trim_end()
        )
        .unwrap();
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash_attr}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(out)
}

pub fn emit_svg(series: &[Series], title: &str, x_label: &str, path: &Path) -> Result<()> {
    let doc = render_svg(series, title, x_label)?;
    std::fs::write(path, doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine() -> Series {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y = x.iter().map(|t| t.sin()).collect();
        Series::new("sin", x, y)
    }

    #[test]
    fn empty_input_has_axes_only() {
        let doc = render_svg(&[], "empty", "t").unwrap();
        assert!(doc.starts_with("<?xml") && doc.trim_end().ends_with("</svg>"));
        assert!(!doc.contains("<polyline"));
        assert_eq!(doc.matches("<line").count(), 2 * (TICKS + 1));
    }

    #[test]
    fn identical_series_overlap_and_are_both_listed() {
        let a = sine();
        let b = Series {
            label: "copy".into(),
            ..a.clone()
        };
        let doc = render_svg(&[a, b], "two", "t").unwrap();
        let polys: Vec<&str> = doc.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(polys.len(), 2);
        let pts = |l: &str| l.split("points=").nth(1).unwrap().to_string();
        assert_eq!(pts(polys[0]), pts(polys[1]));
        assert!(doc.contains(">sin</text>") && doc.contains(">copy</text>"));
    }

    #[test]
    fn output_is_deterministic() {
        let s = [sine()];
        assert_eq!(
            render_svg(&s, "a", "t").unwrap(),
            render_svg(&s, "a", "t").unwrap()
        );
        let dir = tempfile::tempdir().unwrap();
        let (p, q) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        emit_svg(&s, "a", "t", &p).unwrap();
        emit_svg(&s, "a", "t", &q).unwrap();
        assert_eq!(std::fs::read(p).unwrap(), std::fs::read(q).unwrap());
    }

    #[test]
    fn labels_are_escaped_and_lengths_checked() {
        let s = Series::new("a<b & c", vec![0.0, 1.0], vec![1.0, 1.0]);
        let doc = render_svg(&[s], "x", "t").unwrap();
        assert!(doc.contains("a&lt;b &amp; c"));
        let bad = Series::new("bad", vec![0.0], vec![]);
        assert!(render_svg(&[bad], "x", "t").is_err());
    }
}
