//! Minimal deterministic SVG line charts.
//!
//! Coordinates are printed with a fixed number of decimals and nothing
//! time- or run-dependent is embedded, so identical input gives identical bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;
const TICKS: usize = 5;

const PALETTE: [&str; 6] = [
    "#1f77b4", // blue
    "#d62728", // red
    "#2ca02c", // green
    "#9467bd", // purple
    "#ff7f0e", // orange
    "#17becf", // cyan
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean Gini index against spine length, markers on each point.
    GiniVsM,
    /// Lorenz curves over the unit square with the equality diagonal.
    Lorenz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

impl PlotSpec {
    /// Axis ranges covering every series, padded by 5% on y.
    pub fn gini_vs_m(title: impl Into<String>, series: Vec<Series>) -> Self {
        let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
        let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
        let (x_lo, x_hi) = bounds(xs);
        let (y_lo, y_hi) = bounds(ys);
        let pad = ((y_hi - y_lo) * 0.05).max(0.01);
        PlotSpec {
            kind: PlotKind::GiniVsM,
            title: title.into(),
            x_label: "m".into(),
            y_label: "mean Gini index".into(),
            x_range: (x_lo, x_hi),
            y_range: ((y_lo - pad).max(0.0), y_hi + pad),
            series,
        }
    }

    pub fn lorenz(title: impl Into<String>, series: Vec<Series>) -> Self {
        PlotSpec {
            kind: PlotKind::Lorenz,
            title: title.into(),
            x_label: "population share".into(),
            y_label: "wealth share".into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            series,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(Error::InvalidConfig("plot has no series".into()));
        }
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("plot axes must be finite".into()));
        }
        Ok(())
    }

    pub fn render(&self) -> Result<String> {
        self.validate()?;
        let (x0, mut x1) = self.x_range;
        let (y0, mut y1) = self.y_range;
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut svg = String::new();
        let w = &mut svg;
        // Writing to a String cannot fail.
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Axes and ticks.
        let _ = writeln!(
            w,
            r#"<rect x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
        );
        for k in 0..=TICKS {
            let t = k as f64 / TICKS as f64;
            let xv = x0 + t * (x1 - x0);
            let yv = y0 + t * (y1 - y0);
            let (px, py) = (sx(xv), sy(yv));
            let base = MARGIN_TOP + plot_h;
            let _ = writeln!(
                w,
                r#"<line x1="{px:.2}" y1="{base:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                base + 5.0
            );
            let _ = writeln!(
                w,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                base + 18.0,
                tick_label(xv)
            );
            let _ = writeln!(
                w,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
                MARGIN_LEFT - 5.0
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 8.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        if self.kind == PlotKind::Lorenz {
            let _ = writeln!(
                w,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888888" stroke-dasharray="4 4"/>"##,
                sx(0.0),
                sy(0.0),
                sx(1.0),
                sy(1.0)
            );
        }

        for (idx, series) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let path: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            if self.kind == PlotKind::GiniVsM {
                for &(x, y) in &series.points {
                    let _ = writeln!(
                        w,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            }
            // Legend, top-left inside the frame.
            let ly = MARGIN_TOP + 16.0 + 16.0 * idx as f64;
            let lx = MARGIN_LEFT + 10.0;
            let _ = writeln!(
                w,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 10.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
