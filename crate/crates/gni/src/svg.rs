//! Log-scale convergence plots as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, IoContext, Result};

pub const LOG_FLOOR: f64 = 1e-16;
pub const LOG_CEIL: f64 = 1e16;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// One curve: `(iteration, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub title: String,
    pub y_label: String,
}

/// Value mapped onto the log axis; NaN yields `None`.
pub fn log_value(v: f64) -> Option<f64> {
    (!v.is_nan()).then(|| v.clamp(LOG_FLOOR, LOG_CEIL).log10())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render(series: &[Series], options: &PlotOptions) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Experiment("nothing to plot".into()));
    }
    let logs: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
            let last = s.points.len().saturating_sub(1);
            s.points
                .iter()
                .enumerate()
                .filter(|(i, _)| i % stride == 0 || *i == last)
                .filter_map(|(_, &(x, y))| log_value(y).map(|ly| (x, ly)))
                .collect()
        })
        .collect();
    let all = || logs.iter().flatten();
    let x_max = all().map(|p| p.0).fold(0.0, f64::max).max(1.0);
    let (mut y_lo, mut y_hi) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 0.0);
    }
    y_lo = y_lo.floor();
    y_hi = y_hi.ceil();
    if y_hi - y_lo < 1.0 {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + plot_w * x / x_max;
    let py = |ly: f64| TOP + plot_h * (y_hi - ly) / (y_hi - y_lo);

    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>
<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#,
        LEFT + plot_w / 2.0,
        escape(&options.title)
    )
    .unwrap();

    let decades = (y_hi - y_lo) as usize;
    let step = decades.div_ceil(10).max(1);
    for d in (0..=decades).step_by(step) {
        let ly = y_lo + d as f64;
        let y = py(ly);
        writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            ly as i64
        )
        .unwrap();
    }
    for t in 0..=5 {
        let xv = x_max * t as f64 / 5.0;
        let x = px(xv);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            xv.round()
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&options.y_label)
    )
    .unwrap();

    for (i, (s, pts)) in series.iter().zip(&logs).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, ly)| format!("{:.2},{:.2}", px(x), py(ly))).collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(series: &[Series], options: &PlotOptions, path: &Path) -> Result<()> {
    let svg = render(series, options)?;
    std::fs::write(path, svg).at(path)
}
