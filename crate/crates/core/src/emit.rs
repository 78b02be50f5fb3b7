//! CSV, JSON and SVG writers for [`CurveSet`]s.
//!
//! All output is a pure function of the curve set, so identical sweeps give
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::figures::CurveSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown format '{other}'; expected csv, json or svg"))),
        }
    }
}

/// Formats a number with 12 significant digits, trimming trailing zeros.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Union of all abscissae in ascending order.
fn shared_grid(set: &CurveSet) -> Vec<f64> {
    let mut xs: Vec<f64> = set.curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// CSV with header `x,<label1>,...`; a curve without a value at some `x`
/// leaves its cell empty.
pub fn to_csv(set: &CurveSet) -> Result<String> {
    set.validate()?;
    let mut out = String::from("x");
    for c in &set.curves {
        if c.label.contains([',', '"', '\n']) {
            return Err(Error::Config(format!("curve label '{}' cannot be written to CSV", c.label)));
        }
        out.push(',');
        out.push_str(&c.label);
    }
    out.push('\n');
    let mut cursors = vec![0usize; set.curves.len()];
    for x in shared_grid(set) {
        out.push_str(&format_number(x));
        for (c, cur) in set.curves.iter().zip(cursors.iter_mut()) {
            out.push(',');
            if let Some(&(px, py)) = c.points.get(*cur) {
                if px == x {
                    out.push_str(&format_number(py));
                    *cur += 1;
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn to_json(set: &CurveSet) -> Result<String> {
    set.validate()?;
    let mut s = serde_json::to_string_pretty(set).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round tick positions covering `[lo, hi]`.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Line plot on an 800×600 canvas with ticks and a legend.
pub fn to_svg(set: &CurveSet) -> Result<String> {
    set.validate()?;
    let xs = shared_grid(set);
    let tx = |x: f64| if set.log_x { x.log10() } else { x };
    let (x_lo, x_hi) = (tx(xs[0]), tx(xs[xs.len() - 1]));
    let ys = set.curves.iter().flat_map(|c| c.points.iter().map(|p| p.1));
    let (mut y_lo, mut y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if y_hi - y_lo <= f64::EPSILON * y_hi.abs().max(1.0) {
        y_lo -= 0.5 * y_lo.abs().max(1.0);
        y_hi += 0.5 * y_hi.abs().max(1.0);
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (tx(x) - x_lo) / x_span * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="400" y="28" text-anchor="middle" font-size="14">{}</text>"#, escape(&set.title));
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let x_ticks: Vec<f64> = if set.log_x {
        (x_lo.ceil() as i64..=x_hi.floor() as i64).map(|k| 10f64.powi(k as i32)).collect()
    } else {
        linear_ticks(x_lo, x_hi)
    };
    for t in x_ticks {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + plot_h,
            TOP + plot_h + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 20.0,
            format_number(t)
        );
    }
    for t in linear_ticks(y_lo, y_hi) {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 6.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 9.0,
            y + 4.0,
            format_number(t)
        );
    }
    let log_note = if set.log_x { " (log scale)" } else { "" };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{log_note}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0,
        escape(&set.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&set.y_label)
    );

    for (i, c) in set.curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }

    for (i, c) in set.curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let y = TOP + 18.0 + 18.0 * i as f64;
        let x = LEFT + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="3"/>"#,
            x + 24.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 30.0, y + 4.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render(set: &CurveSet, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(set),
        Format::Json => to_json(set),
        Format::Svg => to_svg(set),
    }
}

/// Renders and writes to `path`; nothing is written when rendering fails.
pub fn emit(set: &CurveSet, format: Format, path: &Path) -> Result<()> {
    let text = render(set, format)?;
    fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

/// A curve label with its `(x, y)` points.
pub type LabeledPoints = (String, Vec<(f64, f64)>);

/// Parses CSV produced by [`to_csv`] back into a curve set with the given
/// axis metadata.
pub fn parse_csv(text: &str) -> Result<Vec<LabeledPoints>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
    let labels: Vec<&str> = header.split(',').collect();
    if labels.first() != Some(&"x") {
        return Err(Error::Config("CSV header must start with 'x'".into()));
    }
    let mut curves: Vec<(String, Vec<(f64, f64)>)> =
        labels[1..].iter().map(|l| (l.to_string(), Vec::new())).collect();
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != labels.len() {
            return Err(Error::Config(format!("CSV row {} has {} cells, expected {}", n + 2, cells.len(), labels.len())));
        }
        let parse = |c: &str| c.parse::<f64>().map_err(|e| Error::Config(format!("CSV row {}: {e}", n + 2)));
        let x = parse(cells[0])?;
        for (curve, cell) in curves.iter_mut().zip(&cells[1..]) {
            if !cell.is_empty() {
                curve.1.push((x, parse(cell)?));
            }
        }
    }
    Ok(curves)
}
