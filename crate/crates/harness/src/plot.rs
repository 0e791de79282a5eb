//! Standalone SVG 1.1 emission: log-log convergence curves with shaded
//! confidence bands, optional dashed bound overlays, and a legend. No
//! external assets, deterministic output.

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::stats::AggregateCurve;

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 230.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct LogAxes {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl LogAxes {
    fn x(&self, v: f64) -> f64 {
        let t = (v.log10() - self.x_min) / (self.x_max - self.x_min);
        MARGIN_LEFT + t * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let t = (v.log10() - self.y_min) / (self.y_max - self.y_min);
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn fmt(v: f64) -> String {
    // fixed precision keeps the file deterministic and diff-friendly
    format!("{v:.2}")
}

fn decade_label(exp: i32) -> String {
    format!("1e{exp}")
}

/// Writes the plot and returns human-readable warnings (clipped points,
/// missing bands). Rejects an empty curve set.
pub fn emit_plot(
    curves: &[AggregateCurve],
    overlays: &[(String, Vec<(f64, f64)>)],
    path: &Path,
    caption: &str,
) -> Result<Vec<String>> {
    if curves.is_empty() {
        bail!("plot needs at least one curve");
    }
    let mut warnings = Vec::new();

    // positive values drive the log-domain extents
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    let mut clipped = 0usize;
    let consider = |v: f64, lo: &mut f64, hi: &mut f64| {
        if v.is_finite() && v > 0.0 {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    };
    for curve in curves {
        for i in 0..curve.checkpoints.len() {
            consider(curve.checkpoints[i] as f64, &mut x_lo, &mut x_hi);
            consider(curve.mean[i], &mut y_lo, &mut y_hi);
            if curve.ci_half[i].is_finite() {
                consider(curve.ci_high(i), &mut y_lo, &mut y_hi);
            }
            if !(curve.mean[i] > 0.0) {
                clipped += 1;
            }
        }
    }
    for (_, points) in overlays {
        for &(x, y) in points {
            consider(x, &mut x_lo, &mut x_hi);
            consider(y, &mut y_lo, &mut y_hi);
        }
    }
    if !y_lo.is_finite() {
        bail!("plot has no positive values to place on a log scale");
    }
    if clipped > 0 {
        warnings.push(format!(
            "{clipped} non-positive error value(s) clipped to the plot floor (log scale cannot show 0)"
        ));
    }

    let axes = LogAxes {
        x_min: x_lo.log10().floor(),
        x_max: x_hi.log10().ceil().max(x_lo.log10().floor() + 1.0),
        y_min: y_lo.log10().floor(),
        y_max: y_hi.log10().ceil().max(y_lo.log10().floor() + 1.0),
    };
    let floor = 10f64.powf(axes.y_min);
    let clip_y = |v: f64| if v.is_finite() && v > floor { v } else { floor };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!("<desc>{}</desc>\n", escape(caption)));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // gridlines and tick labels at decades
    let plot_left = MARGIN_LEFT;
    let plot_right = WIDTH - MARGIN_RIGHT;
    let plot_top = MARGIN_TOP;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    svg.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
    let mut exp = axes.x_min as i32;
    while exp as f64 <= axes.x_max {
        let x = axes.x(10f64.powi(exp));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            fmt(x),
            fmt(plot_top),
            fmt(x),
            fmt(plot_bottom)
        ));
        exp += 1;
    }
    let mut exp = axes.y_min as i32;
    while exp as f64 <= axes.y_max {
        let y = axes.y(10f64.powi(exp));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            fmt(plot_left),
            fmt(y),
            fmt(plot_right),
            fmt(y)
        ));
        exp += 1;
    }
    svg.push_str("</g>\n");

    svg.push_str("<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n");
    let mut exp = axes.x_min as i32;
    while exp as f64 <= axes.x_max {
        let x = axes.x(10f64.powi(exp));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(plot_bottom + 18.0),
            decade_label(exp)
        ));
        exp += 1;
    }
    let mut exp = axes.y_min as i32;
    while exp as f64 <= axes.y_max {
        let y = axes.y(10f64.powi(exp));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt(plot_left - 8.0),
            fmt(y + 4.0),
            decade_label(exp)
        ));
        exp += 1;
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">iteration</text>\n",
        fmt(0.5 * (plot_left + plot_right)),
        fmt(HEIGHT - 16.0)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">optimization error</text>\n",
        fmt(0.5 * (plot_top + plot_bottom)),
        fmt(0.5 * (plot_top + plot_bottom))
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" fill=\"#666666\">{}</text>\n",
        fmt(0.5 * WIDTH),
        fmt(HEIGHT - 2.0),
        escape(caption)
    ));
    svg.push_str("</g>\n");

    // frame
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
        fmt(plot_left),
        fmt(plot_top),
        fmt(plot_right - plot_left),
        fmt(plot_bottom - plot_top)
    ));

    // confidence bands first so curves draw over them
    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let mut band_ok = true;
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for i in 0..curve.checkpoints.len() {
            if !curve.ci_half[i].is_finite() {
                band_ok = false;
                break;
            }
            let x = axes.x(curve.checkpoints[i] as f64);
            upper.push((x, axes.y(clip_y(curve.ci_high(i)))));
            lower.push((x, axes.y(clip_y(curve.ci_low(i)))));
        }
        if band_ok && !upper.is_empty() {
            let mut d = String::from("M");
            for (x, y) in &upper {
                d.push_str(&format!(" {} {}", fmt(*x), fmt(*y)));
            }
            for (x, y) in lower.iter().rev() {
                d.push_str(&format!(" L {} {}", fmt(*x), fmt(*y)));
            }
            d.push('Z');
            svg.push_str(&format!(
                "<path d=\"{d}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n"
            ));
        } else {
            warnings.push(format!(
                "curve {:?}: confidence band unavailable (single trial)",
                curve.label
            ));
        }
    }

    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let points: Vec<String> = curve
            .checkpoints
            .iter()
            .zip(&curve.mean)
            .map(|(&k, &m)| format!("{},{}", fmt(axes.x(k as f64)), fmt(axes.y(clip_y(m)))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
            points.join(" ")
        ));
    }

    for (oi, (_, points)) in overlays.iter().enumerate() {
        let color = PALETTE[(curves.len() + oi) % PALETTE.len()];
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(axes.x(x)), fmt(axes.y(clip_y(y)))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\" stroke-dasharray=\"7,4\"/>\n",
            pts.join(" ")
        ));
    }

    // legend
    let legend_x = plot_right + 14.0;
    let mut legend_y = plot_top + 10.0;
    svg.push_str("<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n");
    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt(legend_x),
            fmt(legend_y - 4.0),
            fmt(legend_x + 26.0),
            fmt(legend_y - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt(legend_x + 32.0),
            fmt(legend_y),
            escape(&curve.label)
        ));
        legend_y += 20.0;
    }
    for (oi, (label, _)) in overlays.iter().enumerate() {
        let color = PALETTE[(curves.len() + oi) % PALETTE.len()];
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\" stroke-dasharray=\"7,4\"/>\n",
            fmt(legend_x),
            fmt(legend_y - 4.0),
            fmt(legend_x + 26.0),
            fmt(legend_y - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt(legend_x + 32.0),
            fmt(legend_y),
            escape(label)
        ));
        legend_y += 20.0;
    }
    svg.push_str("</g>\n</svg>\n");

    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(warnings)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
