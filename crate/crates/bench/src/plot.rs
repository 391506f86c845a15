use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};

/// One curve: a label and `(k, gap)` points in increasing `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 140.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;
/// Points kept per decade of `k`.
const POINTS_PER_DECADE: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Drops points closer than `1/POINTS_PER_DECADE` decades to the previous
/// kept one, plus every nonpositive gap. The last point is always kept.
fn thin(points: &[(u64, f64)]) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (idx, &(k, g)) in points.iter().enumerate() {
        if k == 0 || !(g > 0.0 && g.is_finite()) {
            continue;
        }
        let lk = (k as f64).log10();
        if lk - last >= 1.0 / POINTS_PER_DECADE || idx + 1 == points.len() {
            out.push((k, g));
            last = lk;
        }
    }
    out
}

/// Writes a log-log SVG of gap against `k`, one polyline per trace with
/// the legend in input order, and the plotted points as CSV next to it
/// (same path, `.csv` extension). Returns the CSV path.
pub fn emit_plot(traces: &[Trace], path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    if traces.is_empty() {
        return Err(BenchError::Invalid("nothing to plot".into()));
    }
    let thinned: Vec<Vec<(u64, f64)>> = traces.iter().map(|t| thin(&t.points)).collect();
    let all = || thinned.iter().flatten();
    let k_max = all().map(|p| p.0).max().unwrap_or(1).max(10);
    let x_decades = (k_max as f64).log10().ceil().max(1.0) as i32;
    let (mut y_lo, mut y_hi) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let l = p.1.log10();
        (lo.min(l), hi.max(l))
    });
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    let y_lo = y_lo.floor() as i32;
    let y_hi = (y_hi.ceil() as i32).max(y_lo + 1);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |k: f64| MARGIN_L + plot_w * k.log10() / x_decades as f64;
    let sy = |g: f64| MARGIN_T + plot_h * (y_hi as f64 - g.log10()) / (y_hi - y_lo) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for j in 0..=x_decades {
        let x = sx(10f64.powi(j));
        let _ = writeln!(
            svg,
            r#"<line class="xtick" data-decade="{j}" x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">10<tspan dy="-5" font-size="9">{j}</tspan></text>"#,
            HEIGHT - MARGIN_B + 20.0
        );
    }
    for j in y_lo..=y_hi {
        let y = sy(10f64.powi(j));
        let _ = writeln!(
            svg,
            r#"<line class="ytick" data-decade="{j}" x1="{}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">10<tspan dy="-5" font-size="9">{j}</tspan></text>"#,
            MARGIN_L - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">potential gap</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    for (idx, (trace, pts)) in traces.iter().zip(&thinned).enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(k, g)| format!("{:.2},{:.2}", sx(k as f64), sy(g)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = MARGIN_T + 14.0 + 18.0 * idx as f64;
        let lx = WIDTH - MARGIN_R + 10.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&trace.label)
        );
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| BenchError::io(path, e))?;

    let csv_path = path.with_extension("csv");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&csv_path)
        .map_err(|source| BenchError::Csv {
            path: csv_path.clone(),
            source,
        })?;
    let res: std::result::Result<(), csv::Error> = (|| {
        w.write_record(["label", "k", "gap"])?;
        for (trace, pts) in traces.iter().zip(&thinned) {
            for &(k, g) in pts {
                w.serialize((&trace.label, k, g))?;
            }
        }
        w.flush()?;
        Ok(())
    })();
    res.map_err(|source| BenchError::Csv {
        path: csv_path.clone(),
        source,
    })?;
    Ok(csv_path)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
