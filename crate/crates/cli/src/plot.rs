//! Self-contained SVG figures and gnuplot scripts.

use std::fmt::Write as _;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const W: f64 = 760.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Extra legend text, e.g. a fitted slope.
    pub note: Option<String>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        esc(title)
    );
}

fn frame(out: &mut String, xlabel: &str, ylabel: &str) {
    let (x0, y0, x1, y1) = (LEFT, TOP, W - RIGHT, H - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 18.0,
        esc(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(ylabel)
    );
}

fn legend(out: &mut String, series: &[Series]) {
    let x = W - RIGHT + 16.0;
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 34.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            x + 24.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 30.0,
            y + 4.0,
            esc(&s.label)
        );
        if let Some(note) = &s.note {
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}" font-size="11" fill="#444">{}</text>"##,
                x + 30.0,
                y + 18.0,
                esc(note)
            );
        }
    }
}

/// Integer decades `floor(log10 lo) ..= ceil(log10 hi)`.
pub fn decade_range(lo: f64, hi: f64) -> (i32, i32) {
    let a = lo.log10().floor() as i32;
    let mut b = hi.log10().ceil() as i32;
    if b <= a {
        b = a + 1;
    }
    (a, b)
}

fn extent(series: &[Series], pick: impl Fn(&(f64, f64)) -> f64, positive: bool) -> (f64, f64) {
    let vals = series
        .iter()
        .flat_map(|s| s.points.iter().map(&pick))
        .filter(|v| v.is_finite() && (!positive || *v > 0.0));
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if lo.is_finite() {
        (lo, hi)
    } else if positive {
        (0.1, 1.0)
    } else {
        (0.0, 1.0)
    }
}

/// Log-log chart with decade ticks on both axes; one polyline per series.
pub fn loglog_svg(series: &[Series], title: &str, xlabel: &str, ylabel: &str) -> String {
    let (xd0, xd1) = {
        let (lo, hi) = extent(series, |p| p.0, true);
        decade_range(lo, hi)
    };
    let (yd0, yd1) = {
        let (lo, hi) = extent(series, |p| p.1, true);
        decade_range(lo, hi)
    };
    let px = |x: f64| LEFT + (x.log10() - xd0 as f64) / (xd1 - xd0) as f64 * (W - LEFT - RIGHT);
    let py =
        |y: f64| H - BOTTOM - (y.log10() - yd0 as f64) / (yd1 - yd0) as f64 * (H - TOP - BOTTOM);
    let mut out = String::new();
    header(&mut out, title);
    for d in xd0..=xd1 {
        let x = px(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line class="xtick" x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##,
            TOP,
            H - BOTTOM
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#,
            H - BOTTOM + 16.0
        );
    }
    for d in yd0..=yd1 {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line class="ytick" x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT,
            W - RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    frame(&mut out, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (cx, cy) = p.split_once(',').unwrap();
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

/// Linear axes, one polyline per series (solution profiles).
pub fn line_svg(series: &[Series], title: &str, xlabel: &str, ylabel: &str) -> String {
    let (x0, x1) = extent(series, |p| p.0, false);
    let (mut y0, mut y1) = extent(series, |p| p.1, false);
    let pad = 0.05 * (y1 - y0).max(1e-12);
    y0 -= pad;
    y1 += pad;
    let xs = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| LEFT + (x - x0) / xs * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);
    let mut out = String::new();
    header(&mut out, title);
    for i in 0..=4 {
        let fx = x0 + xs * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{fx:.3}</text>"#,
            px(fx),
            H - BOTTOM + 16.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{fy:.3}</text>"#,
            LEFT - 6.0,
            py(fy) + 4.0
        );
    }
    frame(&mut out, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

/// Grayscale rasters, one panel per field; `values` are row-major
/// `side × side` with the first index along x. All panels share one scale.
pub fn raster_svg(panels: &[(String, usize, Vec<f64>)], title: &str) -> String {
    let cell = 2.0;
    let gap = 30.0;
    let side_px = panels.iter().map(|p| p.1).max().unwrap_or(1) as f64 * cell;
    let width = gap + panels.len() as f64 * (side_px + gap);
    let height = side_px + 90.0;
    let (lo, hi) = panels
        .iter()
        .flat_map(|p| p.2.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        esc(title)
    );
    for (i, (label, side, values)) in panels.iter().enumerate() {
        let ox = gap + i as f64 * (side_px + gap);
        let oy = 50.0;
        let c = side_px / *side as f64;
        let _ = writeln!(out, r#"<g class="raster">"#);
        for ix in 0..*side {
            for iy in 0..*side {
                let v = values[ix * side + iy];
                let g = (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8;
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{c:.2}" height="{c:.2}" fill="rgb({g},{g},{g})"/>"#,
                    ox + ix as f64 * c,
                    oy + (side - 1 - iy) as f64 * c
                );
            }
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            ox + side_px / 2.0,
            oy + side_px + 20.0,
            esc(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">black = {lo:.4}, white = {hi:.4}</text>"#,
        width / 2.0,
        height - 10.0
    );
    out.push_str("</svg>\n");
    out
}

/// gnuplot script drawing the same log-log chart with inline data blocks.
pub fn gnuplot_loglog(
    series: &[Series],
    title: &str,
    xlabel: &str,
    ylabel: &str,
    output: &str,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set terminal svg size 760,480 dynamic enhanced");
    let _ = writeln!(out, "set output '{output}'");
    let _ = writeln!(out, "set title \"{title}\"");
    let _ = writeln!(out, "set xlabel \"{xlabel}\"\nset ylabel \"{ylabel}\"");
    let _ = writeln!(out, "set logscale xy\nset format x '10^{{%L}}'\nset format y '10^{{%L}}'\nset key outside right");
    for (i, s) in series.iter().enumerate() {
        let _ = writeln!(out, "$s{i} << EOD");
        for (x, y) in &s.points {
            if *x > 0.0 && *y > 0.0 && y.is_finite() {
                let _ = writeln!(out, "{x:.16e} {y:.16e}");
            }
        }
        let _ = writeln!(out, "EOD");
    }
    let plots: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let t = match &s.note {
                Some(n) => format!("{} ({n})", s.label),
                None => s.label.clone(),
            };
            format!("$s{i} using 1:2 with linespoints lw 2 title \"{t}\"")
        })
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}
