//! Minimal standalone SVG line plots and heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#1e8449", "#7d3c98", "#b9770e", "#17202a"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    out.push('\n');
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for (v, anchor, px, py) in [
        (x.0, "start", PAD, H - PAD + 16.0),
        (x.1, "end", W - PAD, H - PAD + 16.0),
        (y.0, "end", PAD - 4.0, H - PAD),
        (y.1, "end", PAD - 4.0, PAD + 4.0),
    ] {
        let _ = writeln!(out, r#"<text x="{px}" y="{py}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

/// Line plot of several `(name, points)` series.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let xb = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)));
    let yb = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)));
    let sx = |v: f64| PAD + (v - xb.0) / (xb.1 - xb.0) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - yb.0) / (yb.1 - yb.0) * (H - 2.0 * PAD);
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xb, yb, xlabel, ylabel);
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let d: Vec<String> = pts
            .iter()
            .filter(|p| p.1.is_finite())
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(y)))
            .collect();
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        let ly = PAD + 14.0 * k as f64;
        let _ = writeln!(out, r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#, W - PAD, escape(name));
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `values[row][col]`, row 0 at the bottom.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64), values: &[Vec<f64>]) -> String {
    let rows = values.len().max(1);
    let cols = values.first().map_or(1, |r| r.len().max(1));
    let (lo, hi) = bounds(values.iter().flatten().copied());
    let cw = (W - 2.0 * PAD) / cols as f64;
    let ch = (H - 2.0 * PAD) / rows as f64;
    let mut out = String::new();
    header(&mut out, title);
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let t = if v.is_finite() { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            // white to dark blue
            let shade = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
            let fill = format!("#{:02x}{:02x}{:02x}", shade(255.0, 20.0), shade(255.0, 60.0), shade(255.0, 140.0));
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                PAD + c as f64 * cw,
                H - PAD - (r + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut out, x, y, xlabel, ylabel);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">range {lo:.3e} .. {hi:.3e}</text>"#, W - PAD, PAD - 8.0);
    out.push_str("</svg>\n");
    out
}
