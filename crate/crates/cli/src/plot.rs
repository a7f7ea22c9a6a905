//! Minimal static SVG renderings: histogram heatmaps, the embedding scatter
//! and a swarm plot of bench ratios. Output depends only on the inputs.

use std::fmt::Write;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// One panel per grid; darker cells hold larger counts. Rows are categories,
/// columns subcategories; the query cell is outlined.
pub struct HeatPanel<'a> {
    pub title: String,
    pub counts: &'a [Vec<u64>],
    pub highlight: (usize, usize),
}

pub fn heatmaps(panels: &[HeatPanel<'_>], columns: usize) -> String {
    let cell = 14.0;
    let rows_n = panels.first().map_or(0, |p| p.counts.len());
    let cols_n = panels.first().and_then(|p| p.counts.first()).map_or(0, Vec::len);
    let panel_w = cols_n as f64 * cell + 30.0;
    let panel_h = rows_n as f64 * cell + 40.0;
    let columns = columns.max(1);
    let grid_rows = panels.len().div_ceil(columns);
    let mut out = String::new();
    open(&mut out, panel_w * columns as f64 + 10.0, panel_h * grid_rows as f64 + 10.0);
    for (n, panel) in panels.iter().enumerate() {
        let x0 = 10.0 + (n % columns) as f64 * panel_w;
        let y0 = 10.0 + (n / columns) as f64 * panel_h;
        let _ = writeln!(out, r#"<text x="{x0:.1}" y="{:.1}">{}</text>"#, y0 + 11.0, escape(&panel.title));
        let max = panel.counts.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
        for (r, row) in panel.counts.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                // sqrt keeps small counts visible next to the query cell
                let shade = 255.0 - 255.0 * (v as f64 / max).sqrt();
                let g = shade.round() as u8;
                let stroke = if (r, c) == panel.highlight {
                    r##" stroke="#d62728" stroke-width="2""##
                } else {
                    r##" stroke="#eeeeee""##
                };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.1}" y="{:.1}" width="{cell}" height="{cell}" fill="rgb({g},{g},{g})"{stroke}><title>{}.{}: {v}</title></rect>"#,
                    x0 + c as f64 * cell,
                    y0 + 18.0 + r as f64 * cell,
                    r + 1,
                    c + 1,
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

pub struct Point {
    pub x: f64,
    pub y: f64,
    pub label: String,
    pub group: String,
    pub ringed: bool,
}

/// Scatter of points in the unit square, coloured by group.
pub fn scatter(points: &[Point], title: &str) -> String {
    let size = 600.0;
    let margin = 30.0;
    let mut groups: Vec<&str> = points.iter().map(|p| p.group.as_str()).collect();
    groups.sort_unstable();
    groups.dedup();
    let colour = |g: &str| PALETTE[groups.binary_search(&g).unwrap_or(0) % PALETTE.len()];
    let mut out = String::new();
    open(&mut out, size + 2.0 * margin + 160.0, size + 2.0 * margin);
    let _ = writeln!(out, r#"<text x="{margin}" y="18">{}</text>"#, escape(title));
    for p in points {
        let cx = margin + p.x * size;
        let cy = margin + (1.0 - p.y) * size;
        if p.ringed {
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="8" fill="none" stroke="black" stroke-width="1.5"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{}"><title>{}</title></circle>"#,
            colour(&p.group),
            escape(&p.label)
        );
    }
    for (i, g) in groups.iter().enumerate().take(PALETTE.len()) {
        let y = margin + 14.0 * i as f64;
        let x = size + 2.0 * margin;
        let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{:.1}" r="4" fill="{}"/>"#, y - 4.0, PALETTE[i]);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 8.0, escape(g));
    }
    out.push_str("</svg>\n");
    out
}

/// One swarm column per series, values on the vertical axis. Points in the
/// same vertical bin are spread sideways.
pub fn swarm(series: &[(String, Vec<f64>)], y_label: &str) -> String {
    let (w_col, height, margin) = (160.0, 400.0, 40.0);
    let values = series.iter().flat_map(|(_, v)| v.iter().copied());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0), lo.max(0.0) + 1.0) };
    let y_of = |v: f64| margin + (hi - v) / (hi - lo) * height;
    let mut out = String::new();
    open(&mut out, margin * 2.0 + w_col * series.len() as f64, height + margin * 2.0 + 10.0);
    let _ = writeln!(out, r#"<text x="4" y="14">{}</text>"#, escape(y_label));
    for v in [lo, hi] {
        let _ = writeln!(out, r#"<text x="4" y="{:.1}">{v:.4}</text>"#, y_of(v) + 4.0);
    }
    for (s, (name, vals)) in series.iter().enumerate() {
        let cx = margin + w_col * (s as f64 + 0.5);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        let mut bins: std::collections::BTreeMap<i64, usize> = Default::default();
        for v in sorted {
            let y = y_of(v);
            let slot = bins.entry((y / 3.0).floor() as i64).or_insert(0);
            let offset = if *slot % 2 == 0 { 1.0 } else { -1.0 } * (slot.div_ceil(2) as f64) * 3.0;
            *slot += 1;
            let x = cx + offset.clamp(-w_col / 2.0 + 4.0, w_col / 2.0 - 4.0);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="{}"/>"#,
                PALETTE[s % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            height + margin + 20.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
