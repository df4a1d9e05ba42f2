//! Static SVG charts built by direct markup generation.

use std::collections::BTreeMap;
use std::fmt::Write;

use rulecoach::harness::{AggregateReport, CurvePoint, MeanStd};

const W: f64 = 760.0;
const H: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 64.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Plot area in pixels.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new() -> Self {
        Self { x0: LEFT, x1: W - RIGHT, y0: H - BOTTOM, y1: TOP }
    }

    /// Maps a rate in [0, 1] to a pixel row.
    fn y(&self, v: f64) -> f64 {
        self.y0 + (self.y1 - self.y0) * v.clamp(0.0, 1.0)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

/// Axes with a labelled rate scale on the left.
fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let y = f.y(v);
        let _ = writeln!(out, r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/>"##, f.x0, f.x1);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, f.x0 - 6.0, y + 4.0);
    }
    let _ = writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#, f.x0, f.y0, f.x1, f.y0);
    let _ = writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#, f.x0, f.y0, f.x0, f.y1);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (f.x0 + f.x1) / 2.0, H - 12.0, escape(xlabel));
    let cy = (f.y0 + f.y1) / 2.0;
    let _ = writeln!(out, r#"<text x="16" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 16 {cy:.1})">{}</text>"#, escape(ylabel));
}

fn legend(out: &mut String, entries: &[(String, &str)]) {
    let x = W - RIGHT + 16.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = TOP + 8.0 + 20.0 * i as f64;
        let _ = writeln!(out, r#"<rect x="{x:.1}" y="{:.1}" width="14" height="10" fill="{color}"/>"#, y - 9.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 20.0, escape(label));
    }
}

/// Round tick step giving roughly five ticks over `[0, span]`.
fn tick_step(span: f64) -> f64 {
    let raw = (span / 5.0).max(1.0);
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

/// Training success ratio per method: mean over seeds with a shaded ±std band.
pub fn curves_svg(points: &[CurvePoint]) -> String {
    // method -> episode -> per-seed values
    let mut series: BTreeMap<&str, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for p in points {
        series.entry(&p.method).or_default().entry(p.episode).or_default().push(p.success_ratio);
    }
    let max_ep = points.iter().map(|p| p.episode).max().unwrap_or(1).max(2) as f64;
    let f = Frame::new();
    let x = |e: f64| f.x0 + (f.x1 - f.x0) * (e - 1.0) / (max_ep - 1.0);

    let mut out = String::new();
    header(&mut out, "Success ratio over training episodes");
    axes(&mut out, &f, "Training episode", "Success ratio");
    let step = tick_step(max_ep);
    let mut t = step;
    while t <= max_ep {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#, x(t), f.y0 + 16.0);
        t += step;
    }
    let mut entries = Vec::new();
    for (i, (method, eps)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let stats: Vec<(f64, MeanStd)> = eps.iter().map(|(e, v)| (*e as f64, MeanStd::of(v).expect("non-empty"))).collect();
        let mut band = String::new();
        for (e, m) in &stats {
            let _ = write!(band, "{:.2},{:.2} ", x(*e), f.y(m.mean + m.std));
        }
        for (e, m) in stats.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", x(*e), f.y(m.mean - m.std));
        }
        let _ = writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.trim_end());
        let line: Vec<String> = stats.iter().map(|(e, m)| format!("{:.2},{:.2}", x(*e), f.y(m.mean))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, line.join(" "));
        let seeds = eps.values().map(Vec::len).max().unwrap_or(0);
        entries.push((format!("{method} ({seeds} seeds)"), color));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Outcome rates per method and condition as grouped bars.
pub fn outcomes_svg(report: &AggregateReport) -> String {
    const OUTCOMES: [(&str, &str); 4] =
        [("success", "#2ca02c"), ("collision", "#d62728"), ("battery", "#ff7f0e"), ("timeout", "#7f7f7f")];
    let f = Frame::new();
    let mut out = String::new();
    header(&mut out, "Outcome rates");
    axes(&mut out, &f, "Method and obstacle density", "Rate");
    let n = report.conditions.len().max(1) as f64;
    let group_w = (f.x1 - f.x0) / n;
    let bar_w = group_w * 0.8 / 4.0;
    for (g, c) in report.conditions.iter().enumerate() {
        let gx = f.x0 + group_w * g as f64 + group_w * 0.1;
        let rates = [c.success, c.collision, c.battery, c.timeout];
        for (k, ((_, color), r)) in OUTCOMES.iter().zip(rates).enumerate() {
            let top = f.y(r);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"/>"#,
                gx + bar_w * k as f64,
                f.y0 - top
            );
        }
        let cx = gx + bar_w * 2.0;
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            f.y0 + 16.0,
            escape(&c.key.method)
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-size="10">ρ={} {}</text>"#,
            f.y0 + 30.0,
            escape(&c.key.rho),
            escape(&c.key.phase)
        );
    }
    let entries: Vec<(String, &str)> = OUTCOMES.iter().map(|(l, c)| (l.to_string(), *c)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}
