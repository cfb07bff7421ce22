//! File emission: CSV tables, JSON documents, SVG fronts and run manifests.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command as Process;

use anyhow::{Context, Result};
use catsp_core::pareto::ArchiveEntry;
use serde::Serialize;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Row of an archive file.
#[derive(Serialize)]
struct FrontRow<'a> {
    f1_seconds: f64,
    f2: f64,
    order: &'a str,
}

/// Archive as CSV, one row per solution sorted by travel time.
pub fn write_front_csv(path: &Path, entries: &[(&ArchiveEntry, String)]) -> Result<()> {
    let rows: Vec<FrontRow> = entries
        .iter()
        .map(|(e, order)| FrontRow {
            f1_seconds: e.point.f1,
            f2: e.point.f2,
            order,
        })
        .collect();
    write_csv(path, &rows)
}

/// Scatter plot of `(f1, f2)` points with labeled axes.
pub fn front_svg(title: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 60.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let (sx, sy) = (span(x0, x1), span(y0, y1));
    let px = |x: f64| PAD + (x - x0) / sx * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / sy * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let (ax, ay) = (PAD, H - PAD);
    let _ = writeln!(s, r#"<line x1="{ax}" y1="{ay}" x2="{}" y2="{ay}" stroke="black"/>"#, W - PAD);
    let _ = writeln!(s, r#"<line x1="{ax}" y1="{ay}" x2="{ax}" y2="{PAD}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">travel time (s)</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">history deviation</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(s, r#"<text x="{ax}" y="{}" text-anchor="middle">{x0:.1}</text>"#, ay + 18.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.1}</text>"#, W - PAD, ay + 18.0);
    let _ = writeln!(s, r#"<text x="{}" y="{ay}" text-anchor="end">{y0:.3}</text>"#, ax - 6.0);
    let _ = writeln!(s, r#"<text x="{}" y="{PAD}" text-anchor="end">{y1:.3}</text>"#, ax - 6.0);
    for &(x, y) in points {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, px(x), py(y));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Current commit of the working directory, or `unknown`.
pub fn git_revision() -> String {
    Process::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

#[derive(Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub git_revision: String,
    pub invocation: &'a C,
    pub seeds: Vec<u64>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl<'a, C: Serialize> Manifest<'a, C> {
    pub fn new(invocation: &'a C, seeds: Vec<u64>, inputs: Vec<String>) -> Self {
        Manifest {
            tool: "catsp",
            version: env!("CARGO_PKG_VERSION"),
            git_revision: git_revision(),
            invocation,
            seeds,
            inputs,
            wall_ms: None,
        }
    }
}
