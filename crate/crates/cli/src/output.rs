use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::RunConfig;

#[derive(Serialize)]
struct Envelope<'a, T> {
    config: &'a RunConfig,
    result: &'a T,
}

pub fn path(cfg: &RunConfig, ext: &str) -> PathBuf {
    cfg.out_dir.join(format!("{}.{ext}", cfg.stem))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `{"config": ..., "result": ...}` to `<stem>.json`.
pub fn json<T: Serialize>(cfg: &RunConfig, result: &T) -> Result<PathBuf> {
    let p = path(cfg, "json");
    let mut text = serde_json::to_string_pretty(&Envelope { config: cfg, result })?;
    text.push('\n');
    write(&p, &text)?;
    Ok(p)
}

/// Plain decimal notation with 17 significant digits.
pub fn decimal17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Profile table with header `xi,eta,w` and LF line endings.
pub fn csv(cfg: &RunConfig, rows: &[(f64, f64, f64)]) -> Result<PathBuf> {
    let p = path(cfg, "csv");
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["xi", "eta", "w"])?;
    for &(xi, eta, ww) in rows {
        w.write_record([decimal17(xi), decimal17(eta), decimal17(ww)])?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("flushing csv: {e}"))?;
    write(&p, &String::from_utf8(bytes)?)?;
    Ok(p)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 700.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 370.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|s| s * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Two stroked polylines (`η` solid, `w` dashed) on a fixed view box with
/// ticks on both axes.
pub fn svg(cfg: &RunConfig, title: &str, rows: &[(f64, f64, f64)]) -> Result<PathBuf> {
    let (x0, x1) = (rows.first().map_or(0.0, |r| r.0), rows.last().map_or(1.0, |r| r.0));
    let (mut y0, mut y1) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.1).min(r.2), hi.max(r.1).max(r.2)));
    let pad = if y1 > y0 { 0.05 * (y1 - y0) } else { 1.0 };
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);
    let line = |pick: fn(&(f64, f64, f64)) -> f64| {
        rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.0), sy(pick(r)))).collect::<Vec<_>>().join(" ")
    };

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="serif" font-size="13">"#)?;
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, (LEFT + RIGHT) / 2.0)?;
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, RIGHT - LEFT, BOTTOM - TOP)?;
    for t in ticks(x0, x1) {
        let x = sx(t);
        writeln!(s, r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="black"/>"#, BOTTOM - 6.0)?;
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, BOTTOM + 18.0, label(t))?;
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        writeln!(s, r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>"#, LEFT + 6.0)?;
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, label(t))?;
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-style="italic">ξ</text>"#, (LEFT + RIGHT) / 2.0, HEIGHT - 12.0)?;
    writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1.6" points="{}"/>"#, line(|r| r.1))?;
    writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1.6" stroke-dasharray="6,4" points="{}"/>"#, line(|r| r.2))?;
    let lx = RIGHT - 90.0;
    writeln!(s, r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.6"/>"#, TOP + 16.0, lx + 30.0, TOP + 16.0)?;
    writeln!(s, r#"<text x="{}" y="{}" font-style="italic">η</text>"#, lx + 36.0, TOP + 20.0)?;
    writeln!(s, r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.6" stroke-dasharray="6,4"/>"#, TOP + 34.0, lx + 30.0, TOP + 34.0)?;
    writeln!(s, r#"<text x="{}" y="{}" font-style="italic">w</text>"#, lx + 36.0, TOP + 38.0)?;
    s.push_str("</svg>\n");

    let p = path(cfg, "svg");
    write(&p, &s)?;
    Ok(p)
}
