//! Static SVG rendering of spectrum tables.

use std::fmt::Write;

use anyhow::{bail, Result};
use fdl_core::spectrum::{Mode, SpectrumTable};

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Frame {
    beta_max: f64,
}

impl Frame {
    fn x(&self, beta: f64) -> f64 {
        LEFT + (W - LEFT - RIGHT) * beta / self.beta_max
    }

    fn y(&self, dim: f64) -> f64 {
        H - BOTTOM - (H - TOP - BOTTOM) * dim.clamp(0.0, 1.05) / 1.05
    }
}

/// `β ↦ dim` markers over the dashed reference curve. Output depends only on
/// the table, so equal tables give byte-identical files.
pub fn plot_spectrum(table: &SpectrumTable) -> Result<String> {
    if table.bins.is_empty() {
        bail!("spectrum table has no bins");
    }
    let last = table.bins.iter().map(|b| b.beta_center).fold(0.0, f64::max);
    let f = Frame { beta_max: table.mode.beta_max().max(last).max(1e-9) };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)?;
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    let title = match table.mode {
        Mode::Lp { p } => format!("L^p spectrum, p = {p}"),
        Mode::Ct => "C(T) spectrum".to_string(),
    };
    writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{title} (M = {}, N = {}, n_min = {})</text>"#,
        W / 2.0,
        table.grid_m,
        table.n_max,
        table.n_min
    )?;

    // axes
    let (x0, y0) = (f.x(0.0), f.y(0.0));
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black"/>"#, W - RIGHT)?;
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{TOP:.2}" stroke="black"/>"#)?;
    for i in 0..=5 {
        let b = f.beta_max * i as f64 / 5.0;
        let x = f.x(b);
        writeln!(s, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0)?;
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{b:.2}</text>"#,
            y0 + 20.0
        )?;
    }
    for i in 0..=4 {
        let d = i as f64 / 4.0;
        let y = f.y(d);
        writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0)?;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{d:.2}</text>"#,
            x0 - 8.0,
            y + 4.0
        )?;
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">beta</text>"#,
        f.x(f.beta_max / 2.0),
        H - 15.0
    )?;
    writeln!(
        s,
        r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">dim estimate</text>"#,
        f.y(0.5),
        f.y(0.5)
    )?;

    let (rx0, ry0, rx1, ry1) = match table.mode {
        Mode::Lp { p } => (0.0, 1.0, 1.0 / p, 0.0),
        Mode::Ct => (0.0, 1.0, f.beta_max, 1.0),
    };
    writeln!(
        s,
        r#"<line class="reference" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
        f.x(rx0),
        f.y(ry0),
        f.x(rx1),
        f.y(ry1)
    )?;
    for b in &table.bins {
        if let Some(d) = b.dim {
            writeln!(
                s,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"><title>beta {:.2}: dim {:.4}, {} points</title></circle>"#,
                f.x(b.beta_center),
                f.y(d),
                b.beta_center,
                d,
                b.count
            )?;
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
