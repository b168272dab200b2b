//! Versioned JSON reports and a static SVG plot of the normalized `S`
//! histogram against the standard normal density.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::zetaline::SWindowStats;

pub const SCHEMA_VERSION: u32 = 1;

/// Library version embedded into every artifact.
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A report with its provenance: schema and library version plus the fully
/// resolved run configuration. The payload fields sit at top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub library_version: String,
    pub config: BTreeMap<String, String>,
    #[serde(flatten)]
    pub report: T,
}

impl<T> Envelope<T> {
    pub fn new(report: T, config: BTreeMap<String, String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            library_version: LIBRARY_VERSION.to_string(),
            config,
            report,
        }
    }
}

pub fn to_json<T: Serialize>(envelope: &Envelope<T>) -> Result<String> {
    let mut s = serde_json::to_string_pretty(envelope)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_report<T: Serialize>(report: &T, config: &BTreeMap<String, String>, path: &Path) -> Result<()> {
    let env = Envelope::new(report, config.clone());
    std::fs::write(path, to_json(&env)?)?;
    Ok(())
}

pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<Envelope<T>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Histogram density of normalized `S` on `[-4, 4]` (bins merged to width
/// 0.2) with the normal density overlaid.
pub fn histogram_svg(stats: &SWindowStats) -> String {
    const W: f64 = 640.0;
    const HGT: f64 = 400.0;
    const PAD: f64 = 40.0;
    const X_LO: f64 = -4.0;
    const X_HI: f64 = 4.0;
    const MERGE: usize = 10;
    let sx = |x: f64| PAD + (x - X_LO) / (X_HI - X_LO) * (W - 2.0 * PAD);
    let y_max = 0.5;
    let sy = |y: f64| HGT - PAD - (y / y_max).min(1.0) * (HGT - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{HGT}" viewBox="0 0 {W} {HGT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="13">normalized S on [{}, {}], dt = {}</text>"#,
        stats.t,
        stats.t + stats.h,
        stats.dt
    );
    for chunk in stats.histogram.chunks(MERGE) {
        let lo = chunk[0].lo;
        let hi = chunk[chunk.len() - 1].hi;
        if hi <= X_LO || lo >= X_HI {
            continue;
        }
        let mass: f64 = chunk.iter().map(|b| b.mass).sum();
        let density = mass / stats.h / (hi - lo);
        let (x0, x1) = (sx(lo.max(X_LO)), sx(hi.min(X_HI)));
        let (y0, y1) = (sy(density), sy(0.0));
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="#9ab" stroke="#567" stroke-width="0.5"/>"##,
            x1 - x0,
            y1 - y0
        );
    }
    let mut path = String::new();
    for i in 0..=200 {
        let x = X_LO + (X_HI - X_LO) * i as f64 / 200.0;
        let y = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(x), sy(y));
    }
    let _ = writeln!(svg, r##"<path d="{}" fill="none" stroke="#c33" stroke-width="1.5"/>"##, path.trim_end());
    let _ = writeln!(
        svg,
        r##"<line x1="{PAD}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/>"##,
        sy(0.0),
        W - PAD
    );
    for k in -4..=4 {
        let x = sx(k as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{k}</text>"#,
            HGT - PAD + 15.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
