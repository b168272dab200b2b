//! Zero counting on the critical line by sign changes of `Z` on a uniform
//! grid `t_k = 10 + k dt`.
//!
//! Grid values are produced in blocks of [`BLOCK`] points. Inside a block the
//! main-sum phases `e^{-i t log n}` are advanced by one complex rotation per
//! step and are recomputed exactly at each block start. Blocks depend only on
//! their global index, so the scan result is independent of how blocks are
//! distributed over threads. Brackets are refined with the Illinois variant
//! of regula falsi on the directly evaluated `Z`. Same-sign local minima of
//! `|Z|` are searched for a hidden pair of zeros.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::euler_maclaurin::hardy_z_em;
use super::riemann_siegel::{main_sum_length, remainder, z_unchecked, DEFAULT_CORRECTIONS};
use super::theta::theta_unchecked;

/// First grid point of every scan.
pub const SCAN_START: f64 = 10.0;

/// Grid points per phase-resync block.
pub const BLOCK: usize = 256;

/// Height below which `Z` comes from the Euler–Maclaurin oracle.
pub const EM_BELOW: f64 = 100.0;

/// Version written in the cache header.
pub const CACHE_VERSION: u32 = 1;

/// Options of [`count_zeros_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroScanOptions {
    pub dt: f64,
    /// Riemann–Siegel correction terms `C_0..C_{k-1}`.
    pub corrections: usize,
    /// Blocks per parallel work item.
    pub chunk_blocks: usize,
    /// `|N(t) - theta(t)/pi - 1|` above this raises an integrity warning.
    pub monitor_threshold: f64,
}

impl Default for ZeroScanOptions {
    fn default() -> Self {
        Self {
            dt: 0.05,
            corrections: DEFAULT_CORRECTIONS,
            chunk_blocks: 64,
            monitor_threshold: 2.0,
        }
    }
}

/// Ascending zero ordinates up to `upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCache {
    pub upper: f64,
    pub dt: f64,
    pub gammas: Vec<f64>,
    /// Multiplicity per ordinate; always 1 from the sign-change scan.
    pub multiplicities: Vec<u32>,
    pub warnings: Vec<String>,
    /// Largest `|S|` seen by the completeness monitor.
    pub monitor_max_abs_s: f64,
    /// Same-sign local minima of `|Z|` that were searched for hidden pairs.
    pub minima_checked: u64,
}

/// `Z(t)` for `t >= 10`: Euler–Maclaurin below [`EM_BELOW`], Riemann–Siegel
/// with `C_0..C_4` above.
pub fn z_eval(t: f64) -> f64 {
    z_eval_with(t, DEFAULT_CORRECTIONS)
}

fn z_eval_with(t: f64, corrections: usize) -> f64 {
    if t < EM_BELOW {
        hardy_z_em(t).expect("oracle range covers the low scan")
    } else {
        z_unchecked(t, corrections)
    }
}

struct Tables {
    ln: Vec<f64>,
    inv_sqrt: Vec<f64>,
    step_re: Vec<f64>,
    step_im: Vec<f64>,
}

impl Tables {
    fn new(n_max: usize, dt: f64) -> Self {
        let ln: Vec<f64> = (0..=n_max).map(|n| (n.max(1) as f64).ln()).collect();
        let inv_sqrt = (0..=n_max).map(|n| 1.0 / (n.max(1) as f64).sqrt()).collect();
        let step_re = ln.iter().map(|l| (dt * l).cos()).collect();
        let step_im = ln.iter().map(|l| -(dt * l).sin()).collect();
        Self {
            ln,
            inv_sqrt,
            step_re,
            step_im,
        }
    }
}

/// Direct `Z(t)` reusing the scan tables.
fn z_tabled(t: f64, corrections: usize, tables: &Tables) -> f64 {
    if t < EM_BELOW {
        return z_eval_with(t, corrections);
    }
    let th = theta_unchecked(t);
    let n = main_sum_length(t);
    let mut s = 0.0;
    for m in 1..=n {
        s += (th - t * tables.ln[m]).cos() * tables.inv_sqrt[m];
    }
    2.0 * s + remainder(t, corrections)
}

fn grid_t(k: usize, dt: f64) -> f64 {
    SCAN_START + k as f64 * dt
}

/// Values of `Z` at the grid points of block `b`.
fn eval_block(b: usize, opts: &ZeroScanOptions, tables: &Tables) -> Vec<f64> {
    let first = b * BLOCK;
    let mut out = Vec::with_capacity(BLOCK);
    // Weighted phases n^{-1/2} e^{-i t log n}, split into real and imaginary
    // parts; index 0 is unused padding.
    let mut re: Vec<f64> = Vec::new();
    let mut im: Vec<f64> = Vec::new();
    for k in first..first + BLOCK {
        let t = grid_t(k, opts.dt);
        if t < EM_BELOW {
            out.push(z_eval_with(t, opts.corrections));
            continue;
        }
        let n = main_sum_length(t);
        if re.is_empty() {
            re.push(0.0);
            im.push(0.0);
        } else {
            rotate(&mut re, &mut im, &tables.step_re, &tables.step_im);
        }
        while re.len() <= n {
            let m = re.len();
            let (sn, cs) = (-t * tables.ln[m]).sin_cos();
            re.push(cs * tables.inv_sqrt[m]);
            im.push(sn * tables.inv_sqrt[m]);
        }
        let (sr, si) = (lane_sum(&re[1..=n]), lane_sum(&im[1..=n]));
        let (sn, cs) = theta_unchecked(t).sin_cos();
        out.push(2.0 * (cs * sr - sn * si) + remainder(t, opts.corrections));
    }
    out
}

fn rotate(re: &mut [f64], im: &mut [f64], cr: &[f64], ci: &[f64]) {
    let n = re.len();
    for (((r, i), c), s) in re.iter_mut().zip(im.iter_mut()).zip(&cr[..n]).zip(&ci[..n]) {
        let (a, b) = (*r, *i);
        *r = a * c - b * s;
        *i = a * s + b * c;
    }
}

/// Sum in four interleaved lanes, so the loop vectorizes but the order of
/// additions stays fixed.
fn lane_sum(v: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = v.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for j in 0..4 {
            acc[j] += c[j];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for x in rest {
        s += x;
    }
    s
}

/// Illinois regula falsi for a root of `f` in `[a, b]`, `fa fb < 0`.
fn illinois<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
    let tol = 1e-9 * a.abs().max(1.0).log10().max(1.0);
    let mut c_prev = f64::NAN;
    let mut side = 0i8;
    for _ in 0..60 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        if (c - c_prev).abs() < tol || b - a < tol {
            return c;
        }
        c_prev = c;
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Root of the cubic through four equally spaced samples `v[0..4]` at
/// `t0 - h, t0, t0 + h, t0 + 2h`, searched in the middle cell.
fn cubic_guess(v: [f64; 4], t0: f64, h: f64) -> f64 {
    // Newton form in x = (t - t0) / h with nodes -1, 0, 1, 2.
    let p = |x: f64| {
        let l0 = -x * (x - 1.0) * (x - 2.0) / 6.0;
        let l1 = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
        let l2 = -(x + 1.0) * x * (x - 2.0) / 2.0;
        let l3 = (x + 1.0) * x * (x - 1.0) / 6.0;
        v[0] * l0 + v[1] * l1 + v[2] * l2 + v[3] * l3
    };
    let (mut a, mut b) = (0.0, 1.0);
    let pa = p(a);
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        if (p(m) >= 0.0) == (pa >= 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    t0 + 0.5 * (a + b) * h
}

/// Refines a bracketed root starting from an accurate guess: one evaluation
/// at the guess, one a little past the predicted root, then Illinois on the
/// narrow bracket.
fn polish<F: Fn(f64) -> f64>(f: &F, t0: f64, z0: f64, t1: f64, z1: f64, guess: f64) -> f64 {
    let fg = f(guess);
    if fg == 0.0 {
        return guess;
    }
    let slope = (z1 - z0) / (t1 - t0);
    let step = fg / slope;
    let probe = guess - 1.5 * step - 1e-9 * step.signum();
    let right = (fg >= 0.0) == (z0 >= 0.0);
    if probe > t0 && probe < t1 {
        let fp = f(probe);
        if (fp >= 0.0) != (fg >= 0.0) {
            return if probe > guess {
                illinois(f, guess, fg, probe, fp)
            } else {
                illinois(f, probe, fp, guess, fg)
            };
        }
    }
    if right {
        illinois(f, guess, fg, t1, z1)
    } else {
        illinois(f, t0, z0, guess, fg)
    }
}

/// Golden-section search for the minimum of `s Z` on `[a, b]`, stopping as
/// soon as the sign flips. Returns the point reached and its `Z`.
fn hunt_pair<F: Fn(f64) -> f64>(f: &F, s: f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    loop {
        if s * f1 < 0.0 {
            return (x1, f1);
        }
        if s * f2 < 0.0 {
            return (x2, f2);
        }
        if b - a < tol {
            return if s * f1 < s * f2 { (x1, f1) } else { (x2, f2) };
        }
        if s * f1 < s * f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
}

struct ChunkResult {
    zeros: Vec<f64>,
    warnings: Vec<String>,
    minima: u64,
}

fn scan_chunk(
    blocks: std::ops::Range<usize>,
    last_point: usize,
    from: f64,
    upper: f64,
    opts: &ZeroScanOptions,
    tables: &Tables,
) -> ChunkResult {
    let f = |t: f64| z_tabled(t, opts.corrections, tables);
    let lo_block = blocks.start.saturating_sub(1);
    let hi_block = blocks.end;
    let base = lo_block * BLOCK;
    let mut vals = Vec::with_capacity((hi_block - lo_block + 1) * BLOCK);
    for b in lo_block..=hi_block {
        if b * BLOCK > last_point {
            break;
        }
        vals.extend(eval_block(b, opts, tables));
    }
    let value = |k: usize| vals[k - base];
    let pos = |v: f64| v >= 0.0;
    let mut zeros = Vec::new();
    let mut warnings = Vec::new();
    let mut minima = 0;
    let keep = |g: f64| g > from && g <= upper;
    for k in blocks.start * BLOCK..(blocks.end * BLOCK).min(last_point) {
        let (z0, z1) = (value(k), value(k + 1));
        let (t0, t1) = (grid_t(k, opts.dt), grid_t(k + 1, opts.dt));
        if pos(z0) != pos(z1) {
            let guess = if k > base && k + 2 < base + vals.len() {
                cubic_guess([value(k - 1), z0, z1, value(k + 2)], t0, opts.dt).clamp(t0, t1)
            } else {
                (t0 * z1 - t1 * z0) / (z1 - z0)
            };
            let g = if guess > t0 && guess < t1 {
                polish(&f, t0, z0, t1, z1, guess)
            } else {
                illinois(&f, t0, z0, t1, z1)
            };
            if keep(g) {
                zeros.push(g);
            }
            continue;
        }
        if k == 0 {
            continue;
        }
        let zm = value(k - 1);
        if pos(zm) == pos(z0) && z0.abs() < zm.abs() && z0.abs() <= z1.abs() {
            minima += 1;
            let s = if pos(z0) { 1.0 } else { -1.0 };
            let tm = grid_t(k - 1, opts.dt);
            let (tc, zc) = hunt_pair(&f, s, tm, t1, 1e-6 * opts.dt);
            if s * zc < 0.0 {
                let g1 = illinois(&f, tm, zm, tc, zc);
                let g2 = illinois(&f, tc, zc, t1, z1);
                if g2 - g1 < 1e-6 {
                    warnings.push(format!("near-double zero at t = {g1:.9} (separation {:.3e})", g2 - g1));
                }
                // The pair straddles grid point k; only the cells owned by
                // this chunk report it, the pair lies within [t_{k-1}, t_{k+1}].
                for g in [g1, g2] {
                    if keep(g) {
                        zeros.push(g);
                    }
                }
            }
        }
    }
    ChunkResult {
        zeros,
        warnings,
        minima,
    }
}

/// Scans `(from, upper]` on the global grid. `from` must be a height below
/// which zeros are already known (or `SCAN_START`).
fn scan(from: f64, upper: f64, opts: &ZeroScanOptions) -> Result<(Vec<f64>, Vec<String>, u64)> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::Config(format!("scan step must be positive, got {}", opts.dt)));
    }
    if opts.corrections == 0 || opts.corrections > super::riemann_siegel::MAX_CORRECTIONS {
        return Err(Error::Config(format!("invalid correction count {}", opts.corrections)));
    }
    if upper <= from {
        return Ok((Vec::new(), Vec::new(), 0));
    }
    let first_point = (((from - SCAN_START) / opts.dt).floor().max(0.0)) as usize;
    let last_point = ((upper - SCAN_START) / opts.dt).ceil() as usize + 1;
    let n_max = main_sum_length(grid_t(last_point + 2 * BLOCK, opts.dt)) + 1;
    let tables = Tables::new(n_max, opts.dt);
    let first_block = first_point / BLOCK;
    let end_block = last_point / BLOCK + 1;
    let chunk = opts.chunk_blocks.max(1);
    let ranges: Vec<std::ops::Range<usize>> = (first_block..end_block)
        .step_by(chunk)
        .map(|b| b..(b + chunk).min(end_block))
        .collect();
    let parts: Vec<ChunkResult> = ranges
        .into_par_iter()
        .map(|r| scan_chunk(r, last_point, from, upper, opts, &tables))
        .collect();
    let mut zeros = Vec::new();
    let mut warnings = Vec::new();
    let mut minima = 0;
    for p in parts {
        zeros.extend(p.zeros);
        warnings.extend(p.warnings);
        minima += p.minima;
    }
    // A hidden pair found from a minimum next to a chunk edge may also be
    // reported by the neighbouring cell; drop exact repeats.
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
    Ok((zeros, warnings, minima))
}

/// All sign-change zeros of `Z` in `(10, tmax]` with grid step `dt`.
pub fn count_zeros(tmax: f64, dt: f64) -> Result<ZeroCache> {
    count_zeros_with(
        tmax,
        ZeroScanOptions {
            dt,
            ..ZeroScanOptions::default()
        },
    )
}

pub fn count_zeros_with(tmax: f64, opts: ZeroScanOptions) -> Result<ZeroCache> {
    if !(tmax.is_finite() && tmax >= SCAN_START) {
        return Err(Error::InvalidRange(format!("zero scan needs tmax >= {SCAN_START}, got {tmax}")));
    }
    let (gammas, mut warnings, minima) = scan(SCAN_START, tmax, &opts)?;
    if opts.dt > 0.05 {
        warnings.push(format!("scan step {} exceeds the validated 0.05", opts.dt));
    }
    let mut cache = ZeroCache {
        upper: tmax,
        dt: opts.dt,
        multiplicities: vec![1; gammas.len()],
        gammas,
        warnings,
        monitor_max_abs_s: 0.0,
        minima_checked: minima,
    };
    cache.run_monitor(opts.monitor_threshold, 0);
    Ok(cache)
}

impl ZeroCache {
    /// Number of zeros (with multiplicity) in `(0, t]`.
    pub fn count(&self, t: f64) -> usize {
        let k = self.gammas.partition_point(|&g| g <= t);
        self.multiplicities[..k].iter().map(|&m| m as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// The zeros up to `upper` only.
    pub fn truncated(&self, upper: f64) -> ZeroCache {
        let k = self.gammas.partition_point(|&g| g <= upper);
        ZeroCache {
            upper: upper.min(self.upper),
            gammas: self.gammas[..k].to_vec(),
            multiplicities: self.multiplicities[..k].to_vec(),
            ..self.clone()
        }
    }

    /// Scans `(upper, new_upper]` on the same grid and appends the zeros.
    pub fn extend_to(&mut self, new_upper: f64, opts: ZeroScanOptions) -> Result<()> {
        if opts.dt != self.dt {
            return Err(Error::Config(format!(
                "extension step {} differs from cache step {}",
                opts.dt, self.dt
            )));
        }
        let start = self.gammas.len();
        let (more, warnings, minima) = scan(self.upper, new_upper, &opts)?;
        self.multiplicities.extend(std::iter::repeat(1).take(more.len()));
        self.gammas.extend(more);
        self.warnings.extend(warnings);
        self.minima_checked += minima;
        self.upper = self.upper.max(new_upper);
        self.run_monitor(opts.monitor_threshold, start.saturating_sub(1));
        Ok(())
    }

    /// Samples `S = N - theta/pi - 1` midway between consecutive zeros.
    fn run_monitor(&mut self, threshold: f64, from: usize) {
        let mut worst = self.monitor_max_abs_s;
        let mut flagged = 0usize;
        let mut first_flag = None;
        let mut count = self.multiplicities[..from.min(self.gammas.len())]
            .iter()
            .map(|&m| m as usize)
            .sum::<usize>();
        for i in from..self.gammas.len() {
            count += self.multiplicities[i] as usize;
            let next = self.gammas.get(i + 1).copied().unwrap_or(self.upper);
            let mid = 0.5 * (self.gammas[i] + next);
            let s = count as f64 - theta_unchecked(mid) / PI - 1.0;
            if s.abs() > worst {
                worst = s.abs();
            }
            if s.abs() >= threshold {
                flagged += 1;
                first_flag.get_or_insert(mid);
            }
        }
        self.monitor_max_abs_s = worst;
        if let Some(t) = first_flag {
            self.warnings.push(format!(
                "completeness monitor: |S| >= {threshold} at {flagged} midpoints, first near t = {t:.6}"
            ));
        }
    }

    /// Writes `# upper=<t> dt=<dt> version=1` and `index gamma` lines.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut out, 0)?;
        out.flush()?;
        Ok(())
    }

    /// Appends a fresh header and the entries from index `from` on, as left
    /// by [`extend_to`](Self::extend_to).
    pub fn append(&self, path: &Path, from: usize) -> Result<()> {
        let file = std::fs::OpenOptions::new().append(true).create(true).open(path)?;
        let mut out = std::io::BufWriter::new(file);
        self.write_to(&mut out, from)?;
        out.flush()?;
        Ok(())
    }

    /// Header, warnings and the entries from index `from` on.
    pub fn write_to<W: Write>(&self, out: &mut W, from: usize) -> Result<()> {
        writeln!(out, "# upper={} dt={} version={CACHE_VERSION}", self.upper, self.dt)?;
        for w in &self.warnings {
            writeln!(out, "# warning: {w}")?;
        }
        for (i, g) in self.gammas.iter().enumerate().skip(from) {
            if self.multiplicities[i] == 1 {
                writeln!(out, "{} {}", i + 1, g)?;
            } else {
                writeln!(out, "{} {} {}", i + 1, g, self.multiplicities[i])?;
            }
        }
        Ok(())
    }

    /// Reads a cache file; repeated headers from appends are allowed, the
    /// last one fixes `upper`.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut upper = None;
        let mut dt = None;
        let mut gammas = Vec::new();
        let mut multiplicities = Vec::new();
        let mut warnings = Vec::new();
        for line in file.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# warning: ") {
                if !warnings.iter().any(|w| w == rest) {
                    warnings.push(rest.to_string());
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if !rest.trim_start().starts_with("upper=") {
                    // Free comment, e.g. a run header.
                    continue;
                }
                let (u, d) = parse_cache_header(rest)?;
                if dt.is_some_and(|old| old != d) {
                    return Err(Error::Parse(format!("cache step changes from {dt:?} to {d}")));
                }
                upper = Some(u);
                dt = Some(d);
                continue;
            }
            let mut parts = line.split_whitespace();
            let idx: usize = parse_field(parts.next(), "index", line)?;
            let g: f64 = parse_field(parts.next(), "gamma", line)?;
            let m: u32 = match parts.next() {
                Some(s) => s.parse().map_err(|e| Error::Parse(format!("bad multiplicity in {line:?}: {e}")))?,
                None => 1,
            };
            if idx != gammas.len() + 1 {
                return Err(Error::Parse(format!("expected index {}, got {idx}", gammas.len() + 1)));
            }
            if gammas.last().is_some_and(|&prev| prev >= g) {
                return Err(Error::Parse(format!("ordinates not increasing at index {idx}")));
            }
            gammas.push(g);
            multiplicities.push(m);
        }
        let (upper, dt) = match (upper, dt) {
            (Some(u), Some(d)) => (u, d),
            _ => return Err(Error::Parse("zero cache header missing".into())),
        };
        let mut cache = Self {
            upper,
            dt,
            gammas,
            multiplicities,
            warnings,
            monitor_max_abs_s: 0.0,
            minima_checked: 0,
        };
        let before = cache.warnings.len();
        cache.run_monitor(f64::INFINITY, 0);
        cache.warnings.truncate(before);
        Ok(cache)
    }
}

fn parse_field<T: std::str::FromStr>(s: Option<&str>, what: &str, line: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.ok_or_else(|| Error::Parse(format!("missing {what} in {line:?}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad {what} in {line:?}: {e}")))
}

fn parse_cache_header(rest: &str) -> Result<(f64, f64)> {
    let mut upper = None;
    let mut dt = None;
    let mut version = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad cache header field {kv:?}")))?;
        match k {
            "upper" => upper = v.parse::<f64>().ok(),
            "dt" => dt = v.parse::<f64>().ok(),
            "version" => version = v.parse::<u32>().ok(),
            _ => return Err(Error::Parse(format!("unknown cache header key {k:?}"))),
        }
    }
    if version != Some(CACHE_VERSION) {
        return Err(Error::Parse(format!("unsupported zero cache version {version:?}")));
    }
    match (upper, dt) {
        (Some(u), Some(d)) => Ok((u, d)),
        _ => Err(Error::Parse("zero cache header needs upper and dt".into())),
    }
}
