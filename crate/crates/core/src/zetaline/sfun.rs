//! `S(t) = N(t) - theta(t)/pi - 1` from a zero cache, window statistics and
//! the joint moment of `pi S + V_y`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{max_dt, PrimeSum};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::quad::gauss_legendre;
use crate::specfun::normal_cdf;

use super::theta::{theta_inverse, theta_unchecked, THETA_MIN_T};
use super::zeros::ZeroCache;

/// Histogram bin width and half-range for normalized `S`.
pub const HIST_WIDTH: f64 = 0.02;
pub const HIST_RANGE: f64 = 8.0;

/// Samples per parallel work item of the histogram pass.
const SAMPLE_CHUNK: usize = 1 << 18;

/// `S(t)` for `10 <= t <= cache.upper`.
pub fn s_of_t(cache: &ZeroCache, t: f64) -> Result<f64> {
    if !(t >= THETA_MIN_T && t <= cache.upper) {
        return Err(Error::InvalidRange(format!(
            "S(t) needs {THETA_MIN_T} <= t <= {} (cache upper end), got {t}",
            cache.upper
        )));
    }
    Ok(cache.count(t) as f64 - theta_unchecked(t) / PI - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SWindowStats {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub dt: f64,
    pub positive_measure: f64,
    pub negative_measure: f64,
    /// `(1/H) int S^2`.
    pub moment2: f64,
    /// `(1/H) int S`.
    pub mean: f64,
    /// `pi sqrt 2 / sqrt(log log T)`.
    pub scale: f64,
    /// Sampled measure of `scale * S` per bin; mass outside the bins is
    /// kept in `underflow` and `overflow`.
    pub histogram: Vec<HistBin>,
    pub underflow: f64,
    pub overflow: f64,
    pub samples: u64,
    pub min_normalized: f64,
    pub max_normalized: f64,
    pub zeros_in_window: usize,
}

impl SWindowStats {
    /// `(pi sqrt 2)^2 moment2 / log log T`, which tends to 1.
    pub fn mean_square_ratio(&self) -> f64 {
        self.moment2 * self.scale * self.scale
    }

    /// Histogram mass on `(a, b]` divided by `H`, with `a`, `b` snapped to
    /// the bin edges.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let mut m = 0.0;
        for bin in &self.histogram {
            let mid = 0.5 * (bin.lo + bin.hi);
            if mid > a && mid <= b {
                m += bin.mass;
            }
        }
        if a < -HIST_RANGE {
            m += self.underflow;
        }
        if b > HIST_RANGE {
            m += self.overflow;
        }
        m / self.h
    }

    /// Largest gap between the sampled distribution of `scale * S` and the
    /// standard normal, taken over bin edges.
    pub fn ks_distance(&self) -> f64 {
        let total = self.samples_mass();
        let mut cum = self.underflow;
        let mut worst: f64 = 0.0;
        if let Some(first) = self.histogram.first() {
            worst = (cum / total - normal_cdf(first.lo)).abs();
        }
        for bin in &self.histogram {
            cum += bin.mass;
            worst = worst.max((cum / total - normal_cdf(bin.hi)).abs());
        }
        worst
    }

    fn samples_mass(&self) -> f64 {
        self.underflow + self.overflow + self.histogram.iter().map(|b| b.mass).sum::<f64>()
    }

    pub fn write_histogram_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_lo,bin_hi,mass")?;
        for b in &self.histogram {
            writeln!(out, "{},{},{:e}", b.lo, b.hi, b.mass)?;
        }
        Ok(())
    }
}

fn check_window(cache: &ZeroCache, t: f64, h: f64) -> Result<()> {
    if !(t >= THETA_MIN_T && h > 0.0 && t + h <= cache.upper) {
        return Err(Error::InvalidRange(format!(
            "window [{t}, {}] must lie in [{THETA_MIN_T}, {}] covered by the zero cache",
            t + h,
            cache.upper
        )));
    }
    Ok(())
}

/// Maximal sub-intervals of `[t, t+h]` on which `N` is constant, with that
/// count.
fn pieces(cache: &ZeroCache, t: f64, h: f64) -> Vec<(f64, f64, usize)> {
    let end = t + h;
    let lo = cache.gammas.partition_point(|&g| g <= t);
    let hi = cache.gammas.partition_point(|&g| g < end);
    let mut count = cache.count(t);
    let mut out = Vec::with_capacity(hi - lo + 1);
    let mut left = t;
    for i in lo..hi {
        let g = cache.gammas[i];
        out.push((left, g, count));
        count += cache.multiplicities[i] as usize;
        left = g;
    }
    out.push((left, end, count));
    out
}

/// Exact measure of `S > 0` on a piece: `S` decreases there, so it is the
/// distance from `l` to the root of `theta = pi (n - 1)`, if any.
fn positive_part(l: f64, r: f64, n: usize) -> f64 {
    let target = PI * (n as f64 - 1.0);
    let s = |t: f64| n as f64 - 1.0 - theta_unchecked(t) / PI;
    if s(r) > 0.0 {
        return r - l;
    }
    if s(l) <= 0.0 {
        return 0.0;
    }
    match theta_inverse(target) {
        Ok(root) => root.clamp(l, r) - l,
        Err(_) => 0.0,
    }
}

/// Statistics of `S` on `[T, T+H]`. Positive measure and moments are exact
/// per piece between zeros; the histogram samples the midpoints of a grid of
/// step `dt`.
pub fn s_window_stats(cache: &ZeroCache, t: f64, h: f64, dt: f64) -> Result<SWindowStats> {
    check_window(cache, t, h)?;
    if !(dt > 0.0 && dt <= h) {
        return Err(Error::Config(format!("sampling step must be in (0, H], got {dt}")));
    }
    let loglog = t.ln().ln();
    if !(loglog > 0.0) {
        return Err(Error::InvalidRange(format!("log log T must be positive, T = {t}")));
    }
    let scale = PI * 2f64.sqrt() / loglog.sqrt();
    let ps = pieces(cache, t, h);
    let (nodes, weights) = gauss_legendre(6);
    let per_piece: Vec<(f64, f64, f64)> = ps
        .par_iter()
        .map(|&(l, r, n)| {
            let half = 0.5 * (r - l);
            let mid = 0.5 * (r + l);
            let (mut m1, mut m2) = (0.0, 0.0);
            for (x, w) in nodes.iter().zip(&weights) {
                let s = n as f64 - 1.0 - theta_unchecked(mid + half * x) / PI;
                m1 += w * s;
                m2 += w * s * s;
            }
            (positive_part(l, r, n), half * m1, half * m2)
        })
        .collect();
    let (mut pos, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (a, b, c) in per_piece {
        pos += a;
        m1 += b;
        m2 += c;
    }

    let bins = (2.0 * HIST_RANGE / HIST_WIDTH).round() as usize;
    let samples = (h / dt).floor().max(1.0) as usize;
    let step = h / samples as f64;
    let chunks: Vec<usize> = (0..samples).step_by(SAMPLE_CHUNK).collect();
    let partial: Vec<(Vec<u64>, u64, u64, f64, f64)> = chunks
        .par_iter()
        .map(|&start| {
            let end = (start + SAMPLE_CHUNK).min(samples);
            let mut counts = vec![0u64; bins];
            let (mut under, mut over) = (0u64, 0u64);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let t_first = t + (start as f64 + 0.5) * step;
            let mut idx = cache.gammas.partition_point(|&g| g <= t_first);
            let mut count: usize = cache.multiplicities[..idx].iter().map(|&m| m as usize).sum();
            for k in start..end {
                let tk = t + (k as f64 + 0.5) * step;
                while idx < cache.gammas.len() && cache.gammas[idx] <= tk {
                    count += cache.multiplicities[idx] as usize;
                    idx += 1;
                }
                let v = scale * (count as f64 - 1.0 - theta_unchecked(tk) / PI);
                lo = lo.min(v);
                hi = hi.max(v);
                let pos = (v + HIST_RANGE) / HIST_WIDTH;
                if pos < 0.0 {
                    under += 1;
                } else if pos >= bins as f64 {
                    over += 1;
                } else {
                    counts[pos as usize] += 1;
                }
            }
            (counts, under, over, lo, hi)
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let (mut under, mut over) = (0u64, 0u64);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (c, u, o, l, h2) in partial {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        under += u;
        over += o;
        lo = lo.min(l);
        hi = hi.max(h2);
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistBin {
            lo: -HIST_RANGE + i as f64 * HIST_WIDTH,
            hi: -HIST_RANGE + (i + 1) as f64 * HIST_WIDTH,
            mass: c as f64 * step,
        })
        .collect();
    Ok(SWindowStats {
        t,
        h,
        dt: step,
        positive_measure: pos,
        negative_measure: h - pos,
        moment2: m2 / h,
        mean: m1 / h,
        scale,
        histogram,
        underflow: under as f64 * step,
        overflow: over as f64 * step,
        samples: samples as u64,
        min_normalized: lo,
        max_normalized: hi,
        zeros_in_window: ps.len() - 1,
    })
}

/// `y = x^{1/(8m+3)}` with `x = T^{0.1 eps}`.
pub fn joint_moment_y(t: f64, eps: f64, m: u32) -> f64 {
    let x = t.powf(0.1 * eps);
    x.powf(1.0 / (8 * m + 3) as f64)
}

/// Upper bound `(c0 H / (56 eps)) (pi c0 / eps)^{2m}` with `c0 = 2880`.
pub fn joint_moment_bound(h: f64, eps: f64, m: u32) -> f64 {
    const C0: f64 = 2880.0;
    C0 * h / (56.0 * eps) * (PI * C0 / eps).powi(2 * m as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointMoment {
    pub m: u32,
    pub eps: f64,
    /// Prime cutoff used for `V_y`; 0 when `V` is identically zero.
    pub y: u64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub within_bound: bool,
}

/// `int_T^{T+H} |pi S + V_y|^{2m} dt`. With `table = None` (or no primes),
/// `V_y = 0`. Each piece between zeros is split into panels no longer than
/// the sampling step of `V_y` and integrated by 8-point Gauss–Legendre.
pub fn joint_moment(
    cache: &ZeroCache,
    table: Option<&PrimeTable>,
    t: f64,
    h: f64,
    m: u32,
    eps: f64,
) -> Result<JointMoment> {
    check_window(cache, t, h)?;
    if m == 0 {
        return Err(Error::Domain("joint moment order must be at least 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let sum = table.filter(|tb| !tb.primes().is_empty()).map(PrimeSum::new);
    let panel = sum.as_ref().map_or(f64::INFINITY, |s| max_dt(s.y()));
    let (nodes, weights) = gauss_legendre(8);
    let ps = pieces(cache, t, h);
    let parts: Vec<f64> = ps
        .par_iter()
        .map(|&(l, r, n)| {
            let k = ((r - l) / panel).ceil().max(1.0) as usize;
            let w = (r - l) / k as f64;
            let mut acc = 0.0;
            for j in 0..k {
                let mid = l + (j as f64 + 0.5) * w;
                for (x, wt) in nodes.iter().zip(&weights) {
                    let tt = mid + 0.5 * w * x;
                    let s = n as f64 - 1.0 - theta_unchecked(tt) / PI;
                    let v = sum.as_ref().map_or(0.0, |su| su.eval(tt));
                    acc += wt * 0.5 * w * (PI * s + v).abs().powi(2 * m as i32);
                }
            }
            acc
        })
        .collect();
    let value: f64 = parts.iter().sum();
    if !value.is_finite() {
        return Err(Error::Numeric(format!("joint moment of order {m} overflowed")));
    }
    let bound = joint_moment_bound(h, eps, m);
    Ok(JointMoment {
        m,
        eps,
        y: sum.as_ref().map_or(0, |s| s.y()),
        value,
        bound,
        ratio: value / bound,
        within_bound: value <= bound,
    })
}
