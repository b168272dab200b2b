//! Hardy's function by the Riemann–Siegel formula.
//!
//! `Z(t) = 2 sum_{n <= N} n^{-1/2} cos(theta - t log n)
//!        + (-1)^{N-1} a^{-1/2} sum_k C_k(p) a^{-k}`
//! with `a = sqrt(t / 2 pi)`, `N = floor(a)`, `p = a - N`. The correction
//! functions `C_k` are combinations of derivatives of
//! `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`; they are tabulated
//! once as polynomials in `p - 1/2` from a Cauchy-integral Taylor expansion
//! of the entire function `Psi`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::theta::theta_unchecked;

/// Number of correction terms `C_0..C_4` used by default.
pub const DEFAULT_CORRECTIONS: usize = 5;

/// Largest supported number of correction terms.
pub const MAX_CORRECTIONS: usize = 5;

const TAYLOR_TERMS: usize = 80;
const CIRCLE_POINTS: usize = 256;

fn psi(p: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    ((p * p - p - 1.0 / 16.0) * two_pi).cos() / (p * two_pi).cos()
}

/// Taylor coefficients of `Psi` about 1/2 by the trapezoid rule on the unit
/// circle. `Psi` is even about 1/2, so odd coefficients are exactly zero.
fn psi_taylor() -> Vec<f64> {
    let center = Complex64::new(0.5, 0.0);
    let values: Vec<Complex64> = (0..CIRCLE_POINTS)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / CIRCLE_POINTS as f64;
            psi(center + Complex64::from_polar(1.0, phi))
        })
        .collect();
    (0..TAYLOR_TERMS)
        .map(|m| {
            if m % 2 == 1 {
                return 0.0;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let phi = 2.0 * PI * ((j * m) % CIRCLE_POINTS) as f64 / CIRCLE_POINTS as f64;
                acc += v * Complex64::from_polar(1.0, -phi);
            }
            acc.re / CIRCLE_POINTS as f64
        })
        .collect()
}

/// Polynomial in `x = p - 1/2` of `Psi^{(j)}`.
fn derivative(a: &[f64], j: usize) -> Vec<f64> {
    (0..a.len().saturating_sub(j))
        .map(|m| {
            let falling: f64 = (m + 1..=m + j).map(|k| k as f64).product();
            a[m + j] * falling
        })
        .collect()
}

fn combine(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let len = terms.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for (c, p) in terms {
        for (o, v) in out.iter_mut().zip(p.iter()) {
            *o += c * v;
        }
    }
    out
}

fn correction_polys() -> &'static [Vec<f64>; MAX_CORRECTIONS] {
    static POLYS: OnceLock<[Vec<f64>; MAX_CORRECTIONS]> = OnceLock::new();
    POLYS.get_or_init(|| {
        let a = psi_taylor();
        let d: Vec<Vec<f64>> = (0..=12).map(|j| derivative(&a, j)).collect();
        let p2 = PI * PI;
        let p4 = p2 * p2;
        let p6 = p4 * p2;
        let p8 = p4 * p4;
        [
            d[0].clone(),
            combine(&[(-1.0 / (96.0 * p2), &d[3])]),
            combine(&[(1.0 / (64.0 * p2), &d[2]), (1.0 / (18432.0 * p4), &d[6])]),
            combine(&[
                (-1.0 / (64.0 * p2), &d[1]),
                (-1.0 / (3840.0 * p4), &d[5]),
                (-1.0 / (5_308_416.0 * p6), &d[9]),
            ]),
            combine(&[
                (1.0 / (128.0 * p2), &d[0]),
                (19.0 / (24576.0 * p4), &d[4]),
                (11.0 / (5_898_240.0 * p6), &d[8]),
                (1.0 / (2_038_431_744.0 * p8), &d[12]),
            ]),
        ]
    })
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// `C_k(p)` for `k < MAX_CORRECTIONS`.
pub fn rs_correction(k: usize, p: f64) -> f64 {
    horner(&correction_polys()[k], p - 0.5)
}

/// Remainder term `(-1)^{N-1} a^{-1/2} sum_{k < corrections} C_k(p) a^{-k}`.
pub(crate) fn remainder(t: f64, corrections: usize) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor();
    let p = a - n;
    let polys = correction_polys();
    let x = p - 0.5;
    let inv = 1.0 / a;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for poly in polys.iter().take(corrections) {
        sum += horner(poly, x) * pow;
        pow *= inv;
    }
    let sign = if (n as u64) % 2 == 1 { 1.0 } else { -1.0 };
    sign * inv.sqrt() * sum
}

/// Length `N = floor(sqrt(t / 2 pi))` of the main sum.
pub fn main_sum_length(t: f64) -> usize {
    (t / (2.0 * PI)).sqrt().floor() as usize
}

/// `Z(t)` for `t >= 10`. Below `t = 100` the asymptotic remainder is only
/// good to a few `1e-6`, so the Euler–Maclaurin oracle is used there; above,
/// Riemann–Siegel with `C_0..C_4`.
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t >= 10.0) {
        return Err(Error::InvalidRange(format!("hardy_z needs t >= 10, got {t}")));
    }
    Ok(super::zeros::z_eval(t))
}

/// `Z(t)` keeping `corrections` terms of the remainder (1 = `C_0` only).
pub fn hardy_z_with(t: f64, corrections: usize) -> Result<f64> {
    if !(t >= 10.0) {
        return Err(Error::InvalidRange(format!("hardy_z needs t >= 10, got {t}")));
    }
    if corrections == 0 || corrections > MAX_CORRECTIONS {
        return Err(Error::Config(format!(
            "Riemann-Siegel corrections must be in 1..={MAX_CORRECTIONS}, got {corrections}"
        )));
    }
    Ok(z_unchecked(t, corrections))
}

pub(crate) fn z_unchecked(t: f64, corrections: usize) -> f64 {
    let th = theta_unchecked(t);
    let n = main_sum_length(t);
    let mut s = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        s += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    2.0 * s + remainder(t, corrections)
}
