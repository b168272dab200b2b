//! Riemann–Siegel theta `theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Lower end of the range where the asymptotic series is validated.
pub const THETA_MIN_T: f64 = 10.0;

// theta(t) - [t/2 log(t/2pi) - t/2 - pi/8] = sum_k THETA_TAIL[k] / t^{2k+1}
// with coefficients (1 - 2^{1-2k}) |B_2k| / (4k (2k - 1)).
const THETA_TAIL: [f64; 7] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430_080.0,
    511.0 / 1_216_512.0,
    1_414_477.0 / 1_476_034_560.0,
    8191.0 / 2_555_904.0,
];

/// Asymptotic series for `t >= 10`; the truncation error is below `1e-13`
/// there.
pub fn rs_theta(t: f64) -> Result<f64> {
    if !(t >= THETA_MIN_T) {
        return Err(Error::InvalidRange(format!(
            "rs_theta is validated for t >= {THETA_MIN_T}, got {t}; use theta_loggamma below"
        )));
    }
    Ok(theta_unchecked(t))
}

pub(crate) fn theta_unchecked(t: f64) -> f64 {
    let main = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0;
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut tail = 0.0;
    for c in THETA_TAIL {
        tail += c * pow;
        pow *= inv2;
    }
    main + tail
}

/// `theta'(t)` from the same series.
pub fn rs_theta_deriv(t: f64) -> Result<f64> {
    if !(t >= THETA_MIN_T) {
        return Err(Error::InvalidRange(format!(
            "rs_theta_deriv is validated for t >= {THETA_MIN_T}, got {t}"
        )));
    }
    Ok(theta_deriv_unchecked(t))
}

pub(crate) fn theta_deriv_unchecked(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut pow = inv2;
    let mut tail = 0.0;
    for (k, c) in THETA_TAIL.iter().enumerate() {
        tail -= (2 * k + 1) as f64 * c * pow;
        pow *= inv2;
    }
    0.5 * (t / (2.0 * PI)).ln() + tail
}

/// Solves `theta(t) = target` for `t >= 10` by Newton's method.
pub fn theta_inverse(target: f64) -> Result<f64> {
    let lo = theta_unchecked(THETA_MIN_T);
    if !(target >= lo) {
        return Err(Error::InvalidRange(format!(
            "theta_inverse needs target >= theta(10) = {lo}, got {target}"
        )));
    }
    // Leading-order guess from theta ~ (t/2) log(t / (2 pi e)).
    let x = target + PI / 8.0;
    let mut t = (2.0 * x / (x / (PI * std::f64::consts::E)).ln().max(1.0)).max(THETA_MIN_T);
    for _ in 0..100 {
        let dt = (theta_unchecked(t) - target) / theta_deriv_unchecked(t);
        let next = (t - dt).max(THETA_MIN_T);
        if (next - t).abs() <= 4.0 * f64::EPSILON * t {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

/// Theta from the complex log-Gamma function (Stirling series after an
/// upward shift), valid for any `t > 0`. Slower and less accurate at large
/// `t` than [`rs_theta`]; exposed for heights below its validated range.
pub fn theta_loggamma(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("theta_loggamma needs t > 0, got {t}")));
    }
    let z = Complex64::new(0.25, 0.5 * t);
    Ok(ln_gamma(z).im - 0.5 * t * PI.ln())
}

// Stirling coefficients B_2k / (2k (2k - 1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal log-Gamma (continuous in `z` off the negative real axis).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}
