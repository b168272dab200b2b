//! Fejér kernel, the odd kernel `g` and the band-limited sign approximant
//! `F_omega(u) = int_0^1 g(s) sin(2 pi omega u s) ds`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate_pieces, QuadOptions};

/// Sign with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `K(x) = (sin(pi x) / (pi x))^2`, with `K(0) = 1` and `K(m) = 0` at
/// nonzero integers.
pub fn fejer_k(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.fract() == 0.0 {
        return 0.0;
    }
    let a = PI * x;
    let r = a.sin() / a;
    r * r
}

// x cot x = 1 - sum_k X_COT[k] x^{2k+2}.
const X_COT: [f64; 8] = [
    1.0 / 3.0,
    1.0 / 45.0,
    2.0 / 945.0,
    1.0 / 4725.0,
    2.0 / 93555.0,
    1382.0 / 638_512_875.0,
    4.0 / 18_243_225.0,
    3617.0 / 162_820_783_125.0,
];

/// `1/pi - s cot(pi s)` for `s in [0, 1)`, accurate near `s = 0`.
fn one_over_pi_minus_s_cot(s: f64) -> f64 {
    let x = PI * s;
    if x < 0.5 {
        let x2 = x * x;
        let mut pow = x2;
        let mut sum = 0.0;
        for c in X_COT {
            sum += c * pow;
            pow *= x2;
        }
        sum / PI
    } else {
        1.0 / PI - s / x.tan()
    }
}

/// The odd kernel `g(t) = 2(sgn(t)/pi + (1 - |t|) cot(pi t))` on
/// `0 < |t| <= 1`, zero for `|t| > 1`. `g` is unbounded at 0, where a
/// domain error is returned.
pub fn g_kernel(t: f64) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("g is singular or undefined at t = {t}")));
    }
    let a = t.abs();
    if a > 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 * sgn(t) * one_over_pi_minus_s_cot(1.0 - a))
}

/// Band parameter of the sign approximant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximantParams {
    omega: f64,
}

impl ApproximantParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!("omega must be finite and positive, got {omega}")));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        f_omega(u, self.omega)
    }
}

/// `F_omega(u)` by adaptive quadrature, split at the half-periods of the
/// sine so every panel sees at most one oscillation. The integrand's limit
/// at `s = 0` is `4 omega u`. Oddness in `u` is exact.
pub fn f_omega(u: f64, omega: f64) -> Result<f64> {
    let params = ApproximantParams::new(omega)?;
    if !u.is_finite() {
        return Err(Error::Domain(format!("f_omega needs a finite u, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let w = params.omega * u.abs();
    let freq = 2.0 * PI * w;
    let integrand = |s: f64| {
        if s <= 0.0 {
            4.0 * w
        } else {
            2.0 * one_over_pi_minus_s_cot(1.0 - s) * (freq * s).sin()
        }
    };
    let pieces = (2.0 * w).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=pieces).map(|k| k as f64 / pieces as f64).collect();
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-12,
        max_panels: 20_000,
    };
    let r = integrate_pieces(integrand, &breaks, opts)
        .map_err(|e| Error::Numeric(format!("F_omega({u}, {omega}): {e}")))?;
    Ok(sgn(u) * r.value)
}

/// Value of the indicator of `(alpha, beta)` built from signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharValue {
    pub value: f64,
    /// `u` sits on an endpoint; `value` is then 1/2.
    pub at_endpoint: bool,
}

/// `chi(u) = (sgn(beta - u) + sgn(u - alpha)) / 2`.
pub fn char_from_sgn(alpha: f64, beta: f64, u: f64) -> Result<CharValue> {
    if !(alpha < beta) {
        return Err(Error::Domain(format!("need alpha < beta, got ({alpha}, {beta})")));
    }
    Ok(CharValue {
        value: 0.5 * (sgn(beta - u) + sgn(u - alpha)),
        at_endpoint: u == alpha || u == beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fejer_values() {
        assert_eq!(fejer_k(0.0), 1.0);
        assert_eq!(fejer_k(1.0), 0.0);
        assert_eq!(fejer_k(-3.0), 0.0);
        assert_abs_diff_eq!(fejer_k(0.5), 4.0 / (PI * PI), epsilon = 1e-15);
    }

    #[test]
    fn g_values() {
        assert_abs_diff_eq!(g_kernel(0.5).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert_eq!(g_kernel(1.5).unwrap(), 0.0);
        assert_eq!(g_kernel(-0.3).unwrap(), -g_kernel(0.3).unwrap());
        assert!(matches!(g_kernel(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g_expansions() {
        let near1 = g_kernel(0.99).unwrap();
        assert_abs_diff_eq!(near1, 2.0 * PI / 3.0 * 1e-4, epsilon = 1e-6);
        for t in [1e-3, 1e-2] {
            let g = g_kernel(t).unwrap();
            let approx = 2.0 / (PI * t) - 2.0 * PI / 3.0 * t + 2.0 * PI / 3.0 * t * t;
            assert!((g - approx).abs() < 10.0 * t * t * t, "t = {t}");
        }
        // Series and direct branches meet.
        let s = 0.5 / PI;
        let a = one_over_pi_minus_s_cot(s * (1.0 - 1e-15));
        let b = one_over_pi_minus_s_cot(s * (1.0 + 1e-15));
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn f_omega_basics() {
        assert_eq!(f_omega(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(f_omega(-3.0, 1.0).unwrap(), -f_omega(3.0, 1.0).unwrap());
        let v = f_omega(3.0, 1.0).unwrap();
        assert!((1.0 - v).abs() <= fejer_k(3.0) + 1e-6);
        assert!(ApproximantParams::new(0.0).is_err());
    }

    #[test]
    fn char_values() {
        assert_eq!(char_from_sgn(0.0, 1.0, 0.5).unwrap().value, 1.0);
        assert_eq!(char_from_sgn(0.0, 1.0, 2.0).unwrap().value, 0.0);
        assert_eq!(char_from_sgn(-1.0, 1.0, -0.9999).unwrap().value, 1.0);
        let e = char_from_sgn(0.0, 1.0, 1.0).unwrap();
        assert!(e.at_endpoint);
        assert_eq!(e.value, 0.5);
        assert!(char_from_sgn(1.0, 1.0, 0.0).is_err());
    }
}
