//! Special functions: Bessel `J0`, probabilists' Hermite polynomials, the
//! standard normal CDF and the Gaussian–Hermite sign integral.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Largest Hermite degree accepted by [`hermite`].
pub const HERMITE_MAX_DEGREE: usize = 200;

/// Bessel function of the first kind of order zero.
///
/// Power series for `|x| <= 5`, the trapezoid rule on the periodic integral
/// `(1/pi) int_0^pi cos(x sin t) dt` for `5 < |x| <= 50`, Hankel's asymptotic
/// expansion beyond.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 needs a finite argument, got {x}")));
    }
    let ax = x.abs();
    Ok(if ax <= 5.0 {
        j0_series(ax)
    } else if ax <= 50.0 {
        j0_trapezoid(ax)
    } else {
        j0_hankel(ax)
    })
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut n = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) || n < 3.0 {
        term *= -q / (n * n);
        sum += term;
        n += 1.0;
        if n > 200.0 {
            break;
        }
    }
    sum
}

fn j0_trapezoid(x: f64) -> f64 {
    // The integrand is even and pi-periodic, so the aliasing error is bounded
    // by 2|J_{2M}(x)|, negligible once 2M exceeds x by a margin.
    let m = (0.75 * x).ceil() as usize + 16;
    let h = PI / m as f64;
    let mut sum = 0.5 * (1.0 + (x * (PI).sin()).cos());
    for k in 1..m {
        sum += (x * (k as f64 * h).sin()).cos();
    }
    sum / m as f64
}

fn j0_hankel(x: f64) -> f64 {
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    for k in 1..30 {
        let odd = (2 * k - 1) as f64;
        a *= odd * odd * inv8x / k as f64;
        if a < 1e-18 {
            break;
        }
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Probabilists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_n = x H_{n-1} - (n-1) H_{n-2}`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > HERMITE_MAX_DEGREE {
        return Err(Error::Domain(format!(
            "hermite degree {n} exceeds {HERMITE_MAX_DEGREE}"
        )));
    }
    Ok(*hermite_values(n, x).last().expect("non-empty"))
}

/// `[H_0(x), ..., H_n(x)]`.
pub fn hermite_values(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(x);
    }
    for k in 2..=n {
        let next = x * h[k - 1] - (k - 1) as f64 * h[k - 2];
        h.push(next);
    }
    h
}

/// Explicit sum `n! sum_j (-1)^j x^{n-2j} / (j! (n-2j)! 2^j)`.
pub fn hermite_explicit(n: usize, x: f64) -> f64 {
    // c_j = n! / (j! (n-2j)! 2^j), built by c_{j+1} = c_j (n-2j)(n-2j-1) / (2(j+1)).
    let mut c = 1.0;
    let mut sum = 0.0;
    for j in 0..=n / 2 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c * x.powi((n - 2 * j) as i32);
        let r = (n - 2 * j) as f64;
        c *= r * (r - 1.0) / (2.0 * (j + 1) as f64);
    }
    sum
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `int_R exp(-u^2/2) H_{2n}(u) sgn(u - c) du` in closed form.
///
/// For `n = 0` this is `sqrt(2 pi) (1 - 2 Phi(c))`; for `n >= 1` the
/// integrand is an exact derivative and the value is
/// `2 H_{2n-1}(c) exp(-c^2/2)`.
pub fn gauss_hermite_sign_integral(n: usize, c: f64) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::Domain(format!("sign integral needs a finite shift, got {c}")));
    }
    if n == 0 {
        // 1 - 2 Phi(c) = erfc(c/sqrt2) - 1 = -erf(c/sqrt2), without cancellation.
        return Ok(-(2.0 * PI).sqrt() * libm::erf(c / SQRT_2));
    }
    if 2 * n - 1 > HERMITE_MAX_DEGREE {
        return Err(Error::Domain(format!("sign integral degree 2n = {} too large", 2 * n)));
    }
    Ok(2.0 * hermite(2 * n - 1, c)? * (-0.5 * c * c).exp())
}
