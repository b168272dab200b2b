mod common;

use std::f64::consts::PI;

use argdist::specfun::{gauss_hermite_sign_integral, hermite, hermite_explicit, hermite_values, normal_cdf};
use common::{gauss_dd, Dd, gl_integrate, gl_integrate_dd, hermite_coeffs, hermite_dd, poly_eval};
use proptest::prelude::*;

const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;

#[test]
fn hermite_matches_integer_coefficients() {
    for n in 0..=20 {
        let c = hermite_coeffs(n);
        for x in [-4.0, -1.5, -0.3, 0.0, 0.8, 2.2, 5.0] {
            let want = poly_eval(&c, x);
            let got = hermite(n, x).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "H_{n}({x})");
        }
    }
}

#[test]
fn gaussian_times_monomial_fourier_transform() {
    // int_R x^{2n} e^{-x^2/2} e^{ixy} dx = (-1)^n sqrt(2 pi) e^{-y^2/2} H_{2n}(y).
    for n in 0..=5 {
        for y in [0.0, 0.4, 1.1, 2.5] {
            let f = |x: f64| x.powi(2 * n as i32) * (-0.5 * x * x).exp() * (x * y).cos();
            let lhs = 2.0 * gl_integrate(f, 0.0, 40.0, 400);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * (2.0 * PI).sqrt() * (-0.5 * y * y).exp() * hermite(2 * n, y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8, "n = {n}, y = {y}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn hermite_cosine_transform() {
    for n in 0..=5 {
        for y in [0.0, 0.7, 1.6, 3.0] {
            let f = |x: f64| hermite(2 * n, x).unwrap() * (-0.5 * x * x).exp() * (x * y).cos();
            let lhs = gl_integrate(f, 0.0, 40.0, 400);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * SQRT_HALF_PI * y.powi(2 * n as i32) * (-0.5 * y * y).exp();
            assert!((lhs - rhs).abs() <= 1e-8, "n = {n}, y = {y}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn hermite_half_line_norms() {
    let mut fact = 1.0;
    for n in 0..=5 {
        if n > 0 {
            fact *= n as f64;
        }
        let f = |x: f64| (-0.5 * x * x).exp() * hermite(n, x).unwrap().powi(2);
        let lhs = gl_integrate(f, 0.0, 40.0, 400);
        assert!((lhs - SQRT_HALF_PI * fact).abs() <= 1e-8, "n = {n}");
    }
}

#[test]
fn sign_integral_matches_quadrature() {
    for n in 0..=10 {
        for k in -16..=16 {
            let c = 0.5 * k as f64;
            let f = |u: Dd| gauss_dd(u).mul(hermite_dd(2 * n, u));
            // For n >= 1 the full-line integral vanishes, so the tail away
            // from the origin avoids cancelling the large central mass.
            let q = if n == 0 {
                gl_integrate_dd(f, c, c.max(0.0) + 40.0, 800) - gl_integrate_dd(f, c.min(0.0) - 40.0, c, 800)
            } else if c >= 0.0 {
                2.0 * gl_integrate_dd(f, c, c + 40.0, 800)
            } else {
                -2.0 * gl_integrate_dd(f, c - 40.0, c, 800)
            };
            let got = gauss_hermite_sign_integral(n, c).unwrap();
            // 1e-9 absolute, widened to 4 ulp where the value exceeds ~1e6.
            let tol = 1e-9f64.max(4.0 * f64::EPSILON * q.abs());
            assert!((got - q).abs() <= tol, "n = {n}, c = {c}: {got} vs {q}");
        }
    }
}

#[test]
fn sign_integral_at_zero_shift_vanishes_by_oddness() {
    for n in 0..=10 {
        assert_eq!(gauss_hermite_sign_integral(n, 0.0).unwrap(), 0.0);
    }
}

#[test]
fn normal_cdf_reference_values() {
    assert_eq!(normal_cdf(0.0), 0.5);
    assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-17);
}

#[test]
fn degree_above_limit_is_rejected() {
    assert!(hermite(201, 1.0).is_err());
    assert!(gauss_hermite_sign_integral(101, 1.0).is_err());
    assert!(gauss_hermite_sign_integral(1, f64::NAN).is_err());
}

proptest! {
    #[test]
    fn parity(n in 0usize..40, x in -6.0f64..6.0) {
        let a = hermite(n, x).unwrap();
        let b = hermite(n, -x).unwrap();
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(a, s * b);
    }

    #[test]
    fn three_term_recurrence(n in 2usize..40, x in -6.0f64..6.0) {
        let v = hermite_values(n, x);
        let lhs = v[n];
        let rhs = x * v[n - 1] - (n as f64 - 1.0) * v[n - 2];
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (x * v[n - 1]).abs().max((n as f64 * v[n - 2]).abs()).max(1.0));
    }

    #[test]
    fn derivative_relation(n in 1usize..20, x in -4.0f64..4.0) {
        // H_n' = n H_{n-1}, checked by central difference.
        let h = 1e-5;
        let d = (hermite(n, x + h).unwrap() - hermite(n, x - h).unwrap()) / (2.0 * h);
        let want = n as f64 * hermite(n - 1, x).unwrap();
        prop_assert!((d - want).abs() <= 1e-5 * want.abs().max(1.0) * (n as f64));
    }

    #[test]
    fn explicit_sum_agrees(n in 0usize..25, x in -3.0f64..3.0) {
        let a = hermite(n, x).unwrap();
        let b = hermite_explicit(n, x);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
