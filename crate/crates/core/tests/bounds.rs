mod common;

use argdist::primes::sieve;
use argdist::series::{g_deriv0, g_eval, phi_series, varpi_series};
use argdist::specfun::hermite;
use common::{gl_integrate, varpi_exact};

fn inv_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![1.0f64; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] / k as f64;
    }
    v
}

#[test]
fn varpi_below_inverse_factorial() {
    let w = varpi_series(100).unwrap();
    let inv = inv_factorials(100);
    // n = 0 is an equality: varpi_0 = 1 = 1/0!.
    assert_eq!(w.coeffs()[0], 1.0);
    for n in 1..=100 {
        assert!(w.coeffs()[n].abs() < inv[n], "n = {n}");
    }
}

#[test]
fn varpi_bound_holds_exactly_in_rationals() {
    use num_traits::Signed;
    let exact = varpi_exact(40);
    let mut fact = num_bigint::BigInt::from(1);
    for (n, c) in exact.iter().enumerate().skip(1) {
        fact *= n;
        let scaled = c.abs() * num_rational::BigRational::from_integer(fact.clone());
        assert!(scaled < num_rational::BigRational::from_integer(1.into()), "n = {n}");
    }
}

#[test]
fn g_on_imaginary_axis_is_at_most_one() {
    let t = sieve(10_000).unwrap();
    for k in 1..=400 {
        let u = 0.05 * k as f64;
        let g = g_eval(&t, u).unwrap();
        assert!(g.abs() < 1.0, "u = {u}: {g}");
    }
    assert_eq!(g_eval(&t, 0.0).unwrap(), 1.0);
}

#[test]
fn g_decays_like_gaussian_on_sparse_primes() {
    // Every prime p > (4u)^2 contributes at most exp(-(30/31) u^2 / p).
    let t = sieve(10_000).unwrap();
    for u in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let cut = (4.0 * u) * (4.0 * u);
        let tail: f64 = t.primes().iter().filter(|&&p| p as f64 > cut).map(|&p| 1.0 / p as f64).sum();
        let g = g_eval(&t, u).unwrap().abs();
        assert!(g < (-(30.0 / 31.0) * u * u * tail).exp(), "u = {u}");
    }
}

#[test]
fn g_derivatives_positive_and_below_sigma_powers() {
    let t = sieve(10_000).unwrap();
    let phi = phi_series(&t, 50).unwrap();
    let s = t.sigma();
    assert_eq!(g_deriv0(&t, 0, &phi).unwrap(), 1.0);
    // G'(0) = sigma exactly, so k = 1 is an equality up to rounding.
    let g1 = g_deriv0(&t, 1, &phi).unwrap();
    assert!((g1 - s).abs() <= 1e-14 * s);
    for k in 2..=50 {
        let g = g_deriv0(&t, k, &phi).unwrap();
        assert!(g > 0.0 && g < s.powi(k as i32), "k = {k}: {g} vs {}", s.powi(k as i32));
    }
}

#[test]
fn phi_below_sigma_powers_over_factorial() {
    let t = sieve(10_000).unwrap();
    let phi = phi_series(&t, 50).unwrap();
    let s = t.sigma();
    let inv = inv_factorials(50);
    for n in 1..=50 {
        assert!(phi.coeffs()[n].abs() < s.powi(n as i32) * inv[n], "n = {n}");
    }
}

#[test]
fn phi_below_iterated_log_bound() {
    let t = sieve(10_000).unwrap();
    let phi = phi_series(&t, 50).unwrap();
    let inv = inv_factorials(50);
    let root = (2.0 * std::f64::consts::PI).sqrt();
    for n in 2..=50 {
        let bound = root * ((n as f64).ln().ln() + 1.0).powi(n as i32) * inv[n];
        assert!(phi.coeffs()[n].abs() < bound, "n = {n}");
    }
}

#[test]
fn hermite_absolute_moment_below_root_factorial() {
    let half = (std::f64::consts::PI / 2.0).sqrt();
    let mut fact = 1.0;
    for n in 0..=8usize {
        if n > 0 {
            fact *= (2 * n - 1) as f64 * (2 * n) as f64;
        }
        let f = |x: f64| (-0.5 * x * x).exp() * hermite(2 * n, x).unwrap().abs();
        let lhs = gl_integrate(f, 0.0, 40.0, 8000);
        let rhs = half * fact.sqrt();
        if n == 0 {
            assert!((lhs - rhs).abs() < 1e-12);
        } else {
            assert!(lhs < rhs, "n = {n}: {lhs} vs {rhs}");
        }
    }
}
