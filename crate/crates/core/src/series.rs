//! Truncated power series and the Bessel-product generating function.
//!
//! `phi(z) = e^{-z} J0(2i sqrt z)` has Taylor coefficients `varpi_m`, and
//! `Phi(z) = prod_{p <= y} phi(z/p) = e^{-sigma z} G(z)` has coefficients
//! `Phi_n`, where `G(z) = prod_p J0(2i sqrt(z/p))` generates the moments of
//! the prime sum `V_y`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::specfun::bessel_j0;

/// Largest order accepted by [`varpi_series`].
pub const VARPI_MAX_ORDER: usize = 200;

/// Largest order accepted by [`phi_series`].
pub const PHI_MAX_ORDER: usize = 10_000;

/// Default multiply-add budget of [`phi_series`].
pub const DEFAULT_PHI_BUDGET: u64 = 50_000_000_000;

/// Taylor coefficients `c_0..=c_M` about 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        Self { coeffs }
    }

    /// The series `1 + 0 z + ... + 0 z^order`.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    /// `e^{a z}` truncated at `order`.
    pub fn exp(a: f64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        coeffs.push(c);
        for k in 1..=order {
            c *= a / k as f64;
            coeffs.push(c);
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`.
    pub fn coeff(&self, n: usize) -> Result<f64> {
        self.coeffs.get(n).copied().ok_or(Error::InsufficientOrder {
            needed: n,
            available: self.order(),
        })
    }

    /// Truncated Cauchy product, order `min(self.order, other.order)`.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let m = self.order().min(other.order());
        let coeffs = (0..=m)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum())
            .collect();
        PowerSeries { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

/// Coefficients `varpi_m = sum_{a+b=m} (-1)^a / (a! (b!)^2)` of `phi(z)`.
pub fn varpi_series(order: usize) -> Result<PowerSeries> {
    if order > VARPI_MAX_ORDER {
        return Err(Error::Domain(format!(
            "varpi order {order} exceeds {VARPI_MAX_ORDER}"
        )));
    }
    Ok(PowerSeries::new(varpi_coeffs(order)))
}

// phi solves z phi'' + (2z + 1) phi' + z phi = 0, so
// (n+1)^2 c_{n+1} = -(2n c_n + c_{n-1}). The recurrence avoids the
// cancellation of the alternating sum at high order.
fn varpi_coeffs(order: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; order + 1];
    c[0] = 1.0;
    for n in 1..order {
        let m = (n + 1) as f64;
        c[n + 1] = -(2.0 * n as f64 * c[n] + c[n - 1]) / (m * m);
    }
    c
}

/// `Phi_0..=Phi_nu` by successive truncated multiplication with
/// `phi(z/p)` over ascending primes, under [`DEFAULT_PHI_BUDGET`].
pub fn phi_series(table: &PrimeTable, nu: usize) -> Result<PowerSeries> {
    phi_series_with_budget(table, nu, DEFAULT_PHI_BUDGET)
}

/// As [`phi_series`] with an explicit multiply-add budget.
///
/// Factor coefficients `varpi_m p^{-m}` that underflow to zero are dropped,
/// so the work is `sum_p nu * L_p` with `L_p` the non-zero length.
pub fn phi_series_with_budget(table: &PrimeTable, nu: usize, budget: u64) -> Result<PowerSeries> {
    if nu > PHI_MAX_ORDER {
        return Err(Error::Domain(format!("phi order {nu} exceeds {PHI_MAX_ORDER}")));
    }
    let varpi = varpi_coeffs(nu.min(VARPI_MAX_ORDER));
    let factors: Vec<Vec<f64>> = table
        .primes()
        .iter()
        .map(|&p| {
            let inv = 1.0 / p as f64;
            let mut scale = 1.0;
            let mut f = Vec::with_capacity(varpi.len());
            for &w in &varpi {
                let c = w * scale;
                if c == 0.0 && scale == 0.0 {
                    break;
                }
                f.push(c);
                scale *= inv;
            }
            while f.len() > 1 && *f.last().expect("non-empty") == 0.0 {
                f.pop();
            }
            f
        })
        .collect();
    let work: u64 = factors.iter().map(|f| (f.len() as u64) * (nu as u64 + 1)).sum();
    if work > budget {
        return Err(Error::Resource(format!(
            "phi_series needs about {work} multiply-adds for nu = {nu} over {} primes; budget is {budget}",
            table.len()
        )));
    }
    let mut c = vec![0.0; nu + 1];
    c[0] = 1.0;
    for f in &factors {
        for n in (1..=nu).rev() {
            let top = n.min(f.len() - 1);
            let mut s = c[n];
            for m in 1..=top {
                s += f[m] * c[n - m];
            }
            c[n] = s;
        }
    }
    Ok(PowerSeries::new(c))
}

/// `G(-u^2) = prod_{p <= y} J0(2u / sqrt p)`, ascending primes.
pub fn g_eval(table: &PrimeTable, u: f64) -> Result<f64> {
    let mut g = 1.0;
    for &p in table.primes() {
        g *= bessel_j0(2.0 * u / (p as f64).sqrt())?;
    }
    Ok(g)
}

/// `G^{(k)}(0) = k! sum_{n=0}^k Phi_{k-n} sigma^n / n!`.
pub fn g_deriv0(table: &PrimeTable, k: usize, phi: &PowerSeries) -> Result<f64> {
    if k > phi.order() {
        return Err(Error::InsufficientOrder {
            needed: k,
            available: phi.order(),
        });
    }
    let sigma = table.sigma();
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..=k {
        if n > 0 {
            term *= sigma / n as f64;
        }
        sum += phi.coeffs()[k - n] * term;
    }
    Ok(sum * factorial(k))
}

/// Moment density `delta_n`: zero for odd `n`, and
/// `delta_{2k} = 2^{-2k} sum_{n=0}^k (2k)!/n! Phi_{k-n} sigma^n`.
pub fn delta_moment(table: &PrimeTable, n: usize, phi: &PowerSeries) -> Result<f64> {
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let k = n / 2;
    if k > phi.order() {
        return Err(Error::InsufficientOrder {
            needed: k,
            available: phi.order(),
        });
    }
    let sigma = table.sigma();
    let mut sum = 0.0;
    // (2k)!/j! sigma^j, built upward from (2k)!.
    let mut c = factorial(n);
    for j in 0..=k {
        if j > 0 {
            c *= sigma / j as f64;
        }
        sum += c * phi.coeffs()[k - j];
    }
    Ok(sum / 4f64.powi(k as i32))
}

/// Truncated Taylor approximation of `G(-u^2)` with its explicit remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub value: f64,
    pub remainder_bound: f64,
}

/// Constant of the remainder bound for truncation order `n`.
pub fn truncation_constant(n: usize) -> f64 {
    match n {
        1 => 10.0,
        2 => 8.1,
        _ => 13.5,
    }
}

/// `R_N(u) = |u|^{2(N+1)} mu^{N+1} / (N+1)!` with
/// `mu = min(log log (N+1) + 1, sigma)`.
pub fn truncation_remainder(sigma: f64, u: f64, n: usize) -> f64 {
    let mu = ((n as f64 + 1.0).ln().ln() + 1.0).min(sigma);
    let e = (n + 1) as i32;
    u.abs().powi(2 * e) * mu.powi(e) / factorial(n + 1)
}

/// `e^{-sigma u^2} sum_{n <= N} (-1)^n Phi_n u^{2n}` and the bound
/// `C_N e^{-sigma u^2} R_N(u)`, valid for `|u| <= 1`.
pub fn g_taylor_truncation(table: &PrimeTable, phi: &PowerSeries, u: f64, n: usize) -> Result<Truncation> {
    if !(u.abs() <= 1.0) {
        return Err(Error::Domain(format!("truncation needs |u| <= 1, got u = {u}")));
    }
    if n == 0 {
        return Err(Error::Domain("truncation order N must be >= 1".into()));
    }
    if n > phi.order() {
        return Err(Error::InsufficientOrder {
            needed: n,
            available: phi.order(),
        });
    }
    let sigma = table.sigma();
    let z = -u * u;
    let head = PowerSeries::new(phi.coeffs()[..=n].to_vec()).eval(z);
    let damp = (sigma * z).exp();
    Ok(Truncation {
        value: damp * head,
        remainder_bound: truncation_constant(n) * damp * truncation_remainder(sigma, u, n),
    })
}

/// One row of the coefficient dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub n: usize,
    pub varpi: f64,
    pub phi: f64,
    pub delta2n: f64,
}

/// Rows `0..=order` of `varpi_n`, `Phi_n` and `delta_{2n}`.
pub fn coefficient_table(table: &PrimeTable, order: usize) -> Result<Vec<CoeffRow>> {
    let varpi = varpi_series(order.min(VARPI_MAX_ORDER))?;
    let phi = phi_series(table, order)?;
    (0..=order)
        .map(|n| {
            Ok(CoeffRow {
                n,
                varpi: varpi.coeffs().get(n).copied().unwrap_or(0.0),
                phi: phi.coeffs()[n],
                delta2n: delta_moment(table, 2 * n, &phi)?,
            })
        })
        .collect()
}

/// CSV with header `n,varpi,phi,delta2n`; floats in shortest round-trip form.
pub fn write_coefficients_csv<W: Write>(mut out: W, rows: &[CoeffRow]) -> Result<()> {
    writeln!(out, "n,varpi,phi,delta2n")?;
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:e}", r.n, r.varpi, r.phi, r.delta2n)?;
    }
    Ok(())
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
