//! Fast invariant suite behind `argdist selftest`. The log is a pure function
//! of the code: fixed inputs, fixed formatting, no timings.

use std::f64::consts::PI;

use crate::dirichlet::{
    char_function_report, moment_integral, sign_measure, v_grid, v_grid_chunked, GridFunction,
};
use crate::error::Result;
use crate::primes::sieve;
use crate::quad::{integrate, QuadOptions};
use crate::series::{delta_moment, g_deriv0, g_eval, g_taylor_truncation, phi_series, varpi_series};
use crate::signapprox::{f_omega, fejer_k, sgn};
use crate::specfun::{gauss_hermite_sign_integral, hermite, hermite_explicit};
use crate::valuedist::{
    compare_sign_expansion, delta_budget, segment_expansion, ExpansionParams, SegmentPath, DEFAULT_ALLOWANCE,
};
use crate::zetaline::{count_zeros, count_zeros_with, s_of_t, ZeroScanOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelftestLog {
    pub checks: Vec<CheckLine>,
}

impl SelftestLog {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(if c.pass { "PASS " } else { "FAIL " });
            out.push_str(c.name);
            out.push_str(": ");
            out.push_str(&c.detail);
            out.push('\n');
        }
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            self.failures()
        ));
        out
    }

    fn push(&mut self, name: &'static str, outcome: Result<(bool, String)>) {
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(CheckLine { name, pass, detail });
    }
}

pub fn run() -> SelftestLog {
    let mut log = SelftestLog::default();
    log.push("varpi exact values", varpi_values());
    log.push("varpi factorial bound", varpi_bound());
    log.push("phi low orders", phi_low());
    log.push("G derivatives", g_derivs());
    log.push("hermite recurrence", hermite_forms());
    log.push("hermite sign integral", sign_integral());
    log.push("taylor truncation", truncation());
    log.push("sign approximant", approximant());
    log.push("prime sum moments", moments());
    log.push("characteristic function", charfn());
    log.push("sign expansion", sign_expansion_check());
    log.push("segment paths", segment_paths());
    log.push("zero anchors", zero_anchors());
    log.push("S jumps", s_jumps());
    log.push("parallel determinism", determinism());
    log
}

fn fmt(x: f64) -> String {
    format!("{x:.6e}")
}

fn varpi_values() -> Result<(bool, String)> {
    let w = varpi_series(4)?;
    let c = w.coeffs();
    let err = [(c[2], -0.25), (c[3], 1.0 / 9.0), (c[4], -5.0 / 192.0)]
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok((err <= 1e-14 && c[0] == 1.0 && c[1] == 0.0, format!("max error {}", fmt(err))))
}

fn varpi_bound() -> Result<(bool, String)> {
    let w = varpi_series(100)?;
    let mut inv_fact = 1.0;
    let mut worst = 0.0f64;
    for (n, c) in w.coeffs().iter().enumerate() {
        if n == 0 {
            // varpi_0 = 1 = 1/0!: the bound is an equality here.
            continue;
        }
        inv_fact /= n as f64;
        worst = worst.max(c.abs() / inv_fact);
    }
    Ok((worst < 1.0 && w.coeffs()[0] == 1.0, format!("max |varpi_n| n! = {}", fmt(worst))))
}

fn phi_low() -> Result<(bool, String)> {
    let t = sieve(10)?;
    let phi = phi_series(&t, 4)?;
    let s2 = t.sigma_k(2);
    let s4 = t.sigma_k(4);
    let e1 = phi.coeffs()[1].abs();
    let e2 = (phi.coeffs()[2] + s2 / 4.0).abs();
    let e4 = (phi.coeffs()[4] - (-11.0 / 192.0 * s4 + s2 * s2 / 32.0)).abs();
    let err = e1.max(e2).max(e4);
    Ok((err <= 1e-12, format!("phi_2 = {}, max error {}", fmt(phi.coeffs()[2]), fmt(err))))
}

fn g_derivs() -> Result<(bool, String)> {
    let t = sieve(1000)?;
    let phi = phi_series(&t, 20)?;
    let s = t.sigma();
    let mut ok = true;
    for k in 0..=20 {
        let g = g_deriv0(&t, k, &phi)?;
        ok &= g > 0.0 && g <= s.powi(k as i32) * (1.0 + 1e-12);
    }
    let d2 = delta_moment(&t, 2, &phi)?;
    ok &= (d2 - s / 2.0).abs() <= 1e-12 * s;
    Ok((ok, format!("sigma = {}, delta_2 = {}", fmt(s), fmt(d2))))
}

fn hermite_forms() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 0..=10 {
        for x in [-3.0, -0.7, 0.0, 1.3, 2.5] {
            let a = hermite(n, x)?;
            let b = hermite_explicit(n, x);
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok((worst <= 1e-12, format!("max relative gap {}", fmt(worst))))
}

fn sign_integral() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let opts = QuadOptions::default();
    for n in 0..=5 {
        for c in [-2.0, 0.0, 1.5] {
            let f = |u: f64| (-0.5 * u * u).exp() * hermite(2 * n, u).unwrap_or(f64::NAN) * sgn(u - c);
            let q = integrate(f, -14.0, c, opts)?.value + integrate(f, c, 14.0, opts)?.value;
            worst = worst.max((q - gauss_hermite_sign_integral(n, c)?).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max gap to quadrature {}", fmt(worst))))
}

fn truncation() -> Result<(bool, String)> {
    let t = sieve(1000)?;
    let phi = phi_series(&t, 6)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in [1, 2, 3, 6] {
        for u in [0.25, 0.5, 1.0] {
            let tr = g_taylor_truncation(&t, &phi, u, n)?;
            let gap = (g_eval(&t, u)? - tr.value).abs();
            ok &= gap <= tr.remainder_bound;
            worst = worst.max(gap / tr.remainder_bound);
        }
    }
    Ok((ok, format!("max gap / bound = {}", fmt(worst))))
}

fn approximant() -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for omega in [1.0, 5.0] {
        for k in -50..=50 {
            if k == 0 {
                continue;
            }
            let u = 0.2 * k as f64;
            let excess = (sgn(u) - f_omega(u, omega)?).abs() - fejer_k(omega * u);
            worst = worst.max(excess);
        }
    }
    Ok((worst <= 1e-6, format!("max excess over K = {}", fmt(worst))))
}

fn small_grid() -> Result<(crate::primes::PrimeTable, GridFunction)> {
    let t = sieve(10)?;
    let g = v_grid(&t, 1e4, 2e3, 0.01)?;
    Ok((t, g))
}

fn moments() -> Result<(bool, String)> {
    let (t, g) = small_grid()?;
    let i2 = moment_integral(&g, 2)?.value / g.h();
    let want = t.sigma() / 2.0;
    let rel = (i2 - want).abs() / want;
    Ok((rel <= 0.05, format!("I_2/H = {}, sigma/2 = {}", fmt(i2), fmt(want))))
}

fn charfn() -> Result<(bool, String)> {
    let (t, g) = small_grid()?;
    let r = char_function_report(&t, &g, 0.25, None)?;
    let ok = r.deviation() <= r.remainder + r.quad_budget;
    Ok((ok, format!("|J - H G| = {}, N = {}", fmt(r.deviation()), r.n)))
}

fn sign_expansion_check() -> Result<(bool, String)> {
    let (t, g) = small_grid()?;
    let phi = phi_series(&t, 3)?;
    let p = ExpansionParams::new(&t, 3, 0.3, None)?;
    let r = compare_sign_expansion(&t, &g, &p, &phi, DEFAULT_ALLOWANCE)?;
    let half = sign_measure(&t, &g, 0.0) / g.h();
    let ok = r.within_allowance && !r.hypothesis_ok && r.delta_budget == delta_budget(10, g.h(), 3, t.sigma())?;
    Ok((
        ok,
        format!(
            "empirical {}, analytic {}, ratio {}, alpha=0 measure {}",
            fmt(r.empirical),
            fmt(r.analytic),
            fmt(r.ratio),
            fmt(half)
        ),
    ))
}

fn segment_paths() -> Result<(bool, String)> {
    let t = sieve(1000)?;
    let phi = phi_series(&t, 5)?;
    let mut worst = 0.0f64;
    for (a, b) in [(-1.0, 1.0), (-0.3, 2.2), (0.5, 0.6)] {
        let p = ExpansionParams::new(&t, 5, a, Some(b))?;
        let x = segment_expansion(&p, &phi, SegmentPath::SignIdentity)?;
        let y = segment_expansion(&p, &phi, SegmentPath::ClosedForm)?;
        worst = worst.max((x - y).abs());
    }
    Ok((worst <= 1e-10, format!("max path gap {}", fmt(worst))))
}

fn zero_anchors() -> Result<(bool, String)> {
    let c = count_zeros(100.0, 0.05)?;
    let want = [14.134_725, 21.022_040, 25.010_858];
    let err = c
        .gammas
        .iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0f64, f64::max);
    let ok = c.len() == 29 && err <= 1e-5 && c.warnings.is_empty();
    Ok((ok, format!("N(100) = {}, gamma_1 = {:.9}", c.len(), c.gammas[0])))
}

fn s_jumps() -> Result<(bool, String)> {
    let c = count_zeros(1000.0, 0.05)?;
    let mut worst = 0.0f64;
    for &g in &c.gammas {
        let jump = s_of_t(&c, g + 1e-7)? - s_of_t(&c, g - 1e-7)?;
        worst = worst.max((jump - 1.0).abs());
    }
    let slope = (s_of_t(&c, 100.3)? - s_of_t(&c, 100.2)?) / 0.1;
    let want = -(100.25 / (2.0 * PI)).ln() / (2.0 * PI);
    let ok = worst <= 0.02 && ((slope - want) / want).abs() <= 0.05;
    Ok((ok, format!("{} zeros, max |jump - 1| = {}", c.len(), fmt(worst))))
}

fn determinism() -> Result<(bool, String)> {
    let t = sieve(100)?;
    let a = v_grid_chunked(&t, 5e3, 500.0, 0.01, Some(0))?;
    let b = v_grid_chunked(&t, 5e3, 500.0, 0.01, None)?;
    let grids = a.samples.iter().zip(&b.samples).all(|(x, y)| x.to_bits() == y.to_bits());
    let o1 = ZeroScanOptions {
        chunk_blocks: 1,
        ..ZeroScanOptions::default()
    };
    let o2 = ZeroScanOptions {
        chunk_blocks: 64,
        ..ZeroScanOptions::default()
    };
    let z1 = count_zeros_with(2000.0, o1)?;
    let z2 = count_zeros_with(2000.0, o2)?;
    let zeros = z1.gammas.iter().zip(&z2.gammas).all(|(x, y)| x.to_bits() == y.to_bits())
        && z1.len() == z2.len();
    Ok((grids && zeros, format!("grid bitwise {grids}, zeros bitwise {zeros}")))
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes_and_repeats() {
        let a = super::run();
        assert_eq!(a.failures(), 0, "{}", a.render());
        assert_eq!(a.render(), super::run().render());
    }
}
