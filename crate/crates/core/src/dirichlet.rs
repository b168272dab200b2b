//! The prime sum `V_y(t) = sum_{p <= y} sin(t log p) / sqrt p` on uniform
//! grids, and the window integrals built from it.
//!
//! Every sample is computed independently from its index, so a parallel
//! grid equals the serial one bit for bit. Reductions always run serially in
//! index order.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::quad::{uniform_integral, GridRule};
use crate::series::g_eval;

/// Uniform samples of a real function on `[t0, t0 + h]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || samples.len() < 2 {
            return Err(Error::InvalidRange(format!(
                "grid needs dt > 0 and at least 2 samples (dt = {dt}, len = {})",
                samples.len()
            )));
        }
        Ok(Self { t0, dt, samples })
    }

    /// Window length `dt * (len - 1)`.
    pub fn h(&self) -> f64 {
        self.dt * (self.samples.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Composite integral of the samples.
    pub fn integral(&self) -> (f64, GridRule) {
        uniform_integral(&self.samples, self.dt)
    }

    /// CSV with header `t,V`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,V")?;
        for (k, v) in self.samples.iter().enumerate() {
            writeln!(out, "{},{:e}", self.t(k), v)?;
        }
        Ok(())
    }
}

/// `V_y` with `log p` and `p^{-1/2}` precomputed.
#[derive(Debug, Clone)]
pub struct PrimeSum {
    y: u64,
    logs: Vec<f64>,
    weights: Vec<f64>,
}

impl PrimeSum {
    pub fn new(table: &PrimeTable) -> Self {
        Self {
            y: table.limit(),
            logs: table.primes().iter().map(|&p| (p as f64).ln()).collect(),
            weights: table.primes().iter().map(|&p| 1.0 / (p as f64).sqrt()).collect(),
        }
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.logs
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * (t * l).sin())
            .sum()
    }
}

/// `V_y(t)`, summed over ascending primes.
pub fn v_eval(table: &PrimeTable, t: f64) -> f64 {
    PrimeSum::new(table).eval(t)
}

/// Largest step allowed by the sampling contract `dt log y <= 1/2`.
pub fn max_dt(y: u64) -> f64 {
    0.5 / (y as f64).ln()
}

/// Number of intervals and adjusted step for a window: `ceil(H/dt)` rounded
/// up to even (so Simpson applies), `dt' = H / intervals <= dt`.
pub fn grid_layout(h: f64, dt: f64) -> (usize, f64) {
    let mut n = (h / dt).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let n = n.max(2);
    (n, h / n as f64)
}

/// Samples `V_y` on `[T, T + H]`, serial-equivalent parallel evaluation.
pub fn v_grid(table: &PrimeTable, t0: f64, h: f64, dt: f64) -> Result<GridFunction> {
    v_grid_chunked(table, t0, h, dt, None)
}

/// As [`v_grid`] with an explicit chunk length for the parallel split;
/// `Some(0)` forces a serial loop. The result does not depend on the choice.
pub fn v_grid_chunked(
    table: &PrimeTable,
    t0: f64,
    h: f64,
    dt: f64,
    chunk: Option<usize>,
) -> Result<GridFunction> {
    if !(h > 1.0) || !t0.is_finite() || !h.is_finite() {
        return Err(Error::InvalidRange(format!("window needs H > 1, got T = {t0}, H = {h}")));
    }
    let bound = max_dt(table.limit());
    if !(dt > 0.0) || dt > bound {
        return Err(Error::Sampling { dt, max_dt: bound });
    }
    let (n, step) = grid_layout(h, dt);
    let sum = PrimeSum::new(table);
    let at = |k: usize| sum.eval(t0 + k as f64 * step);
    let samples: Vec<f64> = match chunk {
        Some(0) => (0..=n).map(at).collect(),
        Some(c) => (0..n + 1)
            .into_par_iter()
            .with_min_len(c)
            .with_max_len(c)
            .map(at)
            .collect(),
        None => (0..n + 1).into_par_iter().with_min_len(1024).map(at).collect(),
    };
    GridFunction::new(t0, step, samples)
}

/// `int V^n dt` over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentIntegral {
    pub n: u32,
    pub value: f64,
    pub rule: GridRule,
}

pub fn moment_integral(grid: &GridFunction, n: u32) -> Result<MomentIntegral> {
    if n == 0 {
        return Err(Error::Domain("moment order must be >= 1".into()));
    }
    let powered: Vec<f64> = grid.samples.iter().map(|v| v.powi(n as i32)).collect();
    if powered.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("V^{n} overflows on the grid")));
    }
    let (value, rule) = uniform_integral(&powered, grid.dt);
    Ok(MomentIntegral { n, value, rule })
}

/// Error budget `(n y / 2)^{n/2}` of the moment asymptotics.
pub fn moment_error_budget(n: u32, y: u64) -> f64 {
    (0.5 * n as f64 * y as f64).powf(0.5 * n as f64)
}

/// `J(z) = int exp(2 pi i z V(t)) dt` by the grid rule.
pub fn char_function_integral(grid: &GridFunction, z: f64) -> Result<Complex64> {
    Ok(char_function_parts(grid, z)?.0)
}

fn char_function_parts(grid: &GridFunction, z: f64) -> Result<(Complex64, f64)> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    let w = 2.0 * std::f64::consts::PI * z;
    let re: Vec<f64> = grid.samples.iter().map(|v| (w * v).cos()).collect();
    let im: Vec<f64> = grid.samples.iter().map(|v| (w * v).sin()).collect();
    let (a, _) = uniform_integral(&re, grid.dt);
    let (b, _) = uniform_integral(&im, grid.dt);
    // Disagreement between the composite rules bounds the quadrature error.
    let (ta, _) = trapezoid(&re, grid.dt);
    let (tb, _) = trapezoid(&im, grid.dt);
    let budget = ((a - ta).powi(2) + (b - tb).powi(2)).sqrt();
    Ok((Complex64::new(a, b), budget))
}

fn trapezoid(samples: &[f64], dt: f64) -> (f64, GridRule) {
    let n = samples.len();
    let inner: f64 = samples[1..n - 1].iter().sum();
    ((inner + 0.5 * (samples[0] + samples[n - 1])) * dt, GridRule::Trapezoid)
}

/// Smallest even `N >= 8 sigma e pi^2 (z^2 + 1)`.
pub fn default_expansion_order(sigma: f64, z: f64) -> usize {
    let need = 8.0 * sigma * std::f64::consts::E * std::f64::consts::PI.powi(2) * (z * z + 1.0);
    let n = need.ceil() as usize;
    n + n % 2
}

/// Empirical `J(z)` against `H G(-(pi z)^2)` with the remainder `r(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharFnReport {
    pub z: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub analytic: f64,
    pub n: usize,
    /// `sigma e pi^2 (z^2 + 1) / N <= 1/8`.
    pub hypothesis_ok: bool,
    pub remainder: f64,
    pub quad_budget: f64,
}

impl CharFnReport {
    pub fn deviation(&self) -> f64 {
        Complex64::new(self.empirical_re - self.analytic, self.empirical_im).norm()
    }
}

/// `r(z) = |z| (H 2^{-N} / sqrt N + y^{N/2} e^{e (pi z)^2})`, in floating
/// point (may be `inf`).
pub fn char_remainder(z: f64, h: f64, y: u64, n: usize) -> f64 {
    let nf = n as f64;
    let first = h * (-nf * std::f64::consts::LN_2).exp() / nf.sqrt();
    let second = (0.5 * nf * (y as f64).ln()
        + std::f64::consts::E * (std::f64::consts::PI * z).powi(2))
    .exp();
    z.abs() * (first + second)
}

pub fn char_function_report(
    table: &PrimeTable,
    grid: &GridFunction,
    z: f64,
    n: Option<usize>,
) -> Result<CharFnReport> {
    let (j, quad_budget) = char_function_parts(grid, z)?;
    let sigma = table.sigma();
    let n = n.unwrap_or_else(|| default_expansion_order(sigma, z));
    if n == 0 {
        return Err(Error::Domain("expansion order N must be positive".into()));
    }
    let ratio = sigma * std::f64::consts::E * std::f64::consts::PI.powi(2) * (z * z + 1.0) / n as f64;
    let analytic = grid.h() * g_eval(table, std::f64::consts::PI * z)?;
    Ok(CharFnReport {
        z,
        empirical_re: j.re,
        empirical_im: j.im,
        analytic,
        n,
        hypothesis_ok: ratio <= 0.125,
        remainder: char_remainder(z, grid.h(), table.limit(), n),
        quad_budget,
    })
}

/// Bisection for the level crossing of `f` in `[a, b]` where `f(a) - level`
/// and `f(b) - level` have strictly opposite signs.
fn bisect_crossing<F: Fn(f64) -> f64>(f: &F, level: f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fa_pos = f(a) - level > 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m) - level;
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn sign(x: f64) -> f64 {
    crate::signapprox::sgn(x)
}

/// Step-function part of one cell for `sgn(f - alpha)`.
fn sign_cell<F: Fn(f64) -> f64>(f: &F, grid: &GridFunction, alpha: f64, k: usize) -> f64 {
    let a = grid.samples[k] - alpha;
    let b = grid.samples[k + 1] - alpha;
    let (ta, tb) = (grid.t(k), grid.t(k + 1));
    let width = tb - ta;
    match (sign(a), sign(b)) {
        (sa, sb) if sa == sb => sa * width,
        (0.0, sb) => sb * width,
        (sa, 0.0) => sa * width,
        (sa, sb) => {
            let c = bisect_crossing(f, alpha, ta, tb, 1e-6 * grid.dt);
            sa * (c - ta) + sb * (tb - c)
        }
    }
}

/// `int sgn(f(t) - alpha) dt` over the grid window, splitting each cell that
/// brackets a crossing at the bisected crossing point of the true `f`.
pub fn sign_measure_by<F>(grid: &GridFunction, alpha: f64, f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let cells: Vec<f64> = (0..grid.len() - 1)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| sign_cell(&f, grid, alpha, k))
        .collect();
    cells.iter().sum()
}

/// `int sgn(V_y(t) - alpha) dt`.
pub fn sign_measure(table: &PrimeTable, grid: &GridFunction, alpha: f64) -> f64 {
    let sum = PrimeSum::new(table);
    sign_measure_by(grid, alpha, |t| sum.eval(t))
}

fn level_cell<F: Fn(f64) -> f64>(f: &F, grid: &GridFunction, alpha: f64, beta: f64, k: usize) -> f64 {
    let (ta, tb) = (grid.t(k), grid.t(k + 1));
    let (va, vb) = (grid.samples[k], grid.samples[k + 1]);
    let inside = |v: f64| alpha <= v && v <= beta;
    let mut cuts = vec![ta];
    for level in [alpha, beta] {
        let (da, db) = (va - level, vb - level);
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            cuts.push(bisect_crossing(f, level, ta, tb, 1e-6 * grid.dt));
        }
    }
    if cuts.len() == 1 {
        // No strict crossing: an endpoint outside the band keeps the cell out.
        return if inside(va) && inside(vb) { tb - ta } else { 0.0 };
    }
    cuts.push(tb);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| {
            let mid = f(0.5 * (w[0] + w[1]));
            if inside(mid) {
                w[1] - w[0]
            } else {
                0.0
            }
        })
        .sum()
}

/// `mes{t : alpha <= f(t) <= beta}`.
pub fn level_set_measure_by<F>(grid: &GridFunction, alpha: f64, beta: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(alpha < beta) {
        return Err(Error::Domain(format!("level set needs alpha < beta, got ({alpha}, {beta})")));
    }
    let cells: Vec<f64> = (0..grid.len() - 1)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| level_cell(&f, grid, alpha, beta, k))
        .collect();
    Ok(cells.iter().sum())
}

/// `mes{t : alpha <= V_y(t) <= beta}`.
pub fn level_set_measure(table: &PrimeTable, grid: &GridFunction, alpha: f64, beta: f64) -> Result<f64> {
    let sum = PrimeSum::new(table);
    level_set_measure_by(grid, alpha, beta, |t| sum.eval(t))
}

/// JSON record of one measure comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub y: u64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub empirical: f64,
    pub analytic: f64,
    pub delta_budget: f64,
}
