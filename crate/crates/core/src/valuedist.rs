//! Hermite expansions for the distribution of `V_y` and the Gaussian law for
//! normalized `S`, with empirical-against-analytic comparison reports.
//!
//! All analytic values are per unit length of the window.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dirichlet::{sign_measure, GridFunction};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::series::PowerSeries;
use crate::specfun::{gauss_hermite_sign_integral, hermite, normal_cdf};
use crate::zetaline::SWindowStats;

/// Constant in the admissible range `y <= exp(log H / (c log log H))`.
pub const Y_RANGE_C: f64 = 1.4e4;

/// Default multiplier on the error budget used by acceptance checks; the
/// budgets carry unknown absolute constants.
pub const DEFAULT_ALLOWANCE: f64 = 10.0;

/// Exponent `27/82` in the short-window condition `T^{27/82} < H <= T`.
pub const SHORT_WINDOW_EXPONENT: f64 = 27.0 / 82.0;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub y: u64,
    pub sigma: f64,
    pub nu: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    /// Approximation scale of the sign function; diagnostic only.
    pub omega: Option<f64>,
    /// `alpha sqrt(2/sigma)`.
    pub a: f64,
    /// `beta sqrt(2/sigma)`.
    pub b: Option<f64>,
}

impl ExpansionParams {
    pub fn new(table: &PrimeTable, nu: usize, alpha: f64, beta: Option<f64>) -> Result<Self> {
        Self::from_sigma(table.limit(), table.sigma(), nu, alpha, beta)
    }

    pub fn from_sigma(y: u64, sigma: f64, nu: usize, alpha: f64, beta: Option<f64>) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if !alpha.is_finite() || beta.is_some_and(|b| !b.is_finite()) {
            return Err(Error::Domain("levels must be finite".into()));
        }
        if let Some(b) = beta {
            if !(alpha < b) {
                return Err(Error::Domain(format!("segment needs alpha < beta, got ({alpha}, {b})")));
            }
        }
        let scale = (2.0 / sigma).sqrt();
        Ok(Self {
            y,
            sigma,
            nu,
            alpha,
            beta,
            omega: None,
            a: alpha * scale,
            b: beta.map(|b| b * scale),
        })
    }

    /// `0 <= nu <= exp((log y)^{1/4})`.
    pub fn nu_admissible(&self) -> bool {
        (self.nu as f64) <= ((self.y as f64).ln().powf(0.25)).exp()
    }
}

/// `2 < y <= exp(log H / (c log log H))` with `c = 1.4e4`.
pub fn y_admissible(y: u64, h: f64) -> bool {
    let llh = h.ln().ln();
    if !(llh > 0.0) {
        return false;
    }
    y > 2 && (y as f64).ln() <= h.ln() / (Y_RANGE_C * llh)
}

fn check_order(phi: &PowerSeries, nu: usize) -> Result<()> {
    if phi.order() < nu {
        return Err(Error::InsufficientOrder {
            needed: nu,
            available: phi.order(),
        });
    }
    Ok(())
}

/// `Phi_n / (2 sigma)^n` for `n <= nu`.
fn weights(phi: &PowerSeries, sigma: f64, nu: usize) -> Vec<f64> {
    let mut scale = 1.0;
    (0..=nu)
        .map(|n| {
            let w = phi.coeffs()[n] * scale;
            scale /= 2.0 * sigma;
            w
        })
        .collect()
}

/// Expansion of `(1/H) int sgn(V_y - alpha)`:
/// `sum_{n<=nu} Phi_n/(2 sigma)^n int e^{-u^2/2} H_2n(u) sgn(u - a) du / sqrt(2 pi)`.
pub fn sign_expansion(params: &ExpansionParams, phi: &PowerSeries) -> Result<f64> {
    sign_expansion_at(params.a, params.sigma, params.nu, phi)
}

fn sign_expansion_at(a: f64, sigma: f64, nu: usize, phi: &PowerSeries) -> Result<f64> {
    check_order(phi, nu)?;
    let mut sum = 0.0;
    for (n, w) in weights(phi, sigma, nu).into_iter().enumerate() {
        sum += w * gauss_hermite_sign_integral(n, a)?;
    }
    Ok(sum / SQRT_2PI)
}

/// Which evaluation of the segment expansion to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentPath {
    /// `chi_{a,b} = (sgn(b - u) + sgn(u - a)) / 2` applied to the sign
    /// expansion.
    SignIdentity,
    /// `int_a^b H_2n e^{-u^2/2} = H_{2n-1}(a) e^{-a^2/2} - H_{2n-1}(b) e^{-b^2/2}`.
    ClosedForm,
}

/// Expansion of `(1/H) mes{alpha <= V_y <= beta}`, with the same weights
/// `Phi_n / (2 sigma)^n` as in [`sign_expansion`].
pub fn segment_expansion(params: &ExpansionParams, phi: &PowerSeries, path: SegmentPath) -> Result<f64> {
    let b = params
        .b
        .ok_or_else(|| Error::Domain("segment expansion needs an upper level beta".into()))?;
    segment_expansion_at(params.a, b, params.sigma, params.nu, phi, path)
}

fn segment_expansion_at(a: f64, b: f64, sigma: f64, nu: usize, phi: &PowerSeries, path: SegmentPath) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Domain(format!("segment needs a < b, got ({a}, {b})")));
    }
    check_order(phi, nu)?;
    match path {
        SegmentPath::SignIdentity => {
            Ok(0.5 * (sign_expansion_at(a, sigma, nu, phi)? - sign_expansion_at(b, sigma, nu, phi)?))
        }
        SegmentPath::ClosedForm => {
            let (ea, eb) = ((-0.5 * a * a).exp(), (-0.5 * b * b).exp());
            let mut sum = 0.0;
            for (n, w) in weights(phi, sigma, nu).into_iter().enumerate() {
                let piece = if n == 0 {
                    SQRT_2PI * (normal_cdf(b) - normal_cdf(a))
                } else {
                    hermite(2 * n - 1, a)? * ea - hermite(2 * n - 1, b)? * eb
                };
                sum += w * piece;
            }
            Ok(sum / SQRT_2PI)
        }
    }
}

/// Both evaluations of [`segment_expansion`]; they must agree to `1e-10`.
pub fn segment_expansion_checked(params: &ExpansionParams, phi: &PowerSeries) -> Result<f64> {
    let x = segment_expansion(params, phi, SegmentPath::SignIdentity)?;
    let z = segment_expansion(params, phi, SegmentPath::ClosedForm)?;
    if (x - z).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "segment expansion paths disagree: {x} vs {z}"
        )));
    }
    Ok(z)
}

/// Three-term error budget
/// `(log y)^{-1/2} / log log y + (log y / log H)^{1/2}
///  + ((log log (nu+2) + 1) / sigma)^{nu+1} / (nu+1)`.
pub fn delta_budget(y: u64, h: f64, nu: usize, sigma: f64) -> Result<f64> {
    if y < 3 || !(h > 1.0) || !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "error budget needs y >= 3, H > 1, sigma > 0; got y = {y}, H = {h}, sigma = {sigma}"
        )));
    }
    let [t1, t2, t3] = delta_terms(y, h, nu, sigma);
    Ok(t1 + t2 + t3)
}

/// The three summands of [`delta_budget`], in order.
pub fn delta_terms(y: u64, h: f64, nu: usize, sigma: f64) -> [f64; 3] {
    let ly = (y as f64).ln();
    let k = (nu + 1) as f64;
    let base = (((nu + 2) as f64).ln().ln() + 1.0) / sigma;
    [ly.powf(-0.5) / ly.ln(), (ly / h.ln()).sqrt(), base.powf(k) / k]
}

/// `Phi(b) - Phi(a)` for the standard normal `Phi`.
pub fn gaussian_mass(a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Domain(format!("gaussian mass needs a < b, got ({a}, {b})")));
    }
    Ok(normal_cdf(b) - normal_cdf(a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub y: u64,
    pub nu: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub empirical: f64,
    pub analytic: f64,
    pub delta_budget: f64,
    /// Window condition on `y` (or on `H` for the law of `S`).
    pub hypothesis_range: bool,
    /// `nu <= exp((log y)^{1/4})`; always true for the law of `S`.
    pub hypothesis_nu: bool,
    pub hypothesis_ok: bool,
    /// `|empirical - analytic| / delta_budget`.
    pub ratio: f64,
    pub allowance: f64,
    pub within_allowance: bool,
    /// Gaussian mass with levels rescaled by `1 + delta`, delta from the
    /// iterated-logarithm correction between `sigma` and `log log T`.
    pub rescaled_analytic: Option<f64>,
    pub rescale_delta: Option<f64>,
    pub ks_distance: Option<f64>,
}

impl MeasureReport {
    pub fn difference(&self) -> f64 {
        self.empirical - self.analytic
    }
}

fn finish(mut r: MeasureReport) -> MeasureReport {
    r.ratio = (r.empirical - r.analytic).abs() / r.delta_budget;
    r.within_allowance = r.ratio <= r.allowance;
    r.hypothesis_ok = r.hypothesis_range && r.hypothesis_nu;
    r
}

/// Empirical `(1/H) int sgn(V_y - alpha)` on a `V_y` grid against
/// [`sign_expansion`].
pub fn compare_sign_expansion(
    table: &PrimeTable,
    grid: &GridFunction,
    params: &ExpansionParams,
    phi: &PowerSeries,
    allowance: f64,
) -> Result<MeasureReport> {
    let h = grid.h();
    let empirical = sign_measure(table, grid, params.alpha) / h;
    let analytic = sign_expansion(params, phi)?;
    let delta = delta_budget(params.y, h, params.nu, params.sigma)?;
    Ok(finish(MeasureReport {
        t: grid.t0,
        h,
        y: params.y,
        nu: params.nu,
        alpha: params.alpha,
        beta: None,
        empirical,
        analytic,
        delta_budget: delta,
        hypothesis_range: y_admissible(params.y, h),
        hypothesis_nu: params.nu_admissible(),
        hypothesis_ok: false,
        ratio: 0.0,
        allowance,
        within_allowance: false,
        rescaled_analytic: None,
        rescale_delta: None,
        ks_distance: None,
    }))
}

/// `log_k T` iterated `k` times, `None` once it stops being positive.
fn iterated_log(t: f64, k: usize) -> Option<f64> {
    let mut v = t;
    for _ in 0..k {
        if !(v > 0.0) {
            return None;
        }
        v = v.ln();
    }
    Some(v)
}

/// `log_4 T / (2 log_2 T)`.
pub fn rescale_delta(t: f64) -> Option<f64> {
    let l2 = iterated_log(t, 2)?;
    let l4 = iterated_log(t, 4)?;
    (l2 > 0.0).then(|| l4 / (2.0 * l2))
}

/// Error scale `log_3 T / sqrt(log_2 T) / sqrt(2 pi)` of the Gaussian law
/// for normalized `S` (the free `1/eps` factor taken as 1).
pub fn gaussian_law_budget(t: f64) -> Option<f64> {
    let l2 = iterated_log(t, 2)?;
    let l3 = iterated_log(t, 3)?;
    (l2 > 0.0 && l3 > 0.0).then(|| l3 / l2.sqrt() / SQRT_2PI)
}

/// Histogram mass of `pi sqrt 2 S / sqrt(log log T)` on `(a, b]` against
/// [`gaussian_mass`], plus the Kolmogorov–Smirnov distance and the rescaled
/// mass `Phi(b (1+delta)) - Phi(a (1+delta))`.
pub fn compare_gaussian_law(stats: &SWindowStats, a: f64, b: f64, allowance: f64) -> Result<MeasureReport> {
    let analytic = gaussian_mass(a, b)?;
    let empirical = stats.mass_between(a, b);
    let delta = gaussian_law_budget(stats.t).ok_or_else(|| {
        Error::InvalidRange(format!("iterated logarithms need T > e^e, got {}", stats.t))
    })?;
    let rd = rescale_delta(stats.t);
    let rescaled = rd.map(|d| normal_cdf(b * (1.0 + d)) - normal_cdf(a * (1.0 + d)));
    let window = stats.h <= stats.t && stats.h > stats.t.powf(SHORT_WINDOW_EXPONENT);
    Ok(finish(MeasureReport {
        t: stats.t,
        h: stats.h,
        y: 0,
        nu: 0,
        alpha: a,
        beta: Some(b),
        empirical,
        analytic,
        delta_budget: delta,
        hypothesis_range: window,
        hypothesis_nu: true,
        hypothesis_ok: false,
        ratio: 0.0,
        allowance,
        within_allowance: false,
        rescaled_analytic: rescaled,
        rescale_delta: rd,
        ks_distance: Some(stats.ks_distance()),
    }))
}

/// Aggregate CSV `T,H,y,nu,alpha,empirical,analytic,delta,hypothesis_ok`.
pub fn write_reports_csv<W: Write>(mut out: W, reports: &[MeasureReport]) -> Result<()> {
    writeln!(out, "T,H,y,nu,alpha,empirical,analytic,delta,hypothesis_ok")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{:e},{}",
            r.t, r.h, r.y, r.nu, r.alpha, r.empirical, r.analytic, r.delta_budget, r.hypothesis_ok
        )?;
    }
    Ok(())
}

/// Bound `sqrt(2 pi) (log log n + 1)^n / n! / (2 sigma)^n * sqrt(2 pi (2n)!)`
/// on the size of the `n`-th expansion term, `n >= 2`.
pub fn term_envelope(n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    let ln_fact = |k: usize| (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
    let log = SQRT_2PI.ln() + nf * (nf.ln().ln() + 1.0).ln() - ln_fact(n) - nf * (2.0 * sigma).ln()
        + 0.5 * ((2.0 * PI).ln() + ln_fact(2 * n));
    log.exp()
}
