//! Euler–Maclaurin summation for `zeta(s)`, used as an independent oracle
//! for the Riemann–Siegel evaluation and for `Z(t)` at low heights.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::theta::{theta_loggamma, theta_unchecked, THETA_MIN_T};

/// Height range accepted by [`zeta_em`].
pub const EM_RANGE: (f64, f64) = (10.0, 1e5);

// B_2k / (2k)!.
const BERNOULLI_OVER_FACT: [f64; 15] = [
    8.333_333_333_333_333_3e-2,
    -1.388_888_888_888_888_9e-3,
    3.306_878_306_878_306_9e-5,
    -8.267_195_767_195_767_2e-7,
    2.087_675_698_786_809_9e-8,
    -5.284_190_138_687_493_2e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_9e-13,
    8.586_062_056_277_844_6e-15,
    -2.174_868_698_558_061_9e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_3e-19,
    3.534_707_039_629_467_5e-21,
    -8.953_517_427_037_546_9e-23,
    2.267_952_452_337_683_1e-24,
];

/// `zeta(s)` for any `s != 1` by Euler–Maclaurin with
/// `N = max(ceil(2|Im s|/pi) + 10, 20)` terms and 15 Bernoulli corrections.
pub fn zeta_em_general(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || (s - 1.0).norm() == 0.0 {
        return Err(Error::Domain(format!("zeta_em needs finite s != 1, got {s}")));
    }
    let n = ((2.0 * s.im.abs() / std::f64::consts::PI).ceil() as usize + 10).max(20);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += Complex64::new(k as f64, 0.0).powc(-s);
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    // Rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut pow = n_pow / nf;
    for (k, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += rising * pow * *b;
        let j = (2 * k + 1) as f64;
        rising *= (s + j) * (s + j + 1.0);
        pow /= nf * nf;
    }
    Ok(sum)
}

/// `zeta(1/2 + it)` for `10 <= t <= 1e5`.
pub fn zeta_em(t: f64) -> Result<Complex64> {
    if !(t >= EM_RANGE.0 && t <= EM_RANGE.1) {
        return Err(Error::InvalidRange(format!(
            "zeta_em oracle covers {} <= t <= {}, got {t}",
            EM_RANGE.0, EM_RANGE.1
        )));
    }
    zeta_em_general(Complex64::new(0.5, t))
}

/// `Z(t) = Re(e^{i theta(t)} zeta(1/2 + it))` from the Euler–Maclaurin
/// oracle, for `0 < t <= 1e5`.
pub fn hardy_z_em(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= EM_RANGE.1) {
        return Err(Error::InvalidRange(format!("hardy_z_em covers 0 < t <= {}, got {t}", EM_RANGE.1)));
    }
    let th = if t >= THETA_MIN_T { theta_unchecked(t) } else { theta_loggamma(t)? };
    let z = zeta_em_general(Complex64::new(0.5, t))?;
    Ok((Complex64::from_polar(1.0, th) * z).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zeta_at_one_half() {
        let z = zeta_em_general(Complex64::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(z.re, -1.460_354_508_809_586_8, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zeta_on_the_line() {
        let z = zeta_em(30.0).unwrap();
        assert_abs_diff_eq!(z.re, -0.120_642_287_590_043_7, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, -0.583_691_214_763_706_3, epsilon = 1e-12);
        assert!(zeta_em(9.0).is_err());
        assert!(zeta_em(2e5).is_err());
    }

    #[test]
    fn first_zero() {
        assert!(zeta_em(14.134_725_141_734_693).unwrap().norm() < 1e-12);
    }

    #[test]
    fn rejects_pole() {
        assert!(zeta_em_general(Complex64::new(1.0, 0.0)).is_err());
    }
}
