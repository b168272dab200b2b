mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use argdist::zetaline::{
    count_zeros, count_zeros_with, hardy_z, hardy_z_em, joint_moment, rs_theta, s_of_t, s_window_stats, zeta_em,
    ZeroCache, ZeroScanOptions,
};
use argdist::Error;
use common::zeta_half_line;
use num_complex::Complex64;
use proptest::prelude::*;

fn cache() -> &'static ZeroCache {
    static C: OnceLock<ZeroCache> = OnceLock::new();
    C.get_or_init(|| count_zeros(6000.0, 0.05).unwrap())
}

/// Stirling series for the Riemann–Siegel theta function.
fn theta_oracle(t: f64) -> f64 {
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
        + 31.0 / (80_640.0 * t.powi(5))
}

fn z_oracle(t: f64) -> f64 {
    (Complex64::from_polar(1.0, theta_oracle(t)) * zeta_half_line(t)).re
}

fn bisect_zero(mut a: f64, mut b: f64) -> f64 {
    let fa = z_oracle(a).signum();
    while b - a > 1e-11 {
        let m = 0.5 * (a + b);
        if z_oracle(m).signum() == fa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn first_zeros_match_bisection_oracle() {
    let c = count_zeros(100.0, 0.05).unwrap();
    assert_eq!(c.len(), 29);
    assert!(c.warnings.is_empty());
    let published = [14.134_725, 21.022_040, 25.010_858];
    let brackets = [(14.0, 14.3), (20.9, 21.1), (24.9, 25.1)];
    for ((g, want), (a, b)) in c.gammas.iter().zip(published).zip(brackets) {
        let oracle = bisect_zero(a, b);
        assert!((g - oracle).abs() <= 1e-9, "{g} vs {oracle}");
        assert!((oracle - want).abs() <= 1e-5);
    }
}

#[test]
fn hardy_z_modulus_matches_zeta() {
    let mut checked = 0;
    for k in 0..50 {
        // Quasi-random samples in [20, 1e4].
        let frac = (0.5 + k as f64 * 0.618_033_988_749_895) % 1.0;
        let t = 20.0 + frac * (1e4 - 20.0);
        let zeta = zeta_half_line(t).norm();
        let z = hardy_z(t).unwrap();
        assert!((z.abs() - zeta).abs() <= 1e-6, "t = {t}: {z} vs {zeta}");
        if zeta > 0.05 {
            assert!((z.abs() / zeta - 1.0).abs() <= 1e-6, "t = {t}");
        }
        checked += 1;
    }
    assert_eq!(checked, 50);
}

#[test]
fn library_oracles_agree_with_test_oracle() {
    for t in [15.0, 99.0, 100.5, 733.0, 4321.0] {
        let a = zeta_em(t).unwrap();
        let b = zeta_half_line(t);
        assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0), "t = {t}");
        assert!((rs_theta(t).unwrap() - theta_oracle(t)).abs() <= 1e-10);
        assert!((hardy_z_em(t).unwrap() - z_oracle(t)).abs() <= 1e-9);
    }
}

#[test]
fn zero_count_matches_backlund_at_large_heights() {
    let c = cache();
    // N(t) = theta/pi + 1 + S with |S| < 1 typically; here it must be near.
    for t in [1000.0, 3000.0, 6000.0] {
        let s = s_of_t(c, t).unwrap();
        assert!(s.abs() < 2.0, "S({t}) = {s}");
    }
    assert_eq!(c.count(1000.0), 649);
    assert!(c.warnings.is_empty());
    assert!(c.gammas.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn s_jumps_by_one_at_zeros() {
    let c = cache();
    for &g in c.gammas.iter().step_by(37) {
        let jump = s_of_t(c, g + 1e-9).unwrap() - s_of_t(c, g - 1e-9).unwrap();
        assert!((jump - 1.0).abs() < 1e-6, "gamma = {g}");
    }
}

#[test]
fn out_of_range_requests_fail() {
    assert!(matches!(count_zeros(5.0, 0.05), Err(Error::InvalidRange(_))));
    assert!(s_of_t(cache(), 9.0).is_err());
    assert!(s_of_t(cache(), 1e5).is_err());
    assert!(hardy_z(5.0).is_err());
}

#[test]
fn coarse_grid_is_flagged() {
    let c = count_zeros(200.0, 0.5).unwrap();
    assert!(!c.warnings.is_empty());
}

#[test]
fn extension_and_file_round_trip_match_fresh_scan() {
    let dir = std::env::temp_dir().join(format!("argdist-zeros-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z.txt");
    let mut c = count_zeros(1500.0, 0.05).unwrap();
    c.save(&path).unwrap();
    let from = c.len();
    c.extend_to(3000.0, ZeroScanOptions::default()).unwrap();
    c.append(&path, from).unwrap();
    let loaded = ZeroCache::load(&path).unwrap();
    let fresh = cache().truncated(3000.0);
    assert_eq!(loaded.gammas.len(), fresh.gammas.len());
    assert!(loaded.gammas.iter().zip(&fresh.gammas).all(|(a, b)| a.to_bits() == b.to_bits()));
    let bad = ZeroScanOptions { dt: 0.02, ..ZeroScanOptions::default() };
    assert!(c.extend_to(4000.0, bad).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_is_independent_of_chunking_and_threads() {
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| count_zeros_with(3000.0, ZeroScanOptions { chunk_blocks: 3, ..ZeroScanOptions::default() }))
        .unwrap();
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| count_zeros(3000.0, 0.05))
        .unwrap();
    assert_eq!(serial.gammas.len(), parallel.gammas.len());
    assert!(serial.gammas.iter().zip(&parallel.gammas).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn window_statistics_are_consistent() {
    let c = cache();
    let st = s_window_stats(c, 2000.0, 2000.0, 0.01).unwrap();
    assert!((st.positive_measure + st.negative_measure - st.h).abs() < 1e-6);
    let frac = st.positive_measure / st.h;
    assert!((0.4..=0.6).contains(&frac), "positive fraction {frac}");
    assert!(st.mean.abs() < 0.05);
    assert!((st.mass_between(-100.0, 100.0) - 1.0).abs() < 1e-9);
    // Mean of S^2 by midpoint sampling.
    let n = 400_000;
    let step = st.h / n as f64;
    let m2: f64 = (0..n)
        .map(|k| s_of_t(c, st.t + (k as f64 + 0.5) * step).unwrap().powi(2))
        .sum::<f64>()
        / n as f64;
    assert!((m2 / st.moment2 - 1.0).abs() < 1e-3);
}

#[test]
fn joint_moment_without_prime_sum_is_moment_of_s() {
    let c = cache();
    let jm = joint_moment(c, None, 3000.0, 500.0, 1, 1e-3).unwrap();
    let n = 500_000;
    let step = 500.0 / n as f64;
    let direct: f64 = (0..n)
        .map(|k| (PI * s_of_t(c, 3000.0 + (k as f64 + 0.5) * step).unwrap()).powi(2))
        .sum::<f64>()
        * step;
    assert!((jm.value / direct - 1.0).abs() < 1e-3);
    assert!(jm.within_bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_decreases_between_zeros(t in 11.0f64..5900.0, d in 1e-4f64..0.05) {
        let c = cache();
        prop_assume!(c.count(t + d) == c.count(t));
        let ds = s_of_t(c, t + d).unwrap() - s_of_t(c, t).unwrap();
        let want = -(theta_oracle(t + d) - theta_oracle(t)) / PI;
        prop_assert!(ds < 0.0);
        prop_assert!((ds - want).abs() <= 1e-9);
    }

    #[test]
    fn z_changes_sign_at_each_zero(i in 0usize..3000) {
        let c = cache();
        let g = c.gammas[i];
        let eps = 1e-6;
        prop_assert!(hardy_z(g - eps).unwrap().signum() != hardy_z(g + eps).unwrap().signum());
    }
}
