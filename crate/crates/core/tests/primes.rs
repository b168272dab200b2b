mod common;

use argdist::primes::{mertens_check, sieve, sieve_with, PrimeTable, SieveMode};
use common::primes_upto;
use proptest::prelude::*;

#[test]
fn known_counts() {
    for (y, pi) in [(10u64, 4usize), (100, 25), (1000, 168), (10_000, 1229), (100_000, 9592), (1_000_000, 78_498)] {
        assert_eq!(sieve(y).unwrap().len(), pi, "pi({y})");
    }
}

#[test]
fn mertens_deviation_shrinks() {
    // |sigma - log log y - B| < 1/(2 log^2 y) + 1/log^2 y for y > 1.
    for y in [1_000u64, 100_000, 10_000_000] {
        let t = sieve(y).unwrap();
        let l = (y as f64).ln();
        assert!(mertens_check(&t).unwrap().abs() < 1.5 / (l * l), "y = {y}");
    }
}

#[test]
fn modes_agree_across_segment_boundaries() {
    let y = 3 * (1u64 << 15) + 17;
    let a = sieve_with(y, SieveMode::Dense).unwrap();
    let b = sieve_with(y, SieveMode::Segmented).unwrap();
    assert_eq!(a.primes(), b.primes());
    assert_eq!(a.sigma().to_bits(), b.sigma().to_bits());
}

#[test]
fn table_survives_disk_round_trip() {
    let dir = std::env::temp_dir().join(format!("argdist-primes-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.txt");
    let t = sieve(5000).unwrap();
    t.save(&path).unwrap();
    let back = PrimeTable::load(&path).unwrap();
    assert_eq!(back.primes(), t.primes());
    assert_eq!(back.limit(), 5000);
    std::fs::write(&path, "not a prime file\n").unwrap();
    assert!(PrimeTable::load(&path).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reciprocal_sum_between_splits_sigma() {
    let t = sieve(10_000).unwrap();
    let a = t.reciprocal_sum_between(0.0, 100.0);
    let b = t.reciprocal_sum_between(100.0, 10_000.0);
    assert!((a + b - t.sigma()).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matches_trial_division(y in 2u64..20_000) {
        let t = sieve(y).unwrap();
        prop_assert_eq!(t.primes(), &primes_upto(y)[..]);
    }

    #[test]
    fn segmented_matches_dense(y in 2u64..300_000) {
        let a = sieve_with(y, SieveMode::Dense).unwrap();
        let b = sieve_with(y, SieveMode::Segmented).unwrap();
        prop_assert_eq!(a.primes(), b.primes());
    }

    #[test]
    fn power_sums_decrease(y in 2u64..5000, k in 1u32..8) {
        let t = sieve(y).unwrap();
        prop_assert!(t.sigma_k(k + 1) < t.sigma_k(k));
    }
}
