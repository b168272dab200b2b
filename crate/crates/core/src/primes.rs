//! Prime enumeration and prime-reciprocal power sums.
//!
//! A [`PrimeTable`] holds the primes up to a limit `y` together with
//! `sigma = sum_{p <= y} 1/p`. Higher power sums `sigma_k = sum p^{-k}` are
//! computed on first request and cached. All sums run over the primes in
//! ascending order so results are bit-reproducible.
//!
//! Tables up to [`DENSE_LIMIT`] are sieved with a plain odd-only sieve of
//! Eratosthenes. Beyond that the segmented sieve is mandatory: its working
//! set is `O(sqrt(y))` per segment.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest limit accepted by the dense sieve.
pub const DENSE_LIMIT: u64 = 100_000_000;

/// Mertens' constant `lim (sum_{p<=x} 1/p - log log x)`.
pub const MERTENS_B: f64 = 0.261_497_212_847_642_8;

/// Magic first line of the on-disk prime table format.
pub const PRIME_FILE_MAGIC: &str = "ARGDIST-PRIMES 1";

/// Memory mode of the sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SieveMode {
    /// Dense below [`DENSE_LIMIT`], segmented above.
    #[default]
    Auto,
    /// Single bit array covering `[0, y]`. Rejected above [`DENSE_LIMIT`].
    Dense,
    /// Segments of `max(sqrt(y), 2^15)` odd numbers.
    Segmented,
}

/// Primes up to a limit, with cached reciprocal power sums.
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    sigma: f64,
    sigma_k: Mutex<BTreeMap<u32, f64>>,
}

impl Clone for PrimeTable {
    fn clone(&self) -> Self {
        let cache = self.sigma_k.lock().expect("sigma_k cache poisoned").clone();
        Self {
            limit: self.limit,
            primes: self.primes.clone(),
            sigma: self.sigma,
            sigma_k: Mutex::new(cache),
        }
    }
}

impl fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("count", &self.primes.len())
            .field("sigma", &self.sigma)
            .finish()
    }
}

impl PrimeTable {
    fn from_primes(limit: u64, primes: Vec<u64>) -> Self {
        let sigma = primes.iter().map(|&p| 1.0 / p as f64).sum();
        Self {
            limit,
            primes,
            sigma,
            sigma_k: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `sum_{p <= y} 1/p`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `sum_{p <= y} p^{-k}`; `k = 1` returns [`sigma`](Self::sigma).
    pub fn sigma_k(&self, k: u32) -> f64 {
        if k <= 1 {
            return self.sigma;
        }
        let mut cache = self.sigma_k.lock().expect("sigma_k cache poisoned");
        *cache.entry(k).or_insert_with(|| {
            self.primes
                .iter()
                .map(|&p| (p as f64).powi(k as i32).recip())
                .sum()
        })
    }

    /// Snapshot of the cached `sigma_k` values.
    pub fn cached_sigma_k(&self) -> BTreeMap<u32, f64> {
        self.sigma_k.lock().expect("sigma_k cache poisoned").clone()
    }

    /// `sum_{lo < p <= hi} 1/p` over this table, ascending order.
    pub fn reciprocal_sum_between(&self, lo: f64, hi: f64) -> f64 {
        self.primes
            .iter()
            .filter(|&&p| (p as f64) > lo && (p as f64) <= hi)
            .map(|&p| 1.0 / p as f64)
            .sum()
    }

    /// Writes the table in the versioned text format: magic line, `y=<limit>`,
    /// `count=<n>`, then one prime per line.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{PRIME_FILE_MAGIC}")?;
        writeln!(out, "y={}", self.limit)?;
        writeln!(out, "count={}", self.primes.len())?;
        for p in &self.primes {
            writeln!(out, "{p}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a table written by [`save`](Self::save).
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("prime file truncated before {what}")))?
                .map_err(Error::from)
        };
        let magic = next("magic")?;
        if magic.trim() != PRIME_FILE_MAGIC {
            return Err(Error::Parse(format!("bad prime file magic {magic:?}")));
        }
        let limit = parse_header(&next("y header")?, "y")?;
        let count = parse_header(&next("count header")?, "count")? as usize;
        let mut primes = Vec::with_capacity(count);
        for _ in 0..count {
            let line = next("prime list")?;
            let p = line
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad prime {line:?}: {e}")))?;
            if primes.last().is_some_and(|&q| q >= p) || p > limit {
                return Err(Error::Parse(format!("prime list not ascending at {p}")));
            }
            primes.push(p);
        }
        Ok(Self::from_primes(limit, primes))
    }
}

fn parse_header(line: &str, key: &str) -> Result<u64> {
    let value = line
        .trim()
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("expected {key}=<value>, got {line:?}")))?;
    value
        .parse()
        .map_err(|e| Error::Parse(format!("bad {key} value {value:?}: {e}")))
}

/// Sieves the primes up to `y` in [`SieveMode::Auto`].
pub fn sieve(y: u64) -> Result<PrimeTable> {
    sieve_with(y, SieveMode::Auto)
}

pub fn sieve_with(y: u64, mode: SieveMode) -> Result<PrimeTable> {
    if y < 2 {
        return Err(Error::InvalidRange(format!("sieve limit y = {y} must be >= 2")));
    }
    let primes = match mode {
        SieveMode::Dense if y > DENSE_LIMIT => {
            return Err(Error::Config(format!(
                "dense sieve requested for y = {y} > {DENSE_LIMIT}; use the segmented mode"
            )))
        }
        SieveMode::Dense => dense_sieve(y),
        SieveMode::Auto if y <= DENSE_LIMIT => dense_sieve(y),
        SieveMode::Auto | SieveMode::Segmented => segmented_sieve(y),
    };
    Ok(PrimeTable::from_primes(y, primes))
}

/// Odd-only sieve: index `i` stands for `2i + 1`.
fn dense_sieve(y: u64) -> Vec<u64> {
    let n = (y as usize - 1) / 2 + 1;
    let mut composite = vec![false; n];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= y as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < n {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

fn segmented_sieve(y: u64) -> Vec<u64> {
    let root = integer_sqrt(y);
    let base = dense_sieve(root.max(2));
    let span = (root.max(1 << 15) as usize) * 2;
    let starts: Vec<u64> = (0..=y / span as u64).map(|s| s * span as u64).collect();
    let segments: Vec<Vec<u64>> = starts
        .par_iter()
        .map(|&lo| sieve_segment(lo, (lo + span as u64 - 1).min(y), &base))
        .collect();
    segments.into_iter().flatten().collect()
}

/// Primes in `[lo, hi]` using base primes up to `sqrt(hi)`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let first = (p * p).max(lo.div_ceil(p) * p);
        let mut m = first;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(i, &c)| !c && lo + *i as u64 >= 2)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `sigma(y) - log log y - B`, the deviation from the Mertens estimate.
pub fn mertens_check(table: &PrimeTable) -> Result<f64> {
    if table.limit() < 100 {
        return Err(Error::InvalidRange(format!(
            "mertens_check needs y >= 100, got {}",
            table.limit()
        )));
    }
    let y = table.limit() as f64;
    Ok(table.sigma() - y.ln().ln() - MERTENS_B)
}
