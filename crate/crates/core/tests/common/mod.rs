//! Independent reference implementations shared by the integration tests.
//! None of these call into the library.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Primes up to `y` by trial division.
pub fn primes_upto(y: u64) -> Vec<u64> {
    (2..=y)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact `sum_{p <= y} p^{-k}`.
pub fn sigma_k_exact(y: u64, k: u32) -> BigRational {
    primes_upto(y)
        .into_iter()
        .fold(BigRational::zero(), |acc, p| {
            acc + BigRational::new(BigInt::one(), BigInt::from(p).pow(k))
        })
}

/// Exact Taylor coefficients of `e^{-z} sum z^n / (n!)^2` through `order`.
pub fn varpi_exact(order: usize) -> Vec<BigRational> {
    (0..=order)
        .map(|n| {
            (0..=n).fold(BigRational::zero(), |acc, j| {
                let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
                let den = factorial(n - j) * factorial(j) * factorial(j);
                acc + BigRational::new(BigInt::from(sign), den)
            })
        })
        .collect()
}

/// Exact coefficients of `prod_{p <= y} varpi(z/p)` through `order`.
pub fn phi_exact(y: u64, order: usize) -> Vec<BigRational> {
    let w = varpi_exact(order);
    let mut acc = vec![BigRational::zero(); order + 1];
    acc[0] = BigRational::one();
    for p in primes_upto(y) {
        let mut scaled = Vec::with_capacity(order + 1);
        let mut pk = BigInt::one();
        for c in &w {
            scaled.push(c / BigRational::from_integer(pk.clone()));
            pk *= BigInt::from(p);
        }
        let mut next = vec![BigRational::zero(); order + 1];
        for i in 0..=order {
            if acc[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                next[i + j] += &acc[i] * &scaled[j];
            }
        }
        acc = next;
    }
    acc
}

/// Exact `k!`-scaled Taylor coefficient `G^{(k)}(0) / k!` of
/// `prod_{p <= y} sum_n (z/p)^n / (n!)^2`.
pub fn g_taylor_exact(y: u64, order: usize) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); order + 1];
    acc[0] = BigRational::one();
    for p in primes_upto(y) {
        let local: Vec<BigRational> = (0..=order)
            .map(|n| {
                BigRational::new(
                    BigInt::one(),
                    factorial(n) * factorial(n) * BigInt::from(p).pow(n as u32),
                )
            })
            .collect();
        let mut next = vec![BigRational::zero(); order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                next[i + j] += &acc[i] * &local[j];
            }
        }
        acc = next;
    }
    acc
}

/// `J_0(x)` by its power series with compensated summation. The terms
/// peak near `e^x / x`, so relative accuracy degrades like `e^x * 1e-16`.
pub fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = Neumaier::default();
    sum.add(1.0);
    for n in 1..80 {
        term *= q / (n as f64 * n as f64);
        sum.add(term);
        if term.abs() < 1e-20 {
            break;
        }
    }
    sum.value()
}

/// `G(-u^2) = prod_{p <= y} J_0(2u / sqrt p)`.
pub fn g_product(y: u64, u: f64) -> f64 {
    primes_upto(y)
        .into_iter()
        .map(|p| j0_series(2.0 * u / (p as f64).sqrt()))
        .product()
}

/// Integer coefficients of the probabilists' Hermite polynomial `H_n`,
/// lowest degree first.
pub fn hermite_coeffs(n: usize) -> Vec<i128> {
    let mut prev: Vec<i128> = vec![1];
    if n == 0 {
        return prev;
    }
    let mut cur: Vec<i128> = vec![0, 1];
    for k in 2..=n {
        let mut next = vec![0i128; k + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= (k as i128 - 1) * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub fn poly_eval(coeffs: &[i128], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub fn gl_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite 20-point Gauss–Legendre over `pieces` equal panels of `[a, b]`.
pub fn gl_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let (x, w) = gl_rule(20);
    let h = (b - a) / pieces as f64;
    let mut sum = Neumaier::default();
    for k in 0..pieces {
        let mid = a + (k as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum.add(wi * f(mid + 0.5 * h * xi));
        }
    }
    sum.value() * 0.5 * h
}

/// Even Bernoulli numbers `B_2 .. B_40`.
fn bernoulli_even() -> Vec<f64> {
    // Akiyama–Tanigawa recurrence on exact rationals.
    let m = 40;
    let mut a = vec![BigRational::zero(); m + 1];
    let mut b = Vec::with_capacity(m + 1);
    for n in 0..=m {
        a[n] = rat(1, n as i64 + 1);
        for j in (1..=n).rev() {
            a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        b.push(a[0].clone());
    }
    (1..=m / 2).map(|k| to_f64(&b[2 * k])).collect()
}

/// `zeta(1/2 + it)` by Euler–Maclaurin with `N = t/2 + 20` terms and twenty
/// Bernoulli corrections.
pub fn zeta_half_line(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let n = (t / 2.0) as usize + 20;
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for k in 1..n {
        let v = (-s * (k as f64).ln()).exp();
        re.add(v.re);
        im.add(v.im);
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_s = (-s * ln_n).exp();
    let mut total = Complex64::new(re.value(), im.value()) + n_s * nf / (s - 1.0) + 0.5 * n_s;
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = n_s / nf;
    for (k, b) in bernoulli_even().into_iter().enumerate() {
        total += b / fact * rising * pow;
        let j = 2 * k as u32 + 1;
        rising *= (s + j as f64) * (s + (j + 1) as f64);
        fact *= ((j + 2) * (j + 3)) as f64;
        pow /= nf * nf;
    }
    total
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = Self::two_sum(self.hi, o.hi);
        Self::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Self::renorm(p, e + self.lo * b)
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        Self::renorm(q1, q2).add(Dd::new(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Gauss–Legendre rule refined to double-double by Newton steps from the
/// f64 nodes.
pub fn gl_rule_dd(n: usize) -> (Vec<Dd>, Vec<Dd>) {
    let (x0, _) = gl_rule(n);
    let one = Dd::new(1.0);
    let legendre = |z: Dd| {
        let (mut p0, mut p1) = (one, z);
        for k in 2..=n {
            let t = z.mul(p1).mul_f64((2 * k - 1) as f64).sub(p0.mul_f64((k - 1) as f64));
            p0 = p1;
            p1 = t.div(Dd::new(k as f64));
        }
        let dp = z.mul(p1).sub(p0).mul_f64(n as f64).div(z.mul(z).sub(one));
        (p1, dp)
    };
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for &x in &x0 {
        let mut z = Dd::new(x);
        for _ in 0..3 {
            let (p, dp) = legendre(z);
            z = z.sub(p.div(dp));
        }
        let (_, dp) = legendre(z);
        xs.push(z);
        ws.push(Dd::new(2.0).div(one.sub(z.mul(z)).mul(dp.mul(dp))));
    }
    (xs, ws)
}

/// `H_n(x)` by the recurrence in double-double arithmetic.
pub fn hermite_dd(n: usize, x: Dd) -> Dd {
    let (mut a, mut b) = (Dd::new(1.0), x);
    if n == 0 {
        return a;
    }
    for k in 2..=n {
        let next = b.mul(x).add(a.mul_f64(-(k as f64 - 1.0)));
        a = b;
        b = next;
    }
    b
}

/// `e^{-x^2/2}`; the only rounding left is that of `exp` at the leading
/// part.
pub fn gauss_dd(x: Dd) -> Dd {
    let sq = x.mul(x);
    Dd::new((-0.5 * sq.hi).exp()).mul(Dd::new(1.0 - 0.5 * sq.lo))
}

/// Composite 20-point Gauss–Legendre over `pieces` equal panels with
/// nodes, weights and accumulation in double-double.
pub fn gl_integrate_dd<F: Fn(Dd) -> Dd>(f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let (x, w) = gl_rule_dd(20);
    // The panel width is kept in double-double so the last panel ends at b.
    let h = Dd::new(b).sub(Dd::new(a)).div(Dd::new(pieces as f64));
    let half = h.mul_f64(0.5);
    let mut sum = Dd::new(0.0);
    for k in 0..pieces {
        let mid = h.mul_f64(k as f64 + 0.5).add(Dd::new(a));
        for (xi, wi) in x.iter().zip(&w) {
            let node = mid.add(xi.mul(half));
            sum = sum.add(f(node).mul(*wi));
        }
    }
    sum.mul(half).to_f64()
}
