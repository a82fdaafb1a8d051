//! Number-theoretic primitives: primes, Möbius function, Euler totient, and
//! the Riemann zeta function with its prime-sieved variants.
//!
//! The zeta evaluator runs Euler–Maclaurin summation with exact (rational)
//! Bernoulli coefficients converted to `f64` once, and cross-validates itself
//! on first use against an independent alternating-series (eta function)
//! evaluation. The two methods have independent error profiles.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;
use thiserror::Error;

/// Documented accuracy envelope for `zeta`: |Im z| must stay below this.
pub const ZETA_IM_ENVELOPE: f64 = 1.0e4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be a positive integer")]
    ZeroArgument,
}

#[derive(Debug, Error, PartialEq)]
pub enum ZetaError {
    #[error("zeta has a pole at z = 1")]
    Pole,
    #[error("|Im z| = {0} exceeds the accuracy envelope {ZETA_IM_ENVELOPE}")]
    OutOfRange(f64),
    #[error("zeta self-test failed: Euler-Maclaurin vs eta disagree by {0:e}")]
    SelfTestFailed(f64),
}

/// Principal-value power `base^(-z) = exp(-z log base)` for a positive real base.
pub fn pow_neg(base: f64, z: Complex64) -> Complex64 {
    (-z * base.ln()).exp()
}

/// All primes `<= n`, increasing.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// Möbius function of a positive integer.
pub fn mobius(m: u64) -> Result<i64, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroArgument);
    }
    let mut m = m;
    let mut mu = 1i64;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return Ok(0);
            }
            mu = -mu;
        }
        d += 1;
    }
    if m > 1 {
        mu = -mu;
    }
    Ok(mu)
}

/// Euler totient of a positive integer.
pub fn euler_phi(m: u64) -> Result<u64, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroArgument);
    }
    let mut m = m;
    let mut phi = m;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            phi -= phi / d;
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    Ok(phi)
}

/// Totients of every integer `<= limit` by a linear sieve. `phi[0] = 0`.
pub fn totient_sieve(limit: usize) -> Vec<u32> {
    let mut phi = vec![0u32; limit + 1];
    if limit >= 1 {
        phi[1] = 1;
    }
    let mut is_comp = vec![false; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            phi[i] = (i - 1) as u32;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                phi[ip] = phi[i] * (p as u32);
                break;
            }
            phi[ip] = phi[i] * ((p - 1) as u32);
        }
    }
    phi
}

/// Divisors of `m`, increasing.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            divs.push(d);
            if d != m / d {
                divs.push(m / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    divs
}

/// Bernoulli numbers `B_0..=B_max` as exact rationals (B_1 = -1/2 convention).
fn bernoulli_numbers(max: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(max + 1);
    b.push(BigRational::one());
    for m in 1..=max {
        // B_m = -1/(m+1) * sum_{k=0}^{m-1} C(m+1, k) B_k
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += BigRational::from_integer(binom.clone()) * bk;
            // C(m+1, k+1) = C(m+1, k) * (m+1-k) / (k+1)
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Settings for the Euler–Maclaurin zeta evaluation.
#[derive(Debug, Clone)]
pub struct ZetaConfig {
    /// Minimum number of directly summed terms.
    pub direct_terms: usize,
    /// Number of Bernoulli correction terms (uses B_2 .. B_{2*order}).
    pub bernoulli_order: usize,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig {
            direct_terms: 50,
            bernoulli_order: 30,
        }
    }
}

/// Zeta evaluator holding precomputed `B_{2j}/(2j)!` ratios.
#[derive(Debug, Clone)]
pub struct ZetaEvaluator {
    config: ZetaConfig,
    /// bern_ratio[j] = B_{2j} / (2j)! for j = 1..=order, index 0 unused.
    bern_ratio: Vec<f64>,
}

impl ZetaEvaluator {
    pub fn new(config: ZetaConfig) -> Self {
        let bern = bernoulli_numbers(2 * config.bernoulli_order);
        let mut fact = BigInt::one();
        let mut bern_ratio = vec![0.0; config.bernoulli_order + 1];
        for (k, ratio_slot) in bern_ratio.iter_mut().enumerate() {
            if k > 0 {
                // advance factorial from (2k-2)! to (2k)!
                fact *= BigInt::from(2 * k - 1) * BigInt::from(2 * k);
                let r = &bern[2 * k] / BigRational::from_integer(fact.clone());
                *ratio_slot = big_rational_to_f64(&r);
            }
        }
        ZetaEvaluator { config, bern_ratio }
    }

    /// Riemann zeta via Euler–Maclaurin. Valid for z != 1, |Im z| within the envelope.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64, ZetaError> {
        if z == Complex64::new(1.0, 0.0) {
            return Err(ZetaError::Pole);
        }
        if z.im.abs() > ZETA_IM_ENVELOPE {
            return Err(ZetaError::OutOfRange(z.im.abs()));
        }
        // Direct-term count scales with |Im z| so the correction series stays convergent.
        let n = self
            .config
            .direct_terms
            .max(((z.im.abs() + z.re.abs().min(100.0) + 60.0) / 3.0).ceil() as usize);
        let nf = n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..n {
            sum += pow_neg(k as f64, z);
        }
        // tail integral + boundary term
        let n_pow = pow_neg(nf, z); // N^{-z}
        sum += n_pow * nf / (z - 1.0);
        sum += n_pow * 0.5;
        // Bernoulli corrections: B_{2j}/(2j)! * z(z+1)...(z+2j-2) * N^{-z-2j+1}
        let mut poch = Complex64::new(1.0, 0.0);
        let mut shift = z;
        let mut n_shift = n_pow * nf; // N^{-z+1}
        for j in 1..=self.config.bernoulli_order {
            poch *= shift;
            shift += 1.0;
            n_shift /= nf * nf; // N^{-z+1-2j} at step j
            let term = self.bern_ratio[j] * poch * n_shift;
            sum += term;
            if term.norm() < 1e-18 * sum.norm().max(1.0) {
                break;
            }
            poch *= shift;
            shift += 1.0;
        }
        Ok(sum)
    }
}

fn big_rational_to_f64(r: &BigRational) -> f64 {
    // to_f64 on BigRational goes through numer/denom f64 conversion which can
    // overflow for large Bernoulli numerators; scale down first if needed.
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let digits_n = r.numer().abs().to_string().len() as i32;
    let digits_d = r.denom().abs().to_string().len() as i32;
    let shift = (digits_n.min(digits_d) - 15).max(0) as u32;
    let scale = BigInt::from(10u32).pow(shift);
    let n = (r.numer() / &scale).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() / &scale).to_f64().unwrap_or(f64::NAN);
    n / d
}

static DEFAULT_EVALUATOR: OnceLock<Result<ZetaEvaluator, ZetaError>> = OnceLock::new();

fn default_evaluator() -> Result<&'static ZetaEvaluator, ZetaError> {
    DEFAULT_EVALUATOR
        .get_or_init(|| {
            let ev = ZetaEvaluator::new(ZetaConfig::default());
            // startup self-test: Euler-Maclaurin against the independent eta route
            let probes = [
                Complex64::new(2.0, 0.0),
                Complex64::new(0.7, 0.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(0.25, 0.0),
                Complex64::new(1.5, 10.0),
            ];
            for &z in &probes {
                let a = ev.zeta(z)?;
                let b = zeta_eta(z);
                let d = (a - b).norm();
                if d > 1e-12 {
                    return Err(ZetaError::SelfTestFailed(d));
                }
            }
            Ok(ev)
        })
        .as_ref()
        .map_err(|e| e.clone())
}

impl Clone for ZetaError {
    fn clone(&self) -> Self {
        match self {
            ZetaError::Pole => ZetaError::Pole,
            ZetaError::OutOfRange(v) => ZetaError::OutOfRange(*v),
            ZetaError::SelfTestFailed(v) => ZetaError::SelfTestFailed(*v),
        }
    }
}

/// Riemann zeta with the default evaluator (self-tested on first use).
pub fn zeta(z: Complex64) -> Result<Complex64, ZetaError> {
    default_evaluator()?.zeta(z)
}

/// Zeta through the alternating (eta) series with Cohen–Rodriguez Villegas–Zagier
/// acceleration: an independent oracle for the Euler–Maclaurin route.
/// Accurate for Re z > 0 away from the zeros of 1 - 2^{1-z}.
pub fn zeta_eta(z: Complex64) -> Complex64 {
    let n = 64usize;
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0f64;
    let mut c = -d;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        c = b - c;
        acc += c * pow_neg((k + 1) as f64, z);
        b *= ((k + n) as f64) * ((k as f64) - (n as f64))
            / ((k as f64 + 0.5) * ((k + 1) as f64));
    }
    let eta = acc / d;
    eta / (1.0 - pow_neg(2.0, z - 1.0))
}

/// Sieved zeta: `zeta(z) * prod_{p <= m} (1 - p^{-z})`.
/// For Re z > 1 this equals the Euler product restricted to primes above `m`.
pub fn zeta_sieved(z: Complex64, m: u64) -> Result<Complex64, ZetaError> {
    let mut v = zeta(z)?;
    for p in primes_up_to(m) {
        v *= 1.0 - pow_neg(p as f64, z);
    }
    Ok(v)
}

/// Sieved zeta with a caller-provided prime list (avoids resieving in hot loops).
pub fn zeta_sieved_with(z: Complex64, primes: &[u64]) -> Result<Complex64, ZetaError> {
    let mut v = zeta(z)?;
    for &p in primes {
        v *= 1.0 - pow_neg(p as f64, z);
    }
    Ok(v)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZeroTableError {
    #[error("line {0}: cannot parse ordinate")]
    Parse(usize),
    #[error("line {0}: ordinates must be strictly increasing and > 14")]
    Monotonicity(usize),
    #[error("cannot read zero table: {0}")]
    Io(String),
}

/// Imaginary parts of nontrivial zeta zeros. Real parts are taken as 1/2 when
/// generating singular-point candidates; this locates candidates and is never
/// a proof of RH.
#[derive(Debug, Clone)]
pub struct ZetaZeroTable {
    pub ordinates: Vec<f64>,
    pub source_path: String,
}

/// Bundled table of the first 100 ordinates.
pub const BUNDLED_ZETA_ZEROS: &str = include_str!("../data/zeta_zeros.txt");

impl ZetaZeroTable {
    pub fn parse(text: &str, source_path: &str) -> Result<Self, ZeroTableError> {
        let mut ordinates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| ZeroTableError::Parse(i + 1))?;
            if v <= 14.0 || ordinates.last().is_some_and(|&last| v <= last) {
                return Err(ZeroTableError::Monotonicity(i + 1));
            }
            ordinates.push(v);
        }
        Ok(ZetaZeroTable {
            ordinates,
            source_path: source_path.to_string(),
        })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_ZETA_ZEROS, "<bundled>").expect("bundled zero table is valid")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ZeroTableError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ZeroTableError::Io(e.to_string()))?;
        Self::parse(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn mobius_small_values() {
        assert_eq!(mobius(1), Ok(1));
        assert_eq!(mobius(4), Ok(0));
        assert_eq!(mobius(6), Ok(1));
        assert_eq!(mobius(0), Err(ArithError::ZeroArgument));
        // direct factorization oracle
        for m in 1..=200u64 {
            let mut sq = 1i64;
            let mut mm = m;
            let mut mu = 1i64;
            let mut d = 2;
            while d * d <= mm {
                let mut cnt = 0;
                while mm % d == 0 {
                    mm /= d;
                    cnt += 1;
                }
                if cnt >= 2 {
                    sq = 0;
                }
                if cnt == 1 {
                    mu = -mu;
                }
                d += 1;
            }
            if mm > 1 {
                mu = -mu;
            }
            let expected = if sq == 0 { 0 } else { mu };
            assert_eq!(mobius(m).unwrap(), expected, "m = {m}");
        }
    }

    #[test]
    fn mobius_divisor_sum_identity() {
        for m in 1..=10_000u64 {
            let s: i64 = divisors(m).iter().map(|&d| mobius(d).unwrap()).sum();
            assert_eq!(s, i64::from(m == 1), "m = {m}");
        }
    }

    #[test]
    fn euler_phi_values() {
        assert_eq!(euler_phi(1), Ok(1));
        assert_eq!(euler_phi(7), Ok(6));
        assert_eq!(euler_phi(12), Ok(4));
        assert_eq!(euler_phi(0), Err(ArithError::ZeroArgument));
        // enumeration of coprime residues
        for m in 1..=500u64 {
            let count = (1..=m)
                .filter(|&k| num_integer::gcd(k, m) == 1)
                .count() as u64;
            assert_eq!(euler_phi(m).unwrap(), count, "m = {m}");
        }
    }

    #[test]
    fn totient_sieve_matches_euler_phi() {
        let phi = totient_sieve(2000);
        for m in 1..=2000usize {
            assert_eq!(u64::from(phi[m]), euler_phi(m as u64).unwrap());
        }
    }

    #[test]
    fn primes_small() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        let p100 = primes_up_to(100);
        assert_eq!(p100.len(), 25);
        assert_eq!(*p100.last().unwrap(), 97);
        // trial-division oracle
        let oracle: Vec<u64> = (2..=100).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(p100, oracle);
    }

    #[test]
    fn zeta_at_two() {
        let v = zeta(Complex64::new(2.0, 0.0)).unwrap();
        let expected = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v.re - expected).abs() < 1e-13, "got {v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn zeta_at_zero() {
        let v = zeta(Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re + 0.5).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn zeta_in_critical_strip_dual_algorithm() {
        let z = Complex64::new(0.7, 0.0);
        let a = zeta(z).unwrap();
        let b = zeta_eta(z);
        assert!(a.re < 0.0, "zeta(0.7) is negative real, got {a}");
        assert!((a - b).norm() < 1e-12, "disagreement {:e}", (a - b).norm());
    }

    #[test]
    fn zeta_pole_and_envelope() {
        assert_eq!(zeta(Complex64::new(1.0, 0.0)), Err(ZetaError::Pole));
        assert!(matches!(
            zeta(Complex64::new(2.0, 2.0e4)),
            Err(ZetaError::OutOfRange(_))
        ));
    }

    #[test]
    fn zeta_partial_sum_tail_bound() {
        // Partial sum up to K approximates zeta within the integral tail bound
        // K^{1-Re z}/(Re z - 1) + K^{-Re z}; below 1e-8 once Re z >= 3.
        const K: u64 = 100_000;
        for &z in &[
            Complex64::new(2.0, 0.0),
            Complex64::new(2.5, 3.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, -7.0),
        ] {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 1..=K {
                s += pow_neg(k as f64, z);
            }
            let v = zeta(z).unwrap();
            let kf = K as f64;
            // integral tail bound plus rounding slack for 1e5 f64 additions
            let tail = kf.powf(1.0 - z.re) / (z.re - 1.0) + kf.powf(-z.re) + 1e-13;
            let err = (v - s).norm();
            assert!(err <= tail, "z = {z}, err {err:e} > tail {tail:e}");
            if z.re >= 3.0 {
                assert!(err <= 1e-8, "z = {z}, err {err:e}");
            }
        }
    }

    #[test]
    fn zeta_sieved_values() {
        let z2 = Complex64::new(2.0, 0.0);
        assert!((zeta_sieved(z2, 1).unwrap() - zeta(z2).unwrap()).norm() < 1e-15);
        let expected = std::f64::consts::PI.powi(2) / 8.0;
        assert!((zeta_sieved(z2, 2).unwrap().re - expected).abs() < 1e-13);
    }

    #[test]
    fn zeta_sieved_consistency_identity() {
        // zeta_sieved(z, M') * prod_{M < p <= M'} (1 - p^{-z})^{-1} = zeta_sieved(z, M)
        let z = Complex64::new(1.3, 2.2);
        let (m, m2) = (5u64, 23u64);
        let mut v = zeta_sieved(z, m2).unwrap();
        for p in primes_up_to(m2) {
            if p > m {
                v /= 1.0 - pow_neg(p as f64, z);
            }
        }
        let w = zeta_sieved(z, m).unwrap();
        assert!((v - w).norm() < 1e-12);
    }

    #[test]
    fn zeta_sieved_euler_product_above_m() {
        // Re z > 1: sieved zeta equals the product over primes > M.
        let z = Complex64::new(2.5, 1.0);
        let m = 7u64;
        let mut prod = Complex64::new(1.0, 0.0);
        for p in primes_up_to(100_000) {
            if p > m {
                prod *= (1.0 - pow_neg(p as f64, z)).inv();
            }
        }
        let v = zeta_sieved(z, m).unwrap();
        // truncating the product at 1e5 leaves a tail around 2e-9
        assert!((v - prod).norm() < 1e-8);
    }

    #[test]
    fn zeta_sieved_pole_only_at_one() {
        // finite on a sample grid, blows up along the real axis toward 1
        for m in [1u64, 2, 5, 30] {
            for &z in &[
                Complex64::new(0.5, 3.0),
                Complex64::new(0.2, -1.0),
                Complex64::new(2.0, 0.5),
                Complex64::new(0.9, 0.0),
            ] {
                assert!(zeta_sieved(z, m).unwrap().norm().is_finite());
            }
            let near = zeta_sieved(Complex64::new(1.0 + 1e-9, 0.0), m).unwrap();
            let far = zeta_sieved(Complex64::new(1.5, 0.0), m).unwrap();
            assert!(near.norm() > 1e6 * far.norm(), "m = {m}");
        }
    }

    #[test]
    fn zero_table_bundled() {
        let t = ZetaZeroTable::bundled();
        assert_eq!(t.ordinates.len(), 100);
        assert!((t.ordinates[0] - 14.134725141734694).abs() < 1e-9);
        assert!(t.ordinates.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_table_rejects_bad_input() {
        assert!(matches!(
            ZetaZeroTable::parse("14.1\nnot-a-number\n", "t"),
            Err(ZeroTableError::Parse(2))
        ));
        assert!(matches!(
            ZetaZeroTable::parse("21.0\n14.1\n", "t"),
            Err(ZeroTableError::Monotonicity(2))
        ));
        assert!(matches!(
            ZetaZeroTable::parse("2.5\n", "t"),
            Err(ZeroTableError::Monotonicity(1))
        ));
    }
}
