//! The cyclotomic expansion `h = prod_beta (1 - X^{alpha.beta})^{gamma(beta)}`:
//! exact exponents, truncated-product verification, an independent formal-log
//! oracle, cyclotomicity decisions with positive certificates both ways, and
//! exact removal of cyclotomic factors.
//!
//! All exponent arithmetic is exact (BigRational intermediates, integer
//! results). Floating point appears only in the root-modulus certificate.

use crate::arith::{divisors, mobius};
use crate::poly::{ExponentVector, SparsePolynomial, Term, UnivariateIntPolynomial};
use crate::roots::int_polynomial_roots;
use crate::series::{log_series, ExactPoly, Expo, IntSeries};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CyclotomyError {
    #[error("gamma({beta:?}) is not an integer: internal invariant breach")]
    NonIntegerGamma { beta: Vec<u32> },
    #[error("gamma({beta:?}) exceeds i64: internal invariant breach")]
    GammaOverflow { beta: Vec<u32> },
    #[error("beta slab holds {entries} points, over the budget {budget}")]
    ResourceGuard { entries: u64, budget: u64 },
    #[error("distinct beta map to the monomial {lambda:?}; aggregated exponent {aggregated}")]
    AmbiguousAggregation { lambda: Vec<u32>, aggregated: i64 },
}

/// Default cap on the number of lattice points a single expansion table may hold.
pub const DEFAULT_ENTRY_BUDGET: u64 = 2_000_000;

/// `C(h) = 1 / (|a_1| + ... + |a_r|)`, the expansion's convergence radius datum.
pub fn distance_constant(h: &SparsePolynomial) -> BigRational {
    assert!(h.r() >= 1, "distance constant needs at least one term");
    let total: i64 = h.terms().iter().map(|t| t.coeff.abs()).sum();
    BigRational::new(BigInt::one(), BigInt::from(total))
}

fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// The exact exponent `gamma(beta)` of the factor `(1 - X^{alpha.beta})`:
/// sum over all `(m, b)` with `m b = beta` of
/// `(-1)^{|b|} mu(m)/m (|b|-1)!/(b_1!..b_r!) a^b`.
pub fn gamma_exponent(h: &SparsePolynomial, beta: &[u32]) -> Result<i64, CyclotomyError> {
    assert_eq!(beta.len(), h.r());
    assert!(beta.iter().any(|&b| b > 0), "beta must be nonzero");
    let g = beta
        .iter()
        .fold(0u64, |acc, &b| num_integer::gcd(acc, u64::from(b)));
    let coeffs = h.coefficients();
    let mut acc = BigRational::zero();
    for m in divisors(g) {
        let mu = mobius(m).expect("m >= 1");
        if mu == 0 {
            continue;
        }
        let b: Vec<u64> = beta.iter().map(|&x| u64::from(x) / m).collect();
        let norm: u64 = b.iter().sum();
        let mut numer = factorial(norm - 1);
        if norm % 2 == 1 {
            numer = -numer;
        }
        numer *= BigInt::from(mu);
        let mut denom = BigInt::from(m);
        for &bj in &b {
            denom *= factorial(bj);
        }
        let mut apow = BigInt::one();
        for (&aj, &bj) in coeffs.iter().zip(&b) {
            if bj > 0 {
                apow *= BigInt::from(aj).pow(bj as u32);
            }
        }
        acc += BigRational::new(numer * apow, denom);
    }
    if !acc.is_integer() {
        return Err(CyclotomyError::NonIntegerGamma {
            beta: beta.to_vec(),
        });
    }
    acc.to_integer()
        .to_i64()
        .ok_or(CyclotomyError::GammaOverflow {
            beta: beta.to_vec(),
        })
}

/// Finite table of nonzero `gamma(beta)` over `1 <= |beta| <= beta_bound`.
#[derive(Debug, Clone)]
pub struct ExpansionTable {
    pub beta_bound: u32,
    /// Nonzero exponents only; absent entries inside the slab are zero.
    pub entries: BTreeMap<Vec<u32>, i64>,
    pub distance_constant: BigRational,
}

impl ExpansionTable {
    /// Exponent at `beta`; zero when not stored. `beta` must be inside the slab.
    pub fn gamma(&self, beta: &[u32]) -> i64 {
        assert!(beta.iter().map(|&b| u64::from(b)).sum::<u64>() <= u64::from(self.beta_bound));
        self.entries.get(beta).copied().unwrap_or(0)
    }

    /// Structured text export: one `beta=(b1,..,br) gamma=g` line per entry.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for (beta, g) in &self.entries {
            let parts: Vec<String> = beta.iter().map(|b| b.to_string()).collect();
            out.push_str(&format!("beta=({}) gamma={}\n", parts.join(","), g));
        }
        out
    }
}

fn for_each_beta_norm_bounded(
    r: usize,
    bound: u32,
    mut f: impl FnMut(&[u32]) -> Result<(), CyclotomyError>,
) -> Result<(), CyclotomyError> {
    // counts ordered by total norm, then lexicographic
    fn rec(
        buf: &mut Vec<u32>,
        left: u32,
        slot: usize,
        r: usize,
        f: &mut impl FnMut(&[u32]) -> Result<(), CyclotomyError>,
    ) -> Result<(), CyclotomyError> {
        if slot == r - 1 {
            buf.push(left);
            f(buf)?;
            buf.pop();
            return Ok(());
        }
        for v in 0..=left {
            buf.push(v);
            rec(buf, left - v, slot + 1, r, f)?;
            buf.pop();
        }
        Ok(())
    }
    for norm in 1..=bound {
        let mut buf = Vec::with_capacity(r);
        rec(&mut buf, norm, 0, r, &mut f)?;
    }
    Ok(())
}

/// Visit every beta in N^r with `|beta| = norm`, lexicographic order.
pub fn for_each_beta_with_norm(r: usize, norm: u32, mut f: impl FnMut(&[u32])) {
    fn rec(buf: &mut Vec<u32>, left: u32, slot: usize, r: usize, f: &mut impl FnMut(&[u32])) {
        if slot == r - 1 {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=left {
            buf.push(v);
            rec(buf, left - v, slot + 1, r, f);
            buf.pop();
        }
    }
    if norm == 0 || r == 0 {
        return;
    }
    let mut buf = Vec::with_capacity(r);
    rec(&mut buf, norm, 0, r, &mut f);
}

/// Visit every beta with `1 <= |beta| <= bound`, increasing norm then lex.
pub fn for_each_beta_up_to(r: usize, bound: u32, mut f: impl FnMut(&[u32])) {
    for norm in 1..=bound {
        for_each_beta_with_norm(r, norm, &mut f);
    }
}

fn slab_size(r: usize, bound: u32) -> u64 {
    // C(bound + r, r) - 1, saturating
    let mut acc: u128 = 1;
    for i in 1..=r as u128 {
        acc = acc.saturating_mul(u128::from(bound) + i) / i;
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    (acc - 1).min(u128::from(u64::MAX)) as u64
}

pub fn expansion_table(h: &SparsePolynomial, bound: u32) -> Result<ExpansionTable, CyclotomyError> {
    expansion_table_with_budget(h, bound, DEFAULT_ENTRY_BUDGET)
}

pub fn expansion_table_with_budget(
    h: &SparsePolynomial,
    bound: u32,
    budget: u64,
) -> Result<ExpansionTable, CyclotomyError> {
    assert!(bound >= 1);
    let size = slab_size(h.r(), bound);
    if size > budget {
        return Err(CyclotomyError::ResourceGuard {
            entries: size,
            budget,
        });
    }
    let mut entries = BTreeMap::new();
    for_each_beta_norm_bounded(h.r(), bound, |beta| {
        let g = gamma_exponent(h, beta)?;
        if g != 0 {
            entries.insert(beta.to_vec(), g);
        }
        Ok(())
    })?;
    Ok(ExpansionTable {
        beta_bound: bound,
        entries,
        distance_constant: distance_constant(h),
    })
}

/// `alpha . beta`: the monomial exponent the factor indexed by `beta` carries.
pub fn beta_monomial(h: &SparsePolynomial, beta: &[u32]) -> Vec<u32> {
    let nv = h.n() + 1;
    let mut lambda = vec![0u32; nv];
    for (t, &bj) in h.terms().iter().zip(beta) {
        for (l, &e) in lambda.iter_mut().zip(&t.exponent.0) {
            *l += e * bj;
        }
    }
    lambda
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub monomial: Vec<u32>,
    pub expected: BigInt,
    pub got: BigInt,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub pass: bool,
    pub degree_bound: u32,
    pub factors_used: usize,
    pub first_mismatch: Option<Mismatch>,
}

/// Expands the truncated product `prod (1 - X^{alpha.beta})^{gamma(beta)}` to
/// total degree `degree_bound` in exact integers and compares with `h`
/// term-by-term. Only `beta` whose monomial has degree within the bound
/// contribute.
pub fn verify_expansion(
    h: &SparsePolynomial,
    degree_bound: u32,
) -> Result<VerifyReport, CyclotomyError> {
    assert!(degree_bound >= 1);
    let degs: Vec<u32> = h
        .terms()
        .iter()
        .map(|t| t.exponent.total_degree())
        .collect();
    let r = h.r();
    // enumerate beta with sum beta_j * deg_j <= degree_bound
    let mut betas: Vec<Vec<u32>> = Vec::new();
    fn rec(
        buf: &mut Vec<u32>,
        slot: usize,
        left: u32,
        degs: &[u32],
        out: &mut Vec<Vec<u32>>,
    ) {
        if slot == degs.len() {
            if buf.iter().any(|&b| b > 0) {
                out.push(buf.clone());
            }
            return;
        }
        let dmax = left / degs[slot];
        for v in 0..=dmax {
            buf.push(v);
            rec(buf, slot + 1, left - v * degs[slot], degs, out);
            buf.pop();
        }
    }
    if r > 0 {
        let mut buf = Vec::with_capacity(r);
        rec(&mut buf, 0, degree_bound, &degs, &mut betas);
    }
    betas.sort_by_key(|b| (b.iter().sum::<u32>(), b.clone()));

    let mut product = IntSeries::one(h.n() + 1, degree_bound);
    let mut factors_used = 0;
    for beta in &betas {
        let g = gamma_exponent(h, beta)?;
        if g == 0 {
            continue;
        }
        let lambda = beta_monomial(h, beta);
        product = product.mul_binomial_power(&lambda, g);
        factors_used += 1;
    }
    let target = IntSeries::from_poly(h, degree_bound);
    let mut first_mismatch = None;
    let mut keys: Vec<&Expo> = product.coeffs.keys().chain(target.coeffs.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let got = product.coeff(k);
        let expected = target.coeff(k);
        if got != expected {
            first_mismatch = Some(Mismatch {
                monomial: k.clone(),
                expected,
                got,
            });
            break;
        }
    }
    Ok(VerifyReport {
        pass: first_mismatch.is_none(),
        degree_bound,
        factors_used,
        first_mismatch,
    })
}

/// All `beta` with `alpha . beta` equal to the target monomial (the fiber of
/// the beta-to-monomial map). Componentwise-pruned recursion, exact.
pub fn betas_with_monomial(h: &SparsePolynomial, target: &[u32]) -> Vec<Vec<u32>> {
    fn rec(
        h: &SparsePolynomial,
        slot: usize,
        remaining: &mut Vec<u32>,
        buf: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if slot == h.r() {
            if remaining.iter().all(|&x| x == 0) {
                out.push(buf.clone());
            }
            return;
        }
        let col = &h.terms()[slot].exponent.0;
        let mut times = 0u32;
        loop {
            buf.push(times);
            rec(h, slot + 1, remaining, buf, out);
            buf.pop();
            // try one more copy of this column
            if col
                .iter()
                .zip(remaining.iter())
                .all(|(&c, &rem)| c <= rem)
            {
                for (rem, &c) in remaining.iter_mut().zip(col) {
                    *rem -= c;
                }
                times += 1;
            } else {
                break;
            }
        }
        // restore
        for (rem, &c) in remaining.iter_mut().zip(col) {
            *rem += c * times;
        }
    }
    let mut out = Vec::new();
    let mut remaining = target.to_vec();
    let mut buf = Vec::with_capacity(h.r());
    rec(h, 0, &mut remaining, &mut buf, &mut out);
    out
}

/// Coefficient of `X^mu` in the formal `log h`, by the multinomial fiber sum
/// `sum_{alpha.b = mu} (-1)^{|b|+1} (|b|-1)!/(b_1!..b_r!) a^b`.
fn log_coeff_at(h: &SparsePolynomial, mu: &[u32]) -> BigRational {
    let coeffs = h.coefficients();
    let mut acc = BigRational::zero();
    for b in betas_with_monomial(h, mu) {
        if b.iter().all(|&x| x == 0) {
            continue;
        }
        let norm: u64 = b.iter().map(|&x| u64::from(x)).sum();
        let mut numer = factorial(norm - 1);
        if norm % 2 == 0 {
            numer = -numer;
        }
        let mut denom = BigInt::one();
        for &bj in &b {
            denom *= factorial(u64::from(bj));
        }
        let mut apow = BigInt::one();
        for (&aj, &bj) in coeffs.iter().zip(&b) {
            if bj > 0 {
                apow *= BigInt::from(aj).pow(bj);
            }
        }
        acc += BigRational::new(numer * apow, denom);
    }
    acc
}

/// Independent oracle for `gamma_exponent` through the formal logarithm:
/// log-coefficients along the ray of `alpha.beta`, Möbius inverted. Errors
/// with the aggregated value when distinct `beta` share the monomial (the
/// comparison then only makes sense at aggregated level).
pub fn gamma_log_oracle(h: &SparsePolynomial, beta: &[u32]) -> Result<i64, CyclotomyError> {
    assert_eq!(beta.len(), h.r());
    let lambda = beta_monomial(h, beta);
    let aggregated = aggregated_gamma_at(h, &lambda)?;
    if betas_with_monomial(h, &lambda).len() > 1 {
        return Err(CyclotomyError::AmbiguousAggregation {
            lambda,
            aggregated,
        });
    }
    Ok(aggregated)
}

/// Monomial-level exponent `Gamma(lambda) = sum_{alpha.beta = lambda} gamma(beta)`
/// computed from `log h` by Möbius inversion along the ray of `lambda`.
fn aggregated_gamma_at(h: &SparsePolynomial, lambda: &[u32]) -> Result<i64, CyclotomyError> {
    let lambda_deg: u32 = lambda.iter().sum();
    assert!(lambda_deg > 0);
    let prim = ExponentVector(lambda.to_vec()).primitive();
    let pivot = prim.0.iter().position(|&e| e != 0).unwrap();
    let t = u64::from(lambda[pivot] / prim.0[pivot]);
    let mut acc = BigRational::zero();
    for d in divisors(t) {
        let mu = mobius(t / d).expect("positive");
        if mu == 0 {
            continue;
        }
        let point: Vec<u32> = prim.0.iter().map(|&e| e * d as u32).collect();
        let c = log_coeff_at(h, &point);
        acc += BigRational::from_integer(BigInt::from(mu) * BigInt::from(d)) * c;
    }
    acc = -acc / BigRational::from_integer(BigInt::from(t));
    if !acc.is_integer() {
        return Err(CyclotomyError::NonIntegerGamma {
            beta: lambda.to_vec(),
        });
    }
    acc.to_integer()
        .to_i64()
        .ok_or(CyclotomyError::GammaOverflow {
            beta: lambda.to_vec(),
        })
}

/// Expansion of the e-th main part over `B_e` (the `beta` supported on
/// `Lambda_e`), computed from the reindexed main part itself; Lemma-level
/// consistency with the full table is a test invariant, not an assumption.
pub fn main_part_expansion(
    h: &SparsePolynomial,
    e: usize,
    bound: u32,
) -> Result<ExpansionTable, CyclotomyError> {
    let lambda_e = h.lambda(e);
    let mp = h.main_part(e);
    let tbl = expansion_table(&mp, bound)?;
    let mut entries = BTreeMap::new();
    for (small_beta, g) in tbl.entries {
        let mut full = vec![0u32; h.r()];
        for (i, &j) in lambda_e.iter().enumerate() {
            full[j] = small_beta[i];
        }
        entries.insert(full, g);
    }
    Ok(ExpansionTable {
        beta_bound: bound,
        entries,
        distance_constant: distance_constant(h),
    })
}

/// Certificate-bearing cyclotomicity verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum CyclotomyVerdict {
    /// The exact product of `(1 - X^lambda)^exponent` over the map equals `h`
    /// as a polynomial identity (verified before returning).
    Cyclotomic {
        factorization: BTreeMap<Vec<u32>, i64>,
    },
    NotCyclotomicCertified {
        witness: NonCyclotomicWitness,
    },
    UnknownUpToBound {
        beta_bound: u32,
        degree_bound: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonCyclotomicWitness {
    /// A root whose modulus is bounded away from 1.
    RootModulus { root: Complex64, modulus: f64 },
    /// A monomial substitution `X_l -> t^{k_l}` whose univariate image has
    /// such a root.
    Substitution {
        powers: Vec<u32>,
        root: Complex64,
        modulus: f64,
    },
}

const ROOT_MODULUS_PADDING: f64 = 1e-6;
/// Cap on reconstruction degree growth; beyond this the positive certificate
/// is abandoned rather than computed.
const RECONSTRUCTION_DEGREE_CAP: u64 = 600;

fn uni_log(f: &UnivariateIntPolynomial, bound: usize) -> Vec<BigRational> {
    // log f = sum_{k>=1} (-1)^{k+1} u^k / k with u = f - 1
    let mut u = vec![BigRational::zero(); bound + 1];
    for (i, &c) in f.coeffs.iter().enumerate().skip(1) {
        if i <= bound {
            u[i] = BigRational::from_integer(BigInt::from(c));
        }
    }
    let mut acc = vec![BigRational::zero(); bound + 1];
    let mut upow = u.clone();
    for k in 1..=bound {
        let sign = if k % 2 == 1 { 1i64 } else { -1 };
        let factor = BigRational::new(BigInt::from(sign), BigInt::from(k as u64));
        for (i, c) in upow.iter().enumerate() {
            if !c.is_zero() {
                acc[i] += c * &factor;
            }
        }
        if k < bound {
            // upow *= u, truncated
            let mut next = vec![BigRational::zero(); bound + 1];
            for (i, a) in upow.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in u.iter().enumerate() {
                    if i + j > bound {
                        break;
                    }
                    if !b.is_zero() {
                        next[i + j] += a * b;
                    }
                }
            }
            upow = next;
        }
    }
    acc
}

fn uni_mul_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn binomial_pow_big(m: usize, g: u32) -> Vec<BigInt> {
    // (1 - T^m)^g expanded exactly
    let mut acc = vec![BigInt::one()];
    let mut base = vec![BigInt::zero(); m + 1];
    base[0] = BigInt::one();
    base[m] = BigInt::from(-1);
    for _ in 0..g {
        acc = uni_mul_big(&acc, &base);
    }
    acc
}

fn trim_big(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().map_or(false, |x| x.is_zero()) {
        v.pop();
    }
    v
}

/// Largest d with Euler phi(d) <= v: the complete search bound for cyclotomic
/// support (any product of cyclotomic polynomials of degree <= v only involves
/// factors (1 - T^m) with m <= this bound).
fn max_d_with_phi_leq(v: u64) -> u64 {
    let mut best = 1;
    for d in 1..=(2 * v * v + 2) {
        if crate::arith::euler_phi(d).unwrap() <= v {
            best = d;
        }
    }
    best
}

/// Decides exactly whether `f` (with `f(0) = 1`) is a finite product
/// `prod (1 - T^m)^{gamma_m}`. The positive certificate is a Möbius-inverted
/// exponent table whose exact reconstruction equals `f`; the negative
/// certificate is a root of modulus bounded away from 1.
pub fn is_cyclotomic_univariate(f: &UnivariateIntPolynomial) -> CyclotomyVerdict {
    assert_eq!(f.coeffs.first(), Some(&1), "f(0) must be 1");
    if f.is_constant() {
        return CyclotomyVerdict::Cyclotomic {
            factorization: BTreeMap::new(),
        };
    }
    let degree = f.degree() as u64;
    let base_bound = (2 * degree).max(max_d_with_phi_leq(degree));
    for (attempt, bound) in [base_bound, 2 * base_bound].into_iter().enumerate() {
        if let Some(factorization) = try_univariate_reconstruction(f, bound as usize) {
            return CyclotomyVerdict::Cyclotomic { factorization };
        }
        // negative certificate: a root off the unit circle
        if attempt == 0 {
            let roots = int_polynomial_roots(&f.coeffs);
            for root in roots {
                let modulus = root.norm();
                if (modulus - 1.0).abs() > ROOT_MODULUS_PADDING {
                    return CyclotomyVerdict::NotCyclotomicCertified {
                        witness: NonCyclotomicWitness::RootModulus { root, modulus },
                    };
                }
            }
            // all moduli within padding of 1 but reconstruction failed:
            // escalate once before giving up
        }
    }
    CyclotomyVerdict::UnknownUpToBound {
        beta_bound: (2 * base_bound) as u32,
        degree_bound: (2 * base_bound) as u32,
    }
}

fn try_univariate_reconstruction(
    f: &UnivariateIntPolynomial,
    bound: usize,
) -> Option<BTreeMap<Vec<u32>, i64>> {
    let log = uni_log(f, bound);
    let mut gammas: BTreeMap<u64, i64> = BTreeMap::new();
    for m in 1..=bound as u64 {
        let mut acc = BigRational::zero();
        for d in divisors(m) {
            let mu = mobius(m / d).expect("positive");
            if mu == 0 {
                continue;
            }
            acc += BigRational::from_integer(BigInt::from(mu) * BigInt::from(d))
                * &log[d as usize];
        }
        acc = -acc / BigRational::from_integer(BigInt::from(m));
        if !acc.is_integer() {
            return None;
        }
        let g = acc.to_integer().to_i64()?;
        if g != 0 {
            gammas.insert(m, g);
        }
    }
    // guard against runaway reconstruction degree
    let pos_deg: u64 = gammas
        .iter()
        .filter(|(_, &g)| g > 0)
        .map(|(&m, &g)| m * g as u64)
        .sum();
    let neg_deg: u64 = gammas
        .iter()
        .filter(|(_, &g)| g < 0)
        .map(|(&m, &g)| m * (-g) as u64)
        .sum();
    if pos_deg > RECONSTRUCTION_DEGREE_CAP || neg_deg > RECONSTRUCTION_DEGREE_CAP {
        return None;
    }
    let mut lhs = vec![BigInt::one()];
    let mut rhs: Vec<BigInt> = f.coeffs.iter().map(|&c| BigInt::from(c)).collect();
    for (&m, &g) in &gammas {
        if g > 0 {
            lhs = uni_mul_big(&lhs, &binomial_pow_big(m as usize, g as u32));
        } else {
            rhs = uni_mul_big(&rhs, &binomial_pow_big(m as usize, (-g) as u32));
        }
    }
    if trim_big(lhs) != trim_big(rhs) {
        return None;
    }
    Some(
        gammas
            .into_iter()
            .map(|(m, g)| (vec![m as u32], g))
            .collect(),
    )
}

/// Monomial-level exponents `Gamma(lambda)` of `log h` over the slab of total
/// degree `<= degree_bound`. `None` marks a non-integer value on that ray.
pub fn aggregated_gamma_support(
    h: &SparsePolynomial,
    degree_bound: u32,
) -> BTreeMap<Vec<u32>, Option<i64>> {
    let log = log_series(h, degree_bound);
    let mut rays: Vec<ExponentVector> = log
        .coeffs
        .keys()
        .map(|e| ExponentVector(e.clone()).primitive())
        .collect();
    rays.sort();
    rays.dedup();
    let mut out = BTreeMap::new();
    for prim in rays {
        let d0 = prim.total_degree();
        if d0 == 0 {
            continue;
        }
        for t in 1..=(degree_bound / d0) as u64 {
            let lambda: Expo = prim.0.iter().map(|&e| e * t as u32).collect();
            let mut acc = BigRational::zero();
            for d in divisors(t) {
                let mu = mobius(t / d).expect("positive");
                if mu == 0 {
                    continue;
                }
                let point: Expo = prim.0.iter().map(|&e| e * d as u32).collect();
                acc += BigRational::from_integer(BigInt::from(mu) * BigInt::from(d))
                    * log.coeff(&point);
            }
            acc = -acc / BigRational::from_integer(BigInt::from(t));
            let value = if acc.is_integer() {
                acc.to_integer().to_i64()
            } else {
                None
            };
            match value {
                Some(0) => {}
                v => {
                    out.insert(lambda, v);
                }
            }
        }
    }
    out
}

/// Semi-decision of multivariate cyclotomicity with positive certificates both
/// ways. `beta_bound` caps the substitution-tuple height for the negative
/// route; `degree_bound` caps the Gamma-support slab for the positive route.
pub fn is_cyclotomic_multivariate(
    h: &SparsePolynomial,
    beta_bound: u32,
    degree_bound: u32,
) -> CyclotomyVerdict {
    assert!(beta_bound >= 1 && degree_bound >= 1);
    if h.is_one() {
        return CyclotomyVerdict::Cyclotomic {
            factorization: BTreeMap::new(),
        };
    }
    // positive route: integer Gamma support + exact reconstruction
    let support = aggregated_gamma_support(h, degree_bound);
    if support.values().all(|v| v.is_some()) {
        let gammas: BTreeMap<Vec<u32>, i64> = support
            .iter()
            .map(|(k, v)| (k.clone(), v.unwrap()))
            .collect();
        let pos_deg: u64 = gammas
            .iter()
            .filter(|(_, &g)| g > 0)
            .map(|(k, &g)| u64::from(k.iter().sum::<u32>()) * g as u64)
            .sum();
        let neg_deg: u64 = gammas
            .iter()
            .filter(|(_, &g)| g < 0)
            .map(|(k, &g)| u64::from(k.iter().sum::<u32>()) * (-g) as u64)
            .sum();
        if pos_deg <= RECONSTRUCTION_DEGREE_CAP && neg_deg <= RECONSTRUCTION_DEGREE_CAP {
            let mut lhs = ExactPoly::one(h.n() + 1);
            let mut rhs = ExactPoly::from_sparse(h);
            for (lambda, &g) in &gammas {
                if g > 0 {
                    lhs = lhs.mul_binomial(lambda, g as u32);
                } else {
                    rhs = rhs.mul_binomial(lambda, (-g) as u32);
                }
            }
            if lhs == rhs {
                return CyclotomyVerdict::Cyclotomic {
                    factorization: gammas,
                };
            }
        }
    }
    // negative route: monomial substitutions to one variable
    let nv = h.n() + 1;
    let height = beta_bound.min(3).max(1);
    let mut tuple = vec![1u32; nv];
    loop {
        if let Some(g) = substitute_powers(h, &tuple) {
            if let CyclotomyVerdict::NotCyclotomicCertified {
                witness: NonCyclotomicWitness::RootModulus { root, modulus },
            } = is_cyclotomic_univariate(&g)
            {
                return CyclotomyVerdict::NotCyclotomicCertified {
                    witness: NonCyclotomicWitness::Substitution {
                        powers: tuple.clone(),
                        root,
                        modulus,
                    },
                };
            }
        }
        // next tuple in {1..height}^nv, lexicographic
        let mut i = nv;
        loop {
            if i == 0 {
                return CyclotomyVerdict::UnknownUpToBound {
                    beta_bound,
                    degree_bound,
                };
            }
            i -= 1;
            if tuple[i] < height {
                tuple[i] += 1;
                for v in tuple.iter_mut().skip(i + 1) {
                    *v = 1;
                }
                break;
            }
        }
    }
}

/// `h(t^{k_1}, ..., t^{k_{n+1}})` as a univariate integer polynomial.
fn substitute_powers(h: &SparsePolynomial, powers: &[u32]) -> Option<UnivariateIntPolynomial> {
    let max_deg: u64 = h
        .terms()
        .iter()
        .map(|t| {
            t.exponent
                .0
                .iter()
                .zip(powers)
                .map(|(&e, &k)| u64::from(e) * u64::from(k))
                .sum()
        })
        .max()?;
    if max_deg > 10_000 {
        return None;
    }
    let mut coeffs = vec![0i64; max_deg as usize + 1];
    coeffs[0] = 1;
    for t in h.terms() {
        let d: u64 = t
            .exponent
            .0
            .iter()
            .zip(powers)
            .map(|(&e, &k)| u64::from(e) * u64::from(k))
            .sum();
        coeffs[d as usize] = coeffs[d as usize].checked_add(t.coeff)?;
    }
    Some(UnivariateIntPolynomial::new(coeffs))
}

/// Exact division of `h` by `(1 - X^lambda)`; `None` when it does not divide.
fn divide_by_binomial(h: &SparsePolynomial, lambda: &[u32]) -> Option<SparsePolynomial> {
    let nv = h.n() + 1;
    let mut rem: BTreeMap<(u32, Expo), i128> = BTreeMap::new();
    rem.insert((0, vec![0u32; nv]), 1);
    for t in h.terms() {
        rem.insert(
            (t.exponent.total_degree(), t.exponent.0.clone()),
            i128::from(t.coeff),
        );
    }
    let mut quotient: BTreeMap<Expo, i128> = BTreeMap::new();
    let lambda_deg: u32 = lambda.iter().sum();
    loop {
        // leading term under graded lex
        let Some(((deg, expo), &coeff)) = rem.iter().next_back().map(|(k, v)| (k.clone(), v))
        else {
            break;
        };
        if deg < lambda_deg {
            // every remaining monomial is below lambda: divisible only if the
            // remainder is exactly the constant... which cannot happen since
            // the quotient would have reproduced it; treat any leftover as failure
            // unless the remainder is empty.
            return None;
        }
        if expo.iter().zip(lambda).any(|(&e, &l)| e < l) {
            return None;
        }
        let q_expo: Expo = expo.iter().zip(lambda).map(|(&e, &l)| e - l).collect();
        // t = -coeff X^{q_expo}; subtract t * (1 - X^lambda) = -coeff X^{q_expo} + coeff X^{expo}
        *quotient.entry(q_expo.clone()).or_insert(0) += -coeff;
        rem.remove(&(deg, expo));
        let q_deg: u32 = q_expo.iter().sum();
        let key = (q_deg, q_expo);
        let updated = rem.get(&key).copied().unwrap_or(0) + coeff;
        if updated == 0 {
            rem.remove(&key);
        } else {
            rem.insert(key, updated);
        }
        if rem.is_empty() {
            // success: assemble the quotient
            quotient.retain(|_, v| *v != 0);
            let constant = quotient.remove(&vec![0u32; nv]).unwrap_or(0);
            if constant != 1 {
                return None;
            }
            let mut terms = Vec::new();
            for (e, c) in quotient {
                let coeff = i64::try_from(c).ok()?;
                terms.push(Term {
                    coeff,
                    exponent: ExponentVector(e),
                });
            }
            return SparsePolynomial::new(h.n(), terms).ok();
        }
    }
    None
}

/// Repeatedly divides out binomial factors `(1 - X^lambda)` drawn from the
/// Gamma-support of `log h` until none divides. Returns the quotient and the
/// multiplicity map of removed factors.
pub fn remove_cyclotomic_factors(
    h: &SparsePolynomial,
) -> (SparsePolynomial, BTreeMap<ExponentVector, u32>) {
    let mut current = h.clone();
    let mut removed: BTreeMap<ExponentVector, u32> = BTreeMap::new();
    'outer: loop {
        if current.is_one() {
            break;
        }
        let slab = 2 * current.max_total_degree().max(1);
        let support = aggregated_gamma_support(&current, slab);
        for (lambda, value) in &support {
            if value.is_none() || value == &Some(0) {
                continue;
            }
            if let Some(quotient) = divide_by_binomial(&current, lambda) {
                *removed.entry(ExponentVector(lambda.clone())).or_insert(0) += 1;
                current = quotient;
                continue 'outer;
            }
        }
        break;
    }
    (current, removed)
}
