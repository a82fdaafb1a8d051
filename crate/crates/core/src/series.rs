//! Truncated multivariate power series with exact coefficients, used for the
//! formal-log exponent oracle and for expansion verification. Coefficient maps
//! are BTreeMaps so iteration order is deterministic.

use crate::poly::SparsePolynomial;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type Expo = Vec<u32>;

fn deg(e: &Expo) -> u32 {
    e.iter().sum()
}

/// Series over BigRational, truncated at a total degree.
#[derive(Debug, Clone)]
pub struct RatSeries {
    pub nvars: usize,
    pub max_deg: u32,
    pub coeffs: BTreeMap<Expo, BigRational>,
}

impl RatSeries {
    pub fn zero(nvars: usize, max_deg: u32) -> Self {
        RatSeries {
            nvars,
            max_deg,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, e: Expo, c: BigRational) {
        if c.is_zero() || deg(&e) > self.max_deg {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn mul(&self, other: &RatSeries) -> RatSeries {
        let mut out = RatSeries::zero(self.nvars, self.max_deg);
        for (ea, ca) in &self.coeffs {
            let da = deg(ea);
            for (eb, cb) in &other.coeffs {
                if da + deg(eb) > self.max_deg {
                    continue;
                }
                let e: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn coeff(&self, e: &Expo) -> BigRational {
        self.coeffs.get(e).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Formal `log h` truncated at total degree `max_deg`, exact rationals.
/// `log(1+u) = sum_{k>=1} (-1)^{k+1} u^k / k` with `u = h - 1` of valuation >= 1.
pub fn log_series(h: &SparsePolynomial, max_deg: u32) -> RatSeries {
    let nvars = h.n() + 1;
    let mut u = RatSeries::zero(nvars, max_deg);
    for t in h.terms() {
        u.add_term(
            t.exponent.0.clone(),
            BigRational::from_integer(BigInt::from(t.coeff)),
        );
    }
    let mut acc = RatSeries::zero(nvars, max_deg);
    let mut upow = u.clone();
    let mut k = 1u32;
    while k <= max_deg && !upow.coeffs.is_empty() {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let factor = BigRational::new(BigInt::from(sign), BigInt::from(k));
        for (e, c) in &upow.coeffs {
            acc.add_term(e.clone(), c * &factor);
        }
        k += 1;
        if k <= max_deg {
            upow = upow.mul(&u);
        }
    }
    acc
}

/// Series over BigInt, truncated at a total degree. Used where the arithmetic
/// must stay an identity check in Z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSeries {
    pub nvars: usize,
    pub max_deg: u32,
    pub coeffs: BTreeMap<Expo, BigInt>,
}

impl IntSeries {
    pub fn one(nvars: usize, max_deg: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0u32; nvars], BigInt::one());
        IntSeries {
            nvars,
            max_deg,
            coeffs,
        }
    }

    pub fn from_poly(h: &SparsePolynomial, max_deg: u32) -> Self {
        let mut s = IntSeries::one(h.n() + 1, max_deg);
        for t in h.terms() {
            if deg(&t.exponent.0) <= max_deg {
                s.coeffs.insert(t.exponent.0.clone(), BigInt::from(t.coeff));
            }
        }
        s
    }

    pub fn mul(&self, other: &IntSeries) -> IntSeries {
        let mut coeffs: BTreeMap<Expo, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            let da = deg(ea);
            for (eb, cb) in &other.coeffs {
                if da + deg(eb) > self.max_deg {
                    continue;
                }
                let e: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = coeffs.entry(e).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        IntSeries {
            nvars: self.nvars,
            max_deg: self.max_deg,
            coeffs,
        }
    }

    /// Multiply by `(1 - X^lambda)^gamma` for integer `gamma` of either sign,
    /// truncated. Negative exponents use the binomial series for
    /// `(1-Y)^{-g} = sum_i C(g-1+i, i) Y^i`.
    pub fn mul_binomial_power(&self, lambda: &Expo, gamma: i64) -> IntSeries {
        if gamma == 0 {
            return self.clone();
        }
        let step = deg(lambda);
        debug_assert!(step > 0);
        let kmax = (self.max_deg / step) as i64;
        let mut factor = IntSeries::one(self.nvars, self.max_deg);
        factor.coeffs.clear();
        let mut c = BigInt::one();
        if gamma > 0 {
            // (1 - Y)^g = sum_i C(g, i) (-Y)^i
            for i in 0..=gamma.min(kmax) {
                let e: Expo = lambda.iter().map(|&x| x * i as u32).collect();
                let signed = if i % 2 == 0 { c.clone() } else { -c.clone() };
                factor.coeffs.insert(e, signed);
                // C(g, i+1) = C(g, i) * (g - i) / (i + 1)
                c = c * BigInt::from(gamma - i) / BigInt::from(i + 1);
            }
        } else {
            let g = -gamma;
            // (1 - Y)^{-g} = sum_i C(g - 1 + i, i) Y^i
            for i in 0..=kmax {
                let e: Expo = lambda.iter().map(|&x| x * i as u32).collect();
                factor.coeffs.insert(e, c.clone());
                c = c * BigInt::from(g + i) / BigInt::from(i + 1);
            }
        }
        self.mul(&factor)
    }

    pub fn coeff(&self, e: &Expo) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// Exact (untruncated) multivariate polynomial over BigInt, for reconstruction
/// identity checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPoly {
    pub nvars: usize,
    pub coeffs: BTreeMap<Expo, BigInt>,
}

impl ExactPoly {
    pub fn one(nvars: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0u32; nvars], BigInt::one());
        ExactPoly { nvars, coeffs }
    }

    pub fn from_sparse(h: &SparsePolynomial) -> Self {
        let mut p = ExactPoly::one(h.n() + 1);
        for t in h.terms() {
            p.coeffs.insert(t.exponent.0.clone(), BigInt::from(t.coeff));
        }
        p
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        let mut coeffs: BTreeMap<Expo, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = coeffs.entry(e).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        ExactPoly {
            nvars: self.nvars,
            coeffs,
        }
    }

    /// Multiply by `(1 - X^lambda)^times` with `times > 0`, exactly.
    pub fn mul_binomial(&self, lambda: &Expo, times: u32) -> ExactPoly {
        let mut factor = ExactPoly::one(self.nvars);
        factor
            .coeffs
            .insert(lambda.clone(), BigInt::from(-1));
        let mut out = self.clone();
        for _ in 0..times {
            out = out.mul(&factor);
        }
        out
    }
}
