//! The Igusa zeta function of `Z[T, 1/T]`: its polynomial, closed-form Euler
//! factors, partial sums through sieved totients, the factored global product,
//! and the boundary polytope in the s-coordinates.

use crate::arith::{self, totient_sieve, zeta, ZetaError};
use crate::geometry::{HalfspaceRow, HalfspaceSystem};
use crate::linalg::rat;
use crate::poly::{ExponentVector, SparsePolynomial, Term};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IgusaError {
    #[error("n must be at least 2, got {0}")]
    InvalidN(usize),
    #[error("geometric series degenerates: p^(1 - s_{index}) = 1")]
    DegenerateGeometricSeries { index: usize },
    #[error("partial sum needs {points} lattice points, over the budget {budget}")]
    ResourceGuard { points: u128, budget: u128 },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Default cap on `M^n` for partial sums (sieve memory and loop length).
pub const PARTIAL_SUM_BUDGET: u128 = 50_000_000;

/// The polynomial `1 + sum_{nonempty I} (-1)^{#I} (prod_{i in I} X_i) X_{n+1}`
/// whose pseudo-uniform Euler product is the Igusa zeta function after the
/// shift `w = s - 1`.
pub fn igusa_h(n: usize) -> Result<SparsePolynomial, IgusaError> {
    if n < 2 {
        return Err(IgusaError::InvalidN(n));
    }
    let mut terms = Vec::new();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones();
        let mut expo = vec![0u32; n + 1];
        for i in 0..n {
            if mask & (1 << i) != 0 {
                expo[i] = 1;
            }
        }
        expo[n] = 1;
        let coeff = if size % 2 == 0 { 1 } else { -1 };
        terms.push(Term {
            coeff,
            exponent: ExponentVector(expo),
        });
    }
    Ok(SparsePolynomial::new(n, terms).expect("construction is valid"))
}

/// Closed-form local factor `1 + (prod_i (1 - p^{-(s_i-1)})^{-1} - 1)(1 - 1/p)`.
pub fn igusa_local_factor(p: u64, s: &[Complex64]) -> Result<Complex64, IgusaError> {
    let pf = p as f64;
    let mut prod_inv = Complex64::new(1.0, 0.0);
    for (i, &si) in s.iter().enumerate() {
        let factor = 1.0 - arith::pow_neg(pf, si - 1.0);
        if factor.norm() < 1e-12 {
            return Err(IgusaError::DegenerateGeometricSeries { index: i });
        }
        prod_inv /= factor;
    }
    Ok(1.0 + (prod_inv - 1.0) * (1.0 - 1.0 / pf))
}

/// Truncated double-sum oracle for the local factor:
/// `sum_{nu in N^n, |nu| <= cutoff} phi(p^{|nu|}) p^{-s.nu}`.
pub fn igusa_local_factor_series(p: u64, s: &[Complex64], cutoff: u32) -> Complex64 {
    let pf = p as f64;
    let n = s.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut nu = vec![0u32; n];
    loop {
        let norm: u32 = nu.iter().sum();
        if norm <= cutoff {
            let phi = if norm == 0 {
                1.0
            } else {
                pf.powi(norm as i32) * (1.0 - 1.0 / pf)
            };
            let mut term = Complex64::new(phi, 0.0);
            for (&si, &ni) in s.iter().zip(&nu) {
                if ni > 0 {
                    term *= arith::pow_neg(pf, si * f64::from(ni));
                }
            }
            acc += term;
        }
        // odometer over {0..cutoff}^n
        let mut i = 0;
        loop {
            if i == n {
                return acc;
            }
            if nu[i] < cutoff {
                nu[i] += 1;
                for v in nu.iter_mut().take(i) {
                    *v = 0;
                }
                break;
            }
            i += 1;
        }
    }
}

/// Exact truncated Dirichlet sum `sum_{m in [1,M]^n} phi(m_1..m_n) prod m_i^{-s_i}`
/// with a linear totient sieve over products.
pub fn igusa_partial_sum(s: &[Complex64], m: u64) -> Result<Complex64, IgusaError> {
    igusa_partial_sum_with_budget(s, m, PARTIAL_SUM_BUDGET)
}

pub fn igusa_partial_sum_with_budget(
    s: &[Complex64],
    m: u64,
    budget: u128,
) -> Result<Complex64, IgusaError> {
    assert!(m >= 1);
    let n = s.len();
    let points = (m as u128).pow(n as u32);
    if points > budget {
        return Err(IgusaError::ResourceGuard { points, budget });
    }
    let phi = totient_sieve(points as usize);
    // per-coordinate power tables
    let pows: Vec<Vec<Complex64>> = s
        .iter()
        .map(|&si| {
            let mut v = Vec::with_capacity(m as usize + 1);
            v.push(Complex64::new(0.0, 0.0)); // unused slot 0
            for k in 1..=m {
                v.push(arith::pow_neg(k as f64, si));
            }
            v
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut index = vec![1u64; n];
    loop {
        let product: u64 = index.iter().product();
        let mut term = Complex64::new(f64::from(phi[product as usize]), 0.0);
        for (pow, &mi) in pows.iter().zip(&index) {
            term *= pow[mi as usize];
        }
        acc += term;
        let mut i = 0;
        loop {
            if i == n {
                return Ok(acc);
            }
            if index[i] < m {
                index[i] += 1;
                for v in index.iter_mut().take(i) {
                    *v = 1;
                }
                break;
            }
            i += 1;
        }
    }
}

/// The factored global value `prod_i zeta(s_i - 1) * prod_{p <= P} (1 - 1/p +
/// (1/p) prod_i (1 - p^{-(s_i-1)}))`.
pub fn igusa_product_value(s: &[Complex64], prime_cutoff: u64) -> Result<Complex64, IgusaError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &si in s {
        acc *= zeta(si - 1.0)?;
    }
    for p in arith::primes_up_to(prime_cutoff) {
        let pf = p as f64;
        let mut prod = Complex64::new(1.0, 0.0);
        for &si in s {
            prod *= 1.0 - arith::pow_neg(pf, si - 1.0);
        }
        acc *= 1.0 - 1.0 / pf + prod / pf;
    }
    Ok(acc)
}

/// The maximal-meromorphy polytope in s-coordinates: one strict row
/// `sum_{i in I} sigma_i > -1 + #I` per nonempty subset I.
pub fn igusa_boundary(n: usize) -> Result<HalfspaceSystem, IgusaError> {
    if n < 2 {
        return Err(IgusaError::InvalidN(n));
    }
    let mut rows = Vec::new();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as i64;
        let normal: Vec<i64> = (0..n)
            .map(|i| i64::from(mask & (1 << i) != 0))
            .collect();
        rows.push(HalfspaceRow {
            normal,
            offset: rat(1 - size),
        });
    }
    Ok(HalfspaceSystem { n, rows })
}

/// Structural check: the boundary polytope equals the `W_c(0)` system of
/// `(igusa_h(n), c = 1)` translated by +1 in every s-coordinate, as exact
/// normalized row sets.
pub fn igusa_consistency(n: usize) -> Result<bool, IgusaError> {
    let boundary = igusa_boundary(n)?;
    let h = igusa_h(n)?;
    let w_system = HalfspaceSystem::w_c_system(&h, 1, &rat(0));
    let shifted = w_system.translate(&vec![1i64; n]);
    Ok(shifted.normalized_rows() == boundary.normalized_rows())
}

/// Instance record for reporting.
#[derive(Debug, Clone)]
pub struct IgusaInstance {
    pub n: usize,
    pub h: SparsePolynomial,
    pub boundary: HalfspaceSystem,
}

impl IgusaInstance {
    pub fn new(n: usize) -> Result<Self, IgusaError> {
        Ok(IgusaInstance {
            n,
            h: igusa_h(n)?,
            boundary: igusa_boundary(n)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn igusa_h_small() {
        assert_eq!(igusa_h(1), Err(IgusaError::InvalidN(1)));
        let h2 = igusa_h(2).unwrap();
        assert_eq!(h2.render(), "1 - X2*X3 - X1*X3 + X1*X2*X3");
        let h3 = igusa_h(3).unwrap();
        assert_eq!(h3.r(), 7);
        let full = h3.term_index(&[1, 1, 1, 1]).unwrap();
        assert_eq!(h3.terms()[full].coeff, -1);
    }

    #[test]
    fn igusa_h_evaluation_identity() {
        // h(p^{-w}, p^{-1}) = 1 - 1/p + (1/p) prod_i (1 - p^{-w_i})
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3] {
            let h = igusa_h(n).unwrap();
            for _ in 0..20 {
                let p: f64 = [2.0, 3.0, 101.0][rng.gen_range(0..3)];
                let w: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let mut x: Vec<Complex64> =
                    w.iter().map(|&wi| arith::pow_neg(p, wi)).collect();
                x.push(Complex64::new(1.0 / p, 0.0));
                let lhs = h.evaluate(&x);
                let mut prod = Complex64::new(1.0, 0.0);
                for &wi in &w {
                    prod *= 1.0 - arith::pow_neg(p, wi);
                }
                let rhs = 1.0 - 1.0 / p + prod / p;
                assert!((lhs - rhs).norm() < 1e-12, "n={n} p={p} w={w:?}");
            }
        }
    }

    #[test]
    fn local_factor_closed_form() {
        // p = 2, s = (3,3): 1 + (16/9 - 1)(1/2) = 25/18
        let s = [Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)];
        let v = igusa_local_factor(2, &s).unwrap();
        assert!((v.re - 25.0 / 18.0).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn local_factor_against_series() {
        let s = [Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)];
        for p in [2u64, 3, 5] {
            let closed = igusa_local_factor(p, &s).unwrap();
            let series = igusa_local_factor_series(p, &s, 40);
            assert!(
                (closed - series).norm() < 1e-12,
                "p = {p}: {:e}",
                (closed - series).norm()
            );
        }
    }

    #[test]
    fn local_factor_degenerate() {
        let s = [Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)];
        assert_eq!(
            igusa_local_factor(2, &s),
            Err(IgusaError::DegenerateGeometricSeries { index: 0 })
        );
    }

    #[test]
    fn partial_sum_small() {
        let s = [Complex64::new(4.0, 0.0), Complex64::new(4.0, 0.0)];
        let v = igusa_partial_sum(&s, 1).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        // M = 2: 1 + 1/16 + 1/16 + 2/256
        let v = igusa_partial_sum(&s, 2).unwrap();
        assert!((v.re - 1.1328125).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn partial_sum_monotone_for_real_s() {
        let s = [Complex64::new(4.0, 0.0), Complex64::new(4.0, 0.0)];
        let mut last = 0.0;
        for m in [1u64, 2, 4, 8, 16] {
            let v = igusa_partial_sum(&s, m).unwrap().re;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn partial_sum_budget() {
        let s = [Complex64::new(4.0, 0.0); 3];
        assert!(matches!(
            igusa_partial_sum_with_budget(&s, 10_000, 1_000_000),
            Err(IgusaError::ResourceGuard { .. })
        ));
    }

    #[test]
    fn product_value_empty_residual() {
        // P = 1: no primes, value is zeta(3)^2
        let s = [Complex64::new(4.0, 0.0), Complex64::new(4.0, 0.0)];
        let v = igusa_product_value(&s, 1).unwrap();
        let z3 = zeta(Complex64::new(3.0, 0.0)).unwrap();
        assert!((v - z3 * z3).norm() < 1e-13);
    }

    #[test]
    fn residual_factor_tends_to_one() {
        let s = [Complex64::new(4.0, 0.0), Complex64::new(4.0, 0.0)];
        for p in [101u64, 1009, 9973] {
            let pf = p as f64;
            let mut prod = Complex64::new(1.0, 0.0);
            for &si in &s {
                prod *= 1.0 - arith::pow_neg(pf, si - 1.0);
            }
            let factor = 1.0 - 1.0 / pf + prod / pf;
            assert!((factor - 1.0).norm() < 10.0 * pf.powi(-4));
        }
    }

    #[test]
    fn boundary_membership() {
        let b = igusa_boundary(2).unwrap();
        assert!(b.contains(&[0.7, 0.7]));
        assert!(!b.contains(&[0.4, 0.5]));
        assert_eq!(b.rows.len(), 3);
    }

    #[test]
    fn consistency_small_n() {
        assert!(igusa_consistency(2).unwrap());
        assert!(igusa_consistency(3).unwrap());
    }

    #[test]
    fn consistency_detects_corruption() {
        let boundary = igusa_boundary(2).unwrap();
        let h = igusa_h(2).unwrap();
        let w_system = HalfspaceSystem::w_c_system(&h, 1, &rat(0));
        let mut shifted = w_system.translate(&[1, 1]);
        shifted.rows[0].offset += rat(1);
        assert_ne!(shifted.normalized_rows(), boundary.normalized_rows());
    }
}
