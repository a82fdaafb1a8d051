//! Numerical meromorphic continuation of the Euler product: direct products
//! in the convergence region, the truncated sieved-zeta-product formula in
//! `W_c(delta)` with a stagnation-certified beta truncation, and the singular
//! candidate points `t(beta, rho)`.

use crate::arith::{self, zeta_sieved_with, ZetaError, ZetaZeroTable};
use crate::cyclotomy::{self, distance_constant, CyclotomyError};
use crate::geometry::rational_to_f64;
use crate::poly::SparsePolynomial;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ContinuationError {
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("point outside W_c(delta): column {column} has margin {margin}")]
    OutsideDomain { column: usize, margin: f64 },
    #[error("argument at beta={beta:?} is {distance:e} from the zeta {rho}")]
    NearSingularity {
        beta: Vec<u32>,
        rho: String,
        distance: f64,
    },
    #[error("beta tail did not stagnate by |beta| = {reached}")]
    TailNotStagnant { reached: u32 },
    #[error(transparent)]
    Cyclotomy(#[from] CyclotomyError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Evaluation context for the Theorem-3.2-style continuation.
#[derive(Debug, Clone)]
pub struct ContinuationContext {
    pub delta: f64,
    pub tail_tolerance: f64,
    /// Hard ceiling for the stagnation search.
    pub max_beta_bound: u32,
    pub zeros: ZetaZeroTable,
}

impl Default for ContinuationContext {
    fn default() -> Self {
        ContinuationContext {
            delta: 1.0,
            tail_tolerance: 1e-9,
            max_beta_bound: 60,
            zeros: ZetaZeroTable::bundled(),
        }
    }
}

/// `M_delta = floor(C^{-1/delta}) + 1`, with a round-to-nearest guard so exact
/// powers survive the f64 detour.
pub fn m_delta(c: &BigRational, delta: f64) -> Result<u64, ContinuationError> {
    if delta <= 0.0 {
        return Err(ContinuationError::InvalidDelta(delta));
    }
    assert!(c.is_positive() && *c <= BigRational::from_integer(1.into()));
    let inv_c = c.recip().to_f64().expect("rational fits in f64");
    let x = inv_c.powf(1.0 / delta);
    let snapped = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x
    };
    Ok(snapped.floor() as u64 + 1)
}

/// Value of a finite Euler product with bookkeeping.
#[derive(Debug, Clone)]
pub struct EulerProductValue {
    pub value: Complex64,
    pub primes_used: usize,
    /// Set when the point is not visibly inside the absolute-convergence
    /// region `W_c(1)` (the value is still the finite product).
    pub convergence_warning: Option<String>,
}

/// `prod_{p <= cutoff} h(p^{-s_1}, ..., p^{-s_n}, p^{-c})`, increasing primes.
pub fn direct_euler_product(
    h: &SparsePolynomial,
    c: i64,
    s: &[Complex64],
    prime_cutoff: u64,
) -> EulerProductValue {
    assert_eq!(s.len(), h.n());
    let sigma: Vec<f64> = s.iter().map(|z| z.re).collect();
    let convergence_warning = h
        .terms()
        .iter()
        .enumerate()
        .find_map(|(j, t)| {
            let dot: f64 = t
                .exponent
                .prefix()
                .iter()
                .zip(&sigma)
                .map(|(&a, &x)| a as f64 * x)
                .sum();
            let margin = dot + (c * i64::from(t.exponent.last_entry())) as f64;
            (margin <= 1.0)
                .then(|| format!("column {j} has margin {margin} <= 1: outside W_c(1)"))
        });
    let primes = arith::primes_up_to(prime_cutoff);
    let mut value = Complex64::new(1.0, 0.0);
    for &p in &primes {
        let pf = p as f64;
        let mut x: Vec<Complex64> = s.iter().map(|&si| arith::pow_neg(pf, si)).collect();
        x.push(arith::pow_neg(pf, Complex64::new(c as f64, 0.0)));
        value *= h.evaluate(&x);
    }
    EulerProductValue {
        value,
        primes_used: primes.len(),
        convergence_warning,
    }
}

#[derive(Debug, Clone)]
pub struct StagnationEntry {
    pub beta_norm: u32,
    pub movement: f64,
    pub nonzero_gammas: usize,
}

/// Continuation result with its certificates.
#[derive(Debug, Clone)]
pub struct ContinuedValue {
    pub value: Complex64,
    pub m_delta: u64,
    /// Stagnation-certified truncation bound.
    pub beta_bound: u32,
    pub stagnation: Vec<StagnationEntry>,
    /// Closest approach of any argument to a pole/zero of zeta (diagnostic).
    pub nearest_singularity: Option<(Vec<u32>, String, f64)>,
}

const SINGULARITY_GUARD: f64 = 1e-6;
/// Consecutive quiet shells needed to certify the tail.
pub const STAGNATION_RUN: u32 = 3;

/// Theorem-3.2-style evaluation:
/// `prod_{p <= M_delta} h(..) * prod_{|beta| <= B} zeta_{M_delta}(s.alpha.beta)^{-gamma(beta)}`
/// with `B` certified by tail stagnation: three consecutive shells each moving
/// the log-value by less than `tail_tolerance / 10`. Factors accumulate in a
/// fixed order (increasing shell, then lexicographic beta), so results are
/// reproducible run to run.
pub fn continued_value(
    h: &SparsePolynomial,
    c: i64,
    s: &[Complex64],
    ctx: &ContinuationContext,
) -> Result<ContinuedValue, ContinuationError> {
    assert_eq!(s.len(), h.n());
    if ctx.delta <= 0.0 {
        return Err(ContinuationError::InvalidDelta(ctx.delta));
    }
    for (j, t) in h.terms().iter().enumerate() {
        let dot: f64 = t
            .exponent
            .prefix()
            .iter()
            .zip(s)
            .map(|(&a, z)| a as f64 * z.re)
            .sum();
        let margin = dot + (c * i64::from(t.exponent.last_entry())) as f64;
        if margin <= ctx.delta {
            return Err(ContinuationError::OutsideDomain { column: j, margin });
        }
    }
    let cst = distance_constant(h);
    let m = m_delta(&cst, ctx.delta)?;
    let primes = arith::primes_up_to(m);
    let mut value = Complex64::new(1.0, 0.0);
    for &p in &primes {
        let pf = p as f64;
        let mut x: Vec<Complex64> = s.iter().map(|&si| arith::pow_neg(pf, si)).collect();
        x.push(arith::pow_neg(pf, Complex64::new(c as f64, 0.0)));
        value *= h.evaluate(&x);
    }
    let pairings: Vec<Complex64> = h
        .terms()
        .iter()
        .map(|t| {
            let mut z = Complex64::new((c * i64::from(t.exponent.last_entry())) as f64, 0.0);
            for (&a, si) in t.exponent.prefix().iter().zip(s) {
                z += a as f64 * si;
            }
            z
        })
        .collect();
    let mut stagnation = Vec::new();
    let mut quiet_run = 0u32;
    let mut certified: Option<u32> = None;
    let mut nearest: Option<(Vec<u32>, String, f64)> = None;
    let threshold = ctx.tail_tolerance / 10.0;
    for shell in 1..=ctx.max_beta_bound {
        let mut movement = 0.0f64;
        let mut nonzero = 0usize;
        let mut err: Option<ContinuationError> = None;
        cyclotomy::for_each_beta_with_norm(h.r(), shell, |beta| {
            if err.is_some() {
                return;
            }
            let gamma = match cyclotomy::gamma_exponent(h, beta) {
                Ok(g) => g,
                Err(e) => {
                    err = Some(e.into());
                    return;
                }
            };
            if gamma == 0 {
                return;
            }
            nonzero += 1;
            let mut z = Complex64::new(0.0, 0.0);
            for (&b, pairing) in beta.iter().zip(&pairings) {
                z += b as f64 * pairing;
            }
            let pole_dist = (z - Complex64::new(1.0, 0.0)).norm();
            let mut best = (String::from("pole"), pole_dist);
            for &ord in &ctx.zeros.ordinates {
                for sign in [1.0f64, -1.0] {
                    let d = (z - Complex64::new(0.5, sign * ord)).norm();
                    if d < best.1 {
                        best = (
                            format!("zero@1/2{}{}i", if sign > 0.0 { "+" } else { "-" }, ord),
                            d,
                        );
                    }
                }
            }
            if nearest.as_ref().map_or(true, |(_, _, d)| best.1 < *d) {
                nearest = Some((beta.to_vec(), best.0.clone(), best.1));
            }
            if best.1 < SINGULARITY_GUARD {
                err = Some(ContinuationError::NearSingularity {
                    beta: beta.to_vec(),
                    rho: best.0,
                    distance: best.1,
                });
                return;
            }
            let zeta_m = match zeta_sieved_with(z, &primes) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e.into());
                    return;
                }
            };
            let exponent = i32::try_from(-gamma).unwrap_or(i32::MAX);
            value *= zeta_m.powi(exponent);
            movement += gamma.unsigned_abs() as f64 * zeta_m.ln().norm();
        });
        if let Some(e) = err {
            return Err(e);
        }
        stagnation.push(StagnationEntry {
            beta_norm: shell,
            movement,
            nonzero_gammas: nonzero,
        });
        if movement < threshold {
            quiet_run += 1;
            if quiet_run >= STAGNATION_RUN {
                certified = Some(shell);
                break;
            }
        } else {
            quiet_run = 0;
        }
    }
    let beta_bound = certified.ok_or(ContinuationError::TailNotStagnant {
        reached: ctx.max_beta_bound,
    })?;
    Ok(ContinuedValue {
        value,
        m_delta: m,
        beta_bound,
        stagnation,
        nearest_singularity: nearest,
    })
}

/// A candidate zero/pole location `t(beta, rho)` along the ray through the
/// base point in direction theta.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub beta: Vec<u32>,
    pub rho: RhoPoint,
    pub t: Complex64,
}

/// A pole or tabulated zero of zeta feeding the candidate machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoPoint {
    Pole,
    /// `1/2 + sign * i * ordinate`; the 1/2 locates candidates, nothing more.
    Zero { ordinate: f64, sign: i8 },
}

impl RhoPoint {
    pub fn value(&self) -> Complex64 {
        match self {
            RhoPoint::Pole => Complex64::new(1.0, 0.0),
            RhoPoint::Zero { ordinate, sign } => {
                Complex64::new(0.5, f64::from(*sign) * ordinate)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            RhoPoint::Pole => "pole".to_string(),
            RhoPoint::Zero { ordinate, sign } => {
                format!("zero@1/2{}{}i", if *sign > 0 { "+" } else { "-" }, ordinate)
            }
        }
    }
}

/// All `t(beta, rho) = (rho - sum beta_j s0.alpha_j) / (sum beta_j theta.alpha_(n)j)`
/// with `|beta| <= beta_bound`, `gamma(beta) != 0`, filtered to `Re t >= 0`.
/// Exploits the finiteness of the admissible index set: beta whose off-face
/// sigma mass reaches 1 cannot give `Re t > 0` and is pruned outright.
pub fn singular_candidates(
    h: &SparsePolynomial,
    c: i64,
    sigma0: &[BigRational],
    tau0: &[f64],
    theta: &[i64],
    beta_bound: u32,
    zeros: &ZetaZeroTable,
) -> Result<Vec<Candidate>, ContinuationError> {
    assert_eq!(sigma0.len(), h.n() + 1);
    assert_eq!(tau0.len(), h.n() + 1);
    assert_eq!(theta.len(), h.n());
    debug_assert_eq!(
        sigma0.last().map(rational_to_f64),
        Some(c as f64),
        "sigma0 last entry is c"
    );
    let sigma_pairings: Vec<BigRational> = h
        .terms()
        .iter()
        .map(|t| {
            let mut acc = BigRational::zero();
            for (&a, x) in t.exponent.0.iter().zip(sigma0) {
                acc += BigRational::from_integer(i64::from(a).into()) * x;
            }
            acc
        })
        .collect();
    let tau_pairings: Vec<f64> = h
        .terms()
        .iter()
        .map(|t| {
            t.exponent
                .prefix()
                .iter()
                .zip(tau0)
                .map(|(&a, &x)| a as f64 * x)
                .sum()
        })
        .collect();
    let theta_pairings: Vec<i64> = h
        .terms()
        .iter()
        .map(|t| {
            t.exponent
                .prefix()
                .iter()
                .zip(theta)
                .map(|(&a, &th)| i64::from(a) * th)
                .sum()
        })
        .collect();
    let one = BigRational::from_integer(1.into());
    let mut out = Vec::new();
    let mut err: Option<ContinuationError> = None;
    cyclotomy::for_each_beta_up_to(h.r(), beta_bound, |beta| {
        if err.is_some() {
            return;
        }
        // prune: off-face sigma mass >= 1 forces Re t <= 0 for every rho
        let mut off_mass = BigRational::zero();
        for (&b, pairing) in beta.iter().zip(&sigma_pairings) {
            if b > 0 && pairing.is_positive() {
                off_mass += BigRational::from_integer(i64::from(b).into()) * pairing;
            }
        }
        if off_mass >= one {
            return;
        }
        let gamma = match cyclotomy::gamma_exponent(h, beta) {
            Ok(g) => g,
            Err(e) => {
                err = Some(e.into());
                return;
            }
        };
        if gamma == 0 {
            return;
        }
        let mut s_dot = Complex64::new(0.0, 0.0);
        let mut th_dot = 0.0f64;
        for ((&b, sp), (tp, thp)) in beta
            .iter()
            .zip(&sigma_pairings)
            .zip(tau_pairings.iter().zip(&theta_pairings))
        {
            let bf = b as f64;
            s_dot += bf * Complex64::new(rational_to_f64(sp), *tp);
            th_dot += bf * *thp as f64;
        }
        let mut push_rho = |rho: RhoPoint| {
            let t = (rho.value() - s_dot) / th_dot;
            if t.re >= 0.0 {
                out.push(Candidate {
                    beta: beta.to_vec(),
                    rho,
                    t,
                });
            }
        };
        push_rho(RhoPoint::Pole);
        for &ord in &zeros.ordinates {
            push_rho(RhoPoint::Zero {
                ordinate: ord,
                sign: 1,
            });
            push_rho(RhoPoint::Zero {
                ordinate: ord,
                sign: -1,
            });
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::zeta;
    use crate::linalg::{rat, rat_frac};
    use crate::poly::parse_polynomial;

    #[test]
    fn m_delta_examples() {
        assert_eq!(m_delta(&rat_frac(1, 2), 1.0), Ok(3));
        assert_eq!(m_delta(&rat_frac(1, 2), 0.5), Ok(5));
        assert_eq!(m_delta(&rat_frac(1, 3), 1.0), Ok(4));
        assert!(matches!(
            m_delta(&rat_frac(1, 2), 0.0),
            Err(ContinuationError::InvalidDelta(_))
        ));
    }

    #[test]
    fn direct_product_known_value() {
        // prod_p (1 - p^{-3}) = 1/zeta(3)
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let s = [Complex64::new(1.5, 0.0), Complex64::new(1.5, 0.0)];
        let out = direct_euler_product(&h, 1, &s, 200_000);
        let expected = zeta(Complex64::new(3.0, 0.0)).unwrap().inv();
        assert!(out.convergence_warning.is_none());
        assert!(
            (out.value - expected).norm() < 1e-7,
            "err {:e}",
            (out.value - expected).norm()
        );
    }

    #[test]
    fn direct_product_empty_and_warning() {
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let s = [Complex64::new(0.2, 0.0), Complex64::new(0.2, 0.0)];
        let out = direct_euler_product(&h, 1, &s, 1);
        assert_eq!(out.value, Complex64::new(1.0, 0.0));
        assert_eq!(out.primes_used, 0);
        assert!(out.convergence_warning.is_some());
    }

    #[test]
    fn collapse_law_single_cyclotomic_factor() {
        // h = 1 - X1X2: continued value is exactly 1/zeta(s1+s2), below the
        // abscissa of convergence
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let s = [Complex64::new(0.3, 0.0), Complex64::new(0.4, 0.0)];
        let ctx = ContinuationContext {
            delta: 0.5,
            ..Default::default()
        };
        let out = continued_value(&h, 1, &s, &ctx).unwrap();
        let expected = zeta(Complex64::new(0.7, 0.0)).unwrap().inv();
        assert!(
            (out.value - expected).norm() < 1e-10,
            "err {:e}",
            (out.value - expected).norm()
        );
        assert_eq!(out.m_delta, 2);
    }

    #[test]
    fn continuation_agrees_with_direct_product() {
        let h = parse_polynomial("1 - 2*X1*X2", 2).unwrap();
        let s = [Complex64::new(1.1, 0.0), Complex64::new(1.2, 0.0)];
        let ctx = ContinuationContext {
            delta: 1.0,
            ..Default::default()
        };
        let cont = continued_value(&h, 1, &s, &ctx).unwrap();
        let direct = direct_euler_product(&h, 1, &s, 100_000);
        assert!(
            (cont.value - direct.value).norm() < 1e-6,
            "err {:e}",
            (cont.value - direct.value).norm()
        );
    }

    #[test]
    fn outside_domain_rejected() {
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let s = [Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0)];
        let ctx = ContinuationContext {
            delta: 0.5,
            ..Default::default()
        };
        assert!(matches!(
            continued_value(&h, 1, &s, &ctx),
            Err(ContinuationError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn near_singularity_guard() {
        // s1 + s2 lands exactly on the pole of zeta
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let s = [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)];
        let ctx = ContinuationContext {
            delta: 0.9,
            ..Default::default()
        };
        match continued_value(&h, 1, &s, &ctx) {
            Err(ContinuationError::NearSingularity { beta, .. }) => {
                assert_eq!(beta, vec![1]);
            }
            other => panic!("expected NearSingularity, got {other:?}"),
        }
    }

    #[test]
    fn delta_independence() {
        let h = crate::igusa::igusa_h(2).unwrap();
        let s = [Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)];
        let mk = |delta: f64| ContinuationContext {
            delta,
            ..Default::default()
        };
        let a = continued_value(&h, 1, &s, &mk(1.5)).unwrap();
        let b = continued_value(&h, 1, &s, &mk(0.5)).unwrap();
        assert_ne!(a.m_delta, b.m_delta, "distinct sieves actually exercised");
        assert!(
            (a.value - b.value).norm() <= 2.0 * 1e-9,
            "delta dependence {:e}",
            (a.value - b.value).norm()
        );
    }

    #[test]
    fn stagnation_recheck() {
        // the certificate itself: the last three shells before certification
        // each moved the value by < tol/10
        let h = crate::igusa::igusa_h(2).unwrap();
        let s = [Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)];
        let ctx = ContinuationContext {
            delta: 1.5,
            ..Default::default()
        };
        let out = continued_value(&h, 1, &s, &ctx).unwrap();
        let tail: Vec<&StagnationEntry> = out
            .stagnation
            .iter()
            .filter(|entry| entry.beta_norm + STAGNATION_RUN > out.beta_bound)
            .collect();
        assert!(tail.len() >= STAGNATION_RUN as usize);
        for entry in tail {
            assert!(entry.movement < ctx.tail_tolerance / 10.0);
        }
    }

    #[test]
    fn candidates_fixture() {
        // Igusa n=2, sigma0 = (-1, 7/10, 1), tau0 = 0, theta = (2,1):
        // the unit beta on the face with rho = pole lands at t = 1/2
        let h = crate::igusa::igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let sigma0 = vec![rat(-1), rat_frac(7, 10), rat(1)];
        let tau0 = vec![0.0, 0.0, 0.0];
        let theta = vec![2i64, 1];
        let zeros = ZetaZeroTable::bundled();
        let cands = singular_candidates(&h, 1, &sigma0, &tau0, &theta, 3, &zeros).unwrap();
        let mut unit = vec![0u32; 3];
        unit[e] = 1;
        let hit = cands
            .iter()
            .find(|cand| cand.beta == unit && cand.rho == RhoPoint::Pole)
            .expect("unit-on-face pole candidate present");
        assert!((hit.t - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(cands.iter().all(|cand| cand.t.re >= 0.0));
        // beta with off-face sigma mass >= 1 are pruned: two copies of the
        // (1,1,1) column carry mass 14/10
        let full = h.term_index(&[1, 1, 1]).unwrap();
        let mut two = vec![0u32; 3];
        two[full] = 2;
        assert!(cands.iter().all(|cand| cand.beta != two));
    }
}
