//! Boundary-point machinery: the generalized polynomial `W(X,Y)` of `h` at a
//! base point, admissible direction selection, Puiseux branch extraction
//! (closed-form leading terms cross-validated by Newton tracking), the lattice
//! of zeros accumulating to the right of the boundary, and rectangle counts.
//!
//! Base points and directions are exact rationals/integers; branch values are
//! floating point with residuals checked at every step.

use crate::continuation::Candidate;
use crate::geometry::{face_parameterization, face_support_witness, rational_to_f64};
use crate::linalg::rat;
use crate::poly::{ExponentVector, SparsePolynomial, UnivariateIntPolynomial};
use crate::roots::polynomial_roots;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PuiseuxError {
    #[error("term {0} does not name a supporting face")]
    FaceNotSupporting(usize),
    #[error("no admissible base point found within the redraw budget")]
    RedrawBudgetExhausted,
    #[error("base point invalid: {0}")]
    InvalidBasePoint(String),
    #[error("no direction of height <= {height} satisfies the constraints: {violated}")]
    NoDirectionFound { height: i64, violated: String },
    #[error("parity constraints are contradictory: alpha_(n)e' is collinear with alpha_(n)e")]
    ParityInfeasible,
    #[error("every candidate coset sum vanished at the working root")]
    NoEPrimeFound,
    #[error("Newton branch tracking diverged at X = {x}")]
    NewtonDivergence { x: f64 },
    #[error("two branches merged (within 1e-8) at X = {x}; refine the grid")]
    BranchCollision { x: f64 },
    #[error("ray derivative vanishes at the root: degenerate face leaked through")]
    DerivativeVanishes,
    #[error("branch is not descending")]
    NotDescending,
    #[error("branch has no sample at X = {x}")]
    MissingSample { x: f64 },
    #[error("lattice real part {re} is not positive")]
    NonPositiveRealPart { re: f64 },
    #[error("Newton refinement did not converge in 25 steps")]
    NoConvergence,
    #[error("closed form and tracking disagree on {field}: delta = {delta:e}")]
    CrossValidation { field: &'static str, delta: f64 },
    #[error("no descending branch among the ray roots")]
    NoDescendingBranch,
}

/// A boundary base point: exact rational real part on the face, seeded
/// imaginary part, and the face it lives on.
#[derive(Debug, Clone)]
pub struct BasePoint {
    /// Length n+1, last entry is c.
    pub sigma0: Vec<BigRational>,
    /// Length n+1, last entry is 0.
    pub tau0: Vec<f64>,
    /// Term index of the face's polar column.
    pub face: usize,
    pub seed: u64,
}

impl BasePoint {
    /// `sigma0 . alpha_j`, exact.
    pub fn pairing(&self, h: &SparsePolynomial, j: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (&a, x) in h.terms()[j].exponent.0.iter().zip(&self.sigma0) {
            acc += rat(i64::from(a)) * x;
        }
        acc
    }

    /// `tau0 . alpha_(n)j`.
    pub fn tau_pairing(&self, h: &SparsePolynomial, j: usize) -> f64 {
        h.terms()[j]
            .exponent
            .prefix()
            .iter()
            .zip(&self.tau0)
            .map(|(&a, &x)| a as f64 * x)
            .sum()
    }

    /// Columns with pairing exactly zero (the face's ray, by genericity).
    pub fn lambda_set(&self, h: &SparsePolynomial) -> Vec<usize> {
        (0..h.r())
            .filter(|&j| self.pairing(h, j).is_zero())
            .collect()
    }

    /// Validated construction from explicit data. Checks the defining
    /// conditions: zero pairing exactly on the ray of `alpha_e`, positive
    /// off the ray.
    pub fn from_sigma(
        h: &SparsePolynomial,
        c: i64,
        e: usize,
        sigma_prefix: Vec<BigRational>,
        tau_prefix: Vec<f64>,
    ) -> Result<Self, PuiseuxError> {
        assert_eq!(sigma_prefix.len(), h.n());
        assert_eq!(tau_prefix.len(), h.n());
        let mut sigma0 = sigma_prefix;
        sigma0.push(rat(c));
        let mut tau0 = tau_prefix;
        tau0.push(0.0);
        let bp = BasePoint {
            sigma0,
            tau0,
            face: e,
            seed: 0,
        };
        let anchor = &h.terms()[e].exponent;
        for j in 0..h.r() {
            let pairing = bp.pairing(h, j);
            let on_ray = h.terms()[j].exponent.collinear(anchor);
            if on_ray && !pairing.is_zero() {
                return Err(PuiseuxError::InvalidBasePoint(format!(
                    "column {j} lies on the ray but pairs to {pairing}"
                )));
            }
            if !on_ray && !pairing.is_positive() {
                return Err(PuiseuxError::InvalidBasePoint(format!(
                    "column {j} off the ray must pair strictly positive, got {pairing}"
                )));
            }
        }
        Ok(bp)
    }

    /// Fresh imaginary part from the next seed (genericity re-draw).
    pub fn redraw_tau(&self, h: &SparsePolynomial) -> BasePoint {
        let seed = self.seed.wrapping_add(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let n = h.n();
        let mut tau0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        tau0.push(0.0);
        BasePoint {
            sigma0: self.sigma0.clone(),
            tau0,
            face: self.face,
            seed,
        }
    }
}

const BASE_POINT_REDRAW_BUDGET: usize = 16;

/// Draws an admissible base point on the face of term `e`: a seeded rational
/// perturbation of the support witness inside the face, re-drawn until the
/// pairings are zero exactly on the ray and no two off-ray cosets collide.
pub fn base_point(
    h: &SparsePolynomial,
    c: i64,
    e: usize,
    seed: u64,
) -> Result<BasePoint, PuiseuxError> {
    let witness = face_support_witness(h, c, e).ok_or(PuiseuxError::FaceNotSupporting(e))?;
    let (_, basis) = face_parameterization(h, c, e).ok_or(PuiseuxError::FaceNotSupporting(e))?;
    let anchor = h.terms()[e].exponent.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..BASE_POINT_REDRAW_BUDGET {
        // scale chosen so all strict margins survive the perturbation
        let mut scale: Option<BigRational> = None;
        for t in h.terms() {
            if t.exponent.collinear(&anchor) {
                continue;
            }
            let prefix: Vec<i64> = t.exponent.prefix().iter().map(|&x| i64::from(x)).collect();
            let mut margin = rat(c * i64::from(t.exponent.last_entry()));
            for (&a, x) in prefix.iter().zip(&witness) {
                margin += rat(a) * x;
            }
            let wiggle: i64 = basis
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&prefix)
                        .map(|(&vk, &aj)| (vk * aj).abs())
                        .sum::<i64>()
                })
                .sum();
            let bound = margin / rat(1 + wiggle);
            scale = Some(match scale {
                Some(s) if s <= bound => s,
                _ => bound,
            });
        }
        let scale = scale.unwrap_or_else(|| rat(1));
        let mut sigma_prefix = witness.clone();
        for v in &basis {
            let r: i64 = rng.gen_range(-8..=8);
            let eps = &scale * BigRational::new(BigInt::from(r), BigInt::from(16));
            for (s, &vi) in sigma_prefix.iter_mut().zip(v) {
                *s += &eps * rat(vi);
            }
        }
        let tau_prefix: Vec<f64> = (0..h.n()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let bp = match BasePoint::from_sigma(h, c, e, sigma_prefix, tau_prefix) {
            Ok(bp) => BasePoint { seed, ..bp },
            Err(_) => continue,
        };
        // genericity: distinct off-ray cosets must have distinct pairings
        let mut collision = false;
        'outer: for j0 in 0..h.r() {
            if h.terms()[j0].exponent.collinear(&anchor) {
                continue;
            }
            for j1 in (j0 + 1)..h.r() {
                if h.terms()[j1].exponent.collinear(&anchor) {
                    continue;
                }
                let diff: Vec<i64> = h.terms()[j0]
                    .exponent
                    .0
                    .iter()
                    .zip(&h.terms()[j1].exponent.0)
                    .map(|(&x, &y)| i64::from(x) - i64::from(y))
                    .collect();
                let same_coset = {
                    let b: Vec<i64> =
                        anchor.0.iter().map(|&x| i64::from(x)).collect();
                    let mut coll = true;
                    for i in 0..diff.len() {
                        for k in (i + 1)..diff.len() {
                            if diff[i] as i128 * b[k] as i128 != diff[k] as i128 * b[i] as i128 {
                                coll = false;
                            }
                        }
                    }
                    coll
                };
                if !same_coset && bp.pairing(h, j0) == bp.pairing(h, j1) {
                    collision = true;
                    break 'outer;
                }
            }
        }
        if !collision {
            return Ok(bp);
        }
    }
    Err(PuiseuxError::RedrawBudgetExhausted)
}

/// An admissible direction: integer theta with all pairings
/// `theta . alpha_(n)j` positive integers, plus the parity pattern when the
/// cyclotomic-ray machinery needs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionConfig {
    pub theta: Vec<i64>,
    /// Per-column pairings `theta . alpha_(n)j`.
    pub pairings: Vec<i64>,
}

impl DirectionConfig {
    pub fn pairing(&self, h: &SparsePolynomial, j: usize) -> i64 {
        h.terms()[j]
            .exponent
            .prefix()
            .iter()
            .zip(&self.theta)
            .map(|(&a, &th)| i64::from(a) * th)
            .sum()
    }
}

const DIRECTION_HEIGHT_BUDGET: i64 = 20;

/// Finds the first integer direction, in (max-height, lex) order, with every
/// pairing a positive integer, `theta . primitive(alpha_e)_(n)` a positive
/// integer, and — when `parity_needed` — that dot even while
/// `theta . alpha_(n)e'` is odd.
pub fn choose_direction(
    h: &SparsePolynomial,
    e: usize,
    e_prime: Option<usize>,
    parity_needed: bool,
) -> Result<DirectionConfig, PuiseuxError> {
    let n = h.n();
    let prim_e = h.terms()[e].exponent.primitive();
    if parity_needed {
        let ep = e_prime.expect("parity constraints need e'");
        if crate::poly::collinear_slices(
            h.terms()[ep].exponent.prefix(),
            h.terms()[e].exponent.prefix(),
        ) {
            return Err(PuiseuxError::ParityInfeasible);
        }
    }
    let mut theta = vec![1i64; n];
    let feasible = |theta: &[i64]| -> bool {
        let pair = |prefix: &[u32]| -> i64 {
            prefix
                .iter()
                .zip(theta)
                .map(|(&a, &th)| i64::from(a) * th)
                .sum()
        };
        if h.terms().iter().any(|t| pair(t.exponent.prefix()) < 1) {
            return false;
        }
        let prim_pair = pair(prim_e.prefix());
        if prim_pair < 1 {
            return false;
        }
        if parity_needed {
            if prim_pair % 2 != 0 {
                return false;
            }
            let ep = e_prime.unwrap();
            if pair(h.terms()[ep].exponent.prefix()) % 2 != 1 {
                return false;
            }
        }
        true
    };
    // enumerate by max coordinate, then lexicographic
    for height in 1..=DIRECTION_HEIGHT_BUDGET {
        theta.iter_mut().for_each(|t| *t = 1);
        loop {
            if theta.iter().max() == Some(&height) && feasible(&theta) {
                let pairings = h
                    .terms()
                    .iter()
                    .map(|t| {
                        t.exponent
                            .prefix()
                            .iter()
                            .zip(&theta)
                            .map(|(&a, &th)| i64::from(a) * th)
                            .sum()
                    })
                    .collect();
                return Ok(DirectionConfig { theta, pairings });
            }
            // next tuple in {1..height}^n
            let mut i = n;
            let mut done = false;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                if theta[i] < height {
                    theta[i] += 1;
                    for v in theta.iter_mut().skip(i + 1) {
                        *v = 1;
                    }
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    Err(PuiseuxError::NoDirectionFound {
        height: DIRECTION_HEIGHT_BUDGET,
        violated: format!(
            "pairings >= 1{}",
            if parity_needed {
                ", theta.prim(alpha_e) even, theta.alpha_(n)e' odd"
            } else {
                ""
            }
        ),
    })
}

/// One term of `W(X,Y) = 1 + sum_j A_j X^{x_j} Y^{y_j}`.
#[derive(Debug, Clone)]
struct WTerm {
    coeff: Complex64,
    x_exact: BigRational,
    x_float: f64,
    y: i64,
    column: usize,
}

/// The generalized polynomial of `h` at a base point in direction theta, for
/// one prime: coefficients `a_j p^{-i tau0 . alpha_(n)j}`, X-exponents
/// `sigma0 . alpha_j`, Y-exponents `theta . alpha_(n)j`.
#[derive(Debug, Clone)]
pub struct GeneralizedPolynomial {
    pub p: u64,
    terms: Vec<WTerm>,
    face: usize,
    /// Full exponent columns, for coset decisions.
    exponents: Vec<ExponentVector>,
}

pub fn generalized_polynomial(
    h: &SparsePolynomial,
    base: &BasePoint,
    direction: &DirectionConfig,
    p: u64,
) -> GeneralizedPolynomial {
    let lp = (p as f64).ln();
    let terms = h
        .terms()
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let phase = -base.tau_pairing(h, j) * lp;
            let coeff = t.coeff as f64 * Complex64::new(phase.cos(), phase.sin());
            let x_exact = base.pairing(h, j);
            WTerm {
                coeff,
                x_float: rational_to_f64(&x_exact),
                x_exact,
                y: direction.pairings[j],
                column: j,
            }
        })
        .collect();
    GeneralizedPolynomial {
        p,
        terms,
        face: base.face,
        exponents: h.terms().iter().map(|t| t.exponent.clone()).collect(),
    }
}

impl GeneralizedPolynomial {
    /// `W(x, y)` for real `x > 0`.
    pub fn eval(&self, x: f64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * x.powf(t.x_float) * y.powi(t.y as i32);
        }
        acc
    }

    /// `dW/dY(x, y)`.
    pub fn eval_dy(&self, x: f64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * t.y as f64 * x.powf(t.x_float) * y.powi(t.y as i32 - 1);
        }
        acc
    }

    /// Dense coefficients of the ray polynomial `[W]_e(Y)` (terms with zero
    /// X-exponent, plus the constant 1).
    pub fn ray_coeffs(&self) -> Vec<Complex64> {
        let deg = self
            .terms
            .iter()
            .filter(|t| t.x_exact.is_zero())
            .map(|t| t.y)
            .max()
            .unwrap_or(0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        for t in &self.terms {
            if t.x_exact.is_zero() {
                coeffs[t.y as usize] += t.coeff;
            }
        }
        coeffs
    }

    /// `[W]'_e(y)`.
    pub fn ray_derivative_at(&self, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if t.x_exact.is_zero() {
                acc += t.coeff * t.y as f64 * y.powi(t.y as i32 - 1);
            }
        }
        acc
    }

    /// `R_{mu,e'}(y)`: the coset sum of `e'` (columns whose exponent differs
    /// from `alpha_e'` by a rational multiple of `alpha_e`).
    pub fn coset_sum_at(&self, e_prime: usize, y: Complex64) -> Complex64 {
        let anchor = &self.exponents[self.face];
        let target = &self.exponents[e_prime];
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let diff: Vec<i64> = self.exponents[t.column]
                .0
                .iter()
                .zip(&target.0)
                .map(|(&x, &yv)| i64::from(x) - i64::from(yv))
                .collect();
            if signed_on_ray(&diff, anchor) {
                acc += t.coeff * y.powi(t.y as i32);
            }
        }
        acc
    }

    /// Exact X-exponent of a column.
    pub fn x_exponent(&self, j: usize) -> &BigRational {
        &self.terms[j].x_exact
    }
}

fn signed_on_ray(diff: &[i64], alpha: &ExponentVector) -> bool {
    let b: Vec<i64> = alpha.0.iter().map(|&x| i64::from(x)).collect();
    for i in 0..diff.len() {
        for k in (i + 1)..diff.len() {
            if diff[i] as i128 * b[k] as i128 != diff[k] as i128 * b[i] as i128 {
                return false;
            }
        }
    }
    true
}

/// The p-and-tau-dependent ray polynomial `[W]_e(T)` and the integer
/// polynomial `1 + sum_{j in Lambda_e} a_j T^{theta.alpha_(n)j}` whose roots
/// correspond through the unit-modulus phase transport.
pub fn ray_polynomial(
    h: &SparsePolynomial,
    e: usize,
    direction: &DirectionConfig,
    p: u64,
    tau0: &[f64],
) -> (Vec<Complex64>, UnivariateIntPolynomial) {
    let lp = (p as f64).ln();
    let lambda = h.lambda(e);
    let deg = lambda
        .iter()
        .map(|&j| direction.pairings[j])
        .max()
        .unwrap_or(0) as usize;
    let mut complex_coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
    complex_coeffs[0] = Complex64::new(1.0, 0.0);
    let mut int_coeffs = vec![0i64; deg + 1];
    int_coeffs[0] = 1;
    for &j in &lambda {
        let t = &h.terms()[j];
        let tau_dot: f64 = t
            .exponent
            .prefix()
            .iter()
            .zip(tau0)
            .map(|(&a, &x)| a as f64 * x)
            .sum();
        let phase = -tau_dot * lp;
        let y = direction.pairings[j] as usize;
        complex_coeffs[y] += t.coeff as f64 * Complex64::new(phase.cos(), phase.sin());
        int_coeffs[y] += t.coeff;
    }
    (complex_coeffs, UnivariateIntPolynomial::new(int_coeffs))
}

/// Transport of a mu-root to the p-independent root of the integer ray
/// polynomial: `c_theta = c_mu * p^{-i tau0.alpha_(n)e / theta.alpha_(n)e}`.
pub fn transport_root(
    c_mu: Complex64,
    h: &SparsePolynomial,
    base: &BasePoint,
    direction: &DirectionConfig,
    p: u64,
) -> Complex64 {
    let e = base.face;
    let tau_dot = base.tau_pairing(h, e);
    let theta_dot = direction.pairings[e] as f64;
    let angle = -(tau_dot / theta_dot) * (p as f64).ln();
    c_mu * Complex64::new(angle.cos(), angle.sin())
}

const E_PRIME_TOLERANCE: f64 = 1e-10;

/// Selects `e'`: among off-face cosets with positive sigma-pairing whose coset
/// sum `R_{j0}(c_theta)` does not vanish at the working root, the one with
/// minimal pairing. Existence failure is a diagnostic, never silent.
pub fn select_e_prime(
    h: &SparsePolynomial,
    base: &BasePoint,
    direction: &DirectionConfig,
    c_theta0: Complex64,
) -> Result<usize, PuiseuxError> {
    let anchor = &h.terms()[base.face].exponent;
    let mut best: Option<(BigRational, usize)> = None;
    let mut seen: Vec<usize> = Vec::new();
    for j0 in 0..h.r() {
        let pairing = base.pairing(h, j0);
        if !pairing.is_positive() {
            continue;
        }
        let in_seen_coset = seen.iter().any(|&prev| {
            let diff: Vec<i64> = h.terms()[prev]
                .exponent
                .0
                .iter()
                .zip(&h.terms()[j0].exponent.0)
                .map(|(&x, &y)| i64::from(x) - i64::from(y))
                .collect();
            signed_on_ray(&diff, anchor)
        });
        if in_seen_coset {
            continue;
        }
        seen.push(j0);
        // R_{j0}(c_theta0) over the coset, integer coefficients
        let mut r_val = Complex64::new(0.0, 0.0);
        for (j, t) in h.terms().iter().enumerate() {
            let diff: Vec<i64> = t
                .exponent
                .0
                .iter()
                .zip(&h.terms()[j0].exponent.0)
                .map(|(&x, &y)| i64::from(x) - i64::from(y))
                .collect();
            if signed_on_ray(&diff, anchor) {
                r_val += t.coeff as f64 * c_theta0.powi(direction.pairings[j] as i32);
            }
        }
        if r_val.norm() <= E_PRIME_TOLERANCE {
            continue;
        }
        match &best {
            Some((b, _)) if *b <= pairing => {}
            _ => best = Some((pairing, j0)),
        }
    }
    best.map(|(_, j0)| j0).ok_or(PuiseuxError::NoEPrimeFound)
}

/// One solution branch `Y = Omega(X)` of `W(X, Y) = 0` near `X = 0`.
#[derive(Debug, Clone)]
pub struct PuiseuxBranch {
    pub c0: Complex64,
    pub c1: Option<Complex64>,
    /// Exponent of the second term; `sigma0 . alpha_e'` on the closed-form path.
    pub theta1: Option<f64>,
    /// `|Omega(X)| < 1` for small positive X.
    pub descending: bool,
    /// `(x, |W(x, Omega(x))|)` samples from tracking.
    pub residual_profile: Vec<(f64, f64)>,
    /// `(x, Omega(x))` samples from tracking.
    pub samples: Vec<(f64, Complex64)>,
}

/// Closed-form leading terms at a ray root:
/// `c1 = -R_{mu,e'}(c0) / [W]'_e(c0)`, `theta1 = sigma0 . alpha_e'`.
pub fn branch_leading_terms(
    w: &GeneralizedPolynomial,
    c0: Complex64,
    e_prime: usize,
) -> Result<PuiseuxBranch, PuiseuxError> {
    let d = w.ray_derivative_at(c0);
    if d.norm() < 1e-12 {
        return Err(PuiseuxError::DerivativeVanishes);
    }
    let r = w.coset_sum_at(e_prime, c0);
    let c1 = -r / d;
    let theta1 = rational_to_f64(w.x_exponent(e_prime));
    let descending = if (c0.norm() - 1.0).abs() < 1e-9 {
        (c1 / c0).re < 0.0
    } else {
        c0.norm() < 1.0
    };
    Ok(PuiseuxBranch {
        c0,
        c1: Some(c1),
        theta1: Some(theta1),
        descending,
        residual_profile: Vec::new(),
        samples: Vec::new(),
    })
}

/// Geometric grid from `start` down to (and including) `end`.
pub fn geometric_grid(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    assert!(start > end && end > 0.0 && ratio > 0.0 && ratio < 1.0);
    let mut grid = Vec::new();
    let mut x = start;
    while x > end * (1.0 + 1e-12) {
        grid.push(x);
        x *= ratio;
    }
    grid.push(end);
    grid
}

const NEWTON_MAX_STEPS: usize = 50;
const TRACK_RESIDUAL: f64 = 1e-10;
const COLLISION_DISTANCE: f64 = 1e-8;

/// Newton continuation of `W(X, .) = 0` down the grid, seeded at `c0`. Tracks
/// every ray root simultaneously so branch collisions are detected; fits the
/// second term by least squares on `log|Omega - c0|` against `log X` over the
/// grid tail.
pub fn track_branch(
    w: &GeneralizedPolynomial,
    c0: Complex64,
    grid: &[f64],
) -> Result<PuiseuxBranch, PuiseuxError> {
    assert!(!grid.is_empty());
    let ray = w.ray_coeffs();
    let all_roots = polynomial_roots(&ray);
    let target = all_roots
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (**a - c0).norm().partial_cmp(&(**b - c0).norm()).unwrap()
        })
        .map(|(i, _)| i)
        .expect("ray polynomial has roots");
    let mut current: Vec<Complex64> = all_roots.clone();
    let mut samples = Vec::with_capacity(grid.len());
    let mut residual_profile = Vec::with_capacity(grid.len());
    for &x in grid {
        for yk in current.iter_mut() {
            let mut converged = false;
            for _ in 0..NEWTON_MAX_STEPS {
                let v = w.eval(x, *yk);
                if v.norm() < 1e-13 {
                    converged = true;
                    break;
                }
                let d = w.eval_dy(x, *yk);
                if d.norm() < 1e-300 {
                    break;
                }
                let step = v / d;
                *yk -= step;
                if step.norm() < 1e-16 * (1.0 + yk.norm()) {
                    converged = true;
                    break;
                }
            }
            let res = w.eval(x, *yk).norm();
            if !converged && res > TRACK_RESIDUAL {
                return Err(PuiseuxError::NewtonDivergence { x });
            }
        }
        for i in 0..current.len() {
            for k in (i + 1)..current.len() {
                if (current[i] - current[k]).norm() < COLLISION_DISTANCE {
                    return Err(PuiseuxError::BranchCollision { x });
                }
            }
        }
        samples.push((x, current[target]));
        residual_profile.push((x, w.eval(x, current[target]).norm()));
    }
    // fit on the tail of the grid
    let tail = samples.len().saturating_sub(4);
    let tail_samples = &samples[tail..];
    let offsets: Vec<(f64, Complex64)> = tail_samples
        .iter()
        .map(|&(x, om)| (x, om - c0))
        .collect();
    let (c1, theta1) = if offsets.iter().all(|(_, d)| d.norm() < 1e-12) {
        (None, None)
    } else {
        let pts: Vec<(f64, f64)> = offsets
            .iter()
            .filter(|(_, d)| d.norm() > 0.0)
            .map(|&(x, d)| (x.ln(), d.norm().ln()))
            .collect();
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        // complex c1 from the smallest-x sample
        let (x_last, d_last) = offsets[offsets.len() - 1];
        let c1 = d_last / x_last.powf(slope);
        (Some(c1), Some(slope))
    };
    let descending = samples
        .last()
        .map(|&(_, om)| om.norm() < 1.0)
        .unwrap_or(false);
    Ok(PuiseuxBranch {
        c0,
        c1,
        theta1,
        descending,
        residual_profile,
        samples,
    })
}

/// `t_m = -log(Omega(p^{-1}))/log p + 2 pi i m / log p` for `m` in the range.
/// Requires a descending branch with a sample at exactly `X = 1/p`.
pub fn zero_lattice(
    branch: &PuiseuxBranch,
    p: u64,
    m_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<Complex64>, PuiseuxError> {
    if !branch.descending {
        return Err(PuiseuxError::NotDescending);
    }
    let x = 1.0 / p as f64;
    let omega = branch
        .samples
        .iter()
        .find(|(xs, _)| (xs - x).abs() <= 1e-12 * x)
        .map(|&(_, om)| om)
        .ok_or(PuiseuxError::MissingSample { x })?;
    let lp = (p as f64).ln();
    let base = -omega.ln() / lp;
    if base.re <= 0.0 {
        return Err(PuiseuxError::NonPositiveRealPart { re: base.re });
    }
    let spacing = 2.0 * std::f64::consts::PI / lp;
    Ok(m_range
        .map(|m| base + Complex64::new(0.0, m as f64 * spacing))
        .collect())
}

/// Newton refinement of `t -> h(p^{-s0_1 - t theta_1}, ..., p^{-c})` from a
/// guess; returns the refined point and the final residual.
pub fn verify_zero(
    h: &SparsePolynomial,
    c: i64,
    base: &BasePoint,
    direction: &DirectionConfig,
    p: u64,
    t_guess: Complex64,
) -> Result<(Complex64, f64), PuiseuxError> {
    debug_assert_eq!(
        base.sigma0.last().cloned(),
        Some(rat(c)),
        "base point carries c in its last slot"
    );
    let lp = (p as f64).ln();
    let eval = |t: Complex64| -> (Complex64, Complex64) {
        let mut value = Complex64::new(1.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for (j, term) in h.terms().iter().enumerate() {
            let s_dot = Complex64::new(
                rational_to_f64(&base.pairing(h, j)),
                base.tau_pairing(h, j),
            );
            let th_dot = direction.pairings[j] as f64;
            let z = (-(s_dot + t * th_dot) * lp).exp();
            value += term.coeff as f64 * z;
            deriv += term.coeff as f64 * z * (-th_dot * lp);
        }
        (value, deriv)
    };
    let mut t = t_guess;
    for _ in 0..25 {
        let (v, d) = eval(t);
        if v.norm() <= 1e-10 {
            return Ok((t, v.norm()));
        }
        if d.norm() < 1e-300 {
            break;
        }
        let step = v / d;
        if step.norm() > 1.0 {
            break;
        }
        t -= step;
    }
    let (v, _) = eval(t);
    if v.norm() <= 1e-10 {
        Ok((t, v.norm()))
    } else {
        Err(PuiseuxError::NoConvergence)
    }
}

/// Per-prime entry of the rectangle count.
#[derive(Debug, Clone)]
pub struct PrimeLedger {
    pub p: u64,
    pub count: u64,
    pub re_t: f64,
    /// `eta log p / 2 pi`, the expected window length.
    pub window: f64,
}

/// Counts lattice zeros in the rectangle `1/(nu+1) < Re t < 1/nu`,
/// `u < Im t < u + eta` by the argument-window inequality, prime by prime.
/// `branch_for` supplies the descending branch tracked to `X = 1/p`, or
/// `None` to skip a prime outside the trackable regime (skips are reported).
pub fn count_zeros_in_rectangle(
    u: f64,
    eta: f64,
    nu: u32,
    prime_limit: u64,
    mut branch_for: impl FnMut(u64) -> Result<Option<PuiseuxBranch>, PuiseuxError>,
) -> Result<(u64, Vec<PrimeLedger>, Vec<u64>), PuiseuxError> {
    assert!(u >= 0.0 && eta > 0.0 && nu >= 1);
    let lo = 1.0 / (f64::from(nu) + 1.0);
    let hi = 1.0 / f64::from(nu);
    let mut total = 0u64;
    let mut ledger = Vec::new();
    let mut skipped = Vec::new();
    for p in crate::arith::primes_up_to(prime_limit) {
        let Some(branch) = branch_for(p)? else {
            skipped.push(p);
            continue;
        };
        if !branch.descending {
            continue;
        }
        let x = 1.0 / p as f64;
        let Some(&(_, omega)) = branch
            .samples
            .iter()
            .find(|(xs, _)| (xs - x).abs() <= 1e-12 * x)
        else {
            return Err(PuiseuxError::MissingSample { x });
        };
        let lp = (p as f64).ln();
        let re_t = -omega.norm().ln() / lp;
        if re_t <= lo || re_t >= hi {
            continue;
        }
        let arg_term = omega.arg() / (2.0 * std::f64::consts::PI);
        let lower = u * lp / (2.0 * std::f64::consts::PI) + arg_term;
        let upper = (u + eta) * lp / (2.0 * std::f64::consts::PI) + arg_term;
        // integers strictly inside (lower, upper)
        let first = (lower + 1e-12).floor() as i64 + 1;
        let last = (upper - 1e-12).ceil() as i64 - 1;
        let count = if last >= first {
            (last - first + 1) as u64
        } else {
            0
        };
        total += count;
        ledger.push(PrimeLedger {
            p,
            count,
            re_t,
            window: eta * lp / (2.0 * std::f64::consts::PI),
        });
    }
    Ok((total, ledger, skipped))
}

/// Distance report between a zero set and the singular candidates.
#[derive(Debug, Clone)]
pub struct InterferenceReport {
    pub min_distance: Option<f64>,
    /// Pairs closer than the collision threshold (1e-3).
    pub flagged: Vec<(Complex64, Complex64, f64)>,
}

pub const INTERFERENCE_THRESHOLD: f64 = 1e-3;

pub fn interference_check(zeros: &[Complex64], candidates: &[Candidate]) -> InterferenceReport {
    let mut min_distance: Option<f64> = None;
    let mut flagged = Vec::new();
    for &z in zeros {
        for cand in candidates {
            let d = (z - cand.t).norm();
            if min_distance.map_or(true, |m| d < m) {
                min_distance = Some(d);
            }
            if d < INTERFERENCE_THRESHOLD {
                flagged.push((z, cand.t, d));
            }
        }
    }
    InterferenceReport {
        min_distance,
        flagged,
    }
}

/// `Re(c1/c0)` is bounded away from zero: the branch genuinely ascends or
/// descends. A false result directs the caller to redraw tau0.
pub fn genericity_check(branch: &PuiseuxBranch) -> bool {
    match branch.c1 {
        None => false,
        Some(c1) => {
            if c1.norm() == 0.0 {
                return false;
            }
            (c1 / branch.c0).re.abs() > 1e-8
        }
    }
}

/// Cross-validated descending branch at prime `p`: closed-form leading terms
/// at the descending ray root, confirmed by Newton tracking down to `X = 1/p`
/// (tolerance 1e-4 on both `c1` and `theta1` when the closed form applies).
pub fn descending_branch(
    h: &SparsePolynomial,
    base: &BasePoint,
    direction: &DirectionConfig,
    e_prime: Option<usize>,
    p: u64,
    grid_start: f64,
) -> Result<PuiseuxBranch, PuiseuxError> {
    let w = generalized_polynomial(h, base, direction, p);
    let ray = w.ray_coeffs();
    let roots = polynomial_roots(&ray);
    // prefer a root already inside the unit circle; otherwise use the
    // closed-form second term to find the descending side
    let mut chosen: Option<PuiseuxBranch> = None;
    if let Some(&inside) = roots
        .iter()
        .filter(|r| r.norm() < 1.0 - 1e-9)
        .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .as_ref()
    {
        chosen = Some(match e_prime {
            Some(ep) => branch_leading_terms(&w, *inside, ep)?,
            None => PuiseuxBranch {
                c0: *inside,
                c1: None,
                theta1: None,
                descending: true,
                residual_profile: Vec::new(),
                samples: Vec::new(),
            },
        });
    } else if let Some(ep) = e_prime {
        for &root in &roots {
            let candidate = branch_leading_terms(&w, root, ep)?;
            if candidate.descending {
                chosen = Some(candidate);
                break;
            }
        }
    }
    let closed = chosen.ok_or(PuiseuxError::NoDescendingBranch)?;
    // cross-validate the second term on a deep grid where the fit is clean,
    // then track the lattice grid ending exactly at X = 1/p
    let deep_grid = geometric_grid(grid_start.max(2e-8), 1e-8, 0.5);
    let deep = track_branch(&w, closed.c0, &deep_grid)?;
    if let (Some(cf), Some(tr)) = (closed.c1, deep.c1) {
        let delta = (cf - tr).norm();
        if delta > 1e-4 * (1.0 + cf.norm()) {
            return Err(PuiseuxError::CrossValidation { field: "c1", delta });
        }
    }
    if let (Some(cf), Some(tr)) = (closed.theta1, deep.theta1) {
        let delta = (cf - tr).abs();
        if delta > 1e-4 * (1.0 + cf.abs()) {
            return Err(PuiseuxError::CrossValidation {
                field: "theta1",
                delta,
            });
        }
    }
    let x_end = 1.0 / p as f64;
    let grid = if grid_start > x_end * 1.001 {
        geometric_grid(grid_start, x_end, 0.5)
    } else {
        vec![x_end]
    };
    let tracked = track_branch(&w, closed.c0, &grid)?;
    Ok(PuiseuxBranch {
        c0: closed.c0,
        c1: closed.c1.or(deep.c1),
        theta1: closed.theta1.or(deep.theta1),
        descending: tracked.descending,
        residual_profile: tracked.residual_profile,
        samples: tracked.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igusa::igusa_h;
    use crate::linalg::rat_frac;
    use crate::poly::parse_polynomial;

    fn rat(n: i64) -> BigRational {
        crate::linalg::rat(n)
    }

    fn igusa_fixture() -> (SparsePolynomial, BasePoint, DirectionConfig, usize) {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let base = BasePoint::from_sigma(
            &h,
            1,
            e,
            vec![rat(-1), rat_frac(7, 10)],
            vec![0.0, 0.0],
        )
        .unwrap();
        let e_prime_guess = h.term_index(&[1, 1, 1]).unwrap();
        let direction = choose_direction(&h, e, Some(e_prime_guess), true).unwrap();
        (h, base, direction, e)
    }

    #[test]
    fn fixture_base_point_pairings() {
        let (h, base, _, _) = igusa_fixture();
        let pairings: Vec<BigRational> = (0..3).map(|j| base.pairing(&h, j)).collect();
        // canonical term order: (0,1,1), (1,0,1), (1,1,1)
        assert_eq!(pairings[h.term_index(&[1, 0, 1]).unwrap()], rat(0));
        assert_eq!(pairings[h.term_index(&[0, 1, 1]).unwrap()], rat_frac(17, 10));
        assert_eq!(pairings[h.term_index(&[1, 1, 1]).unwrap()], rat_frac(7, 10));
    }

    #[test]
    fn base_point_rejects_bad_sigma() {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        // sigma.alpha_e != 0
        assert!(matches!(
            BasePoint::from_sigma(&h, 1, e, vec![rat(0), rat(0)], vec![0.0, 0.0]),
            Err(PuiseuxError::InvalidBasePoint(_))
        ));
        // off-ray pairing negative
        assert!(matches!(
            BasePoint::from_sigma(&h, 1, e, vec![rat(-1), rat(-2)], vec![0.0, 0.0]),
            Err(PuiseuxError::InvalidBasePoint(_))
        ));
    }

    #[test]
    fn drawn_base_point_is_admissible() {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let bp = base_point(&h, 1, e, 42).unwrap();
        assert!(bp.pairing(&h, e).is_zero());
        for j in 0..h.r() {
            if j != e {
                assert!(bp.pairing(&h, j).is_positive());
            }
        }
        // distinct seeds draw distinct points (overwhelmingly)
        let bp2 = base_point(&h, 1, e, 43).unwrap();
        assert_ne!(bp.sigma0, bp2.sigma0);
    }

    #[test]
    fn base_point_requires_supporting_face() {
        // (2,2,1) is not a supporting face of this polynomial
        let h = parse_polynomial("1 + X1*X2 + X1^2*X2^2*X3", 2).unwrap();
        let e = h.term_index(&[2, 2, 1]).unwrap();
        assert!(matches!(
            base_point(&h, 1, e, 0),
            Err(PuiseuxError::FaceNotSupporting(_))
        ));
    }

    #[test]
    fn direction_fixture() {
        let (h, _, direction, e) = igusa_fixture();
        assert_eq!(direction.theta, vec![2, 1]);
        let pe = h.term_index(&[1, 0, 1]).unwrap();
        let pp = h.term_index(&[0, 1, 1]).unwrap();
        let pf = h.term_index(&[1, 1, 1]).unwrap();
        assert_eq!(direction.pairings[pe], 2);
        assert_eq!(direction.pairings[pp], 1);
        assert_eq!(direction.pairings[pf], 3);
        assert!(direction.pairings.iter().all(|&v| v >= 1));
        let _ = e;
    }

    #[test]
    fn direction_no_parity_default() {
        // all alpha_(n)j >= (1,..): theta = (1,..,1) works without parity
        let h = parse_polynomial("1 - X1*X2 - X1*X2^2", 2).unwrap();
        let d = choose_direction(&h, 0, None, false).unwrap();
        assert_eq!(d.theta, vec![1, 1]);
    }

    #[test]
    fn direction_parity_infeasible_when_collinear() {
        // e' prefix collinear with e prefix
        let h = parse_polynomial("1 - X1*X3 - X1^2*X3^3", 2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let ep = h.term_index(&[2, 0, 3]).unwrap();
        assert_eq!(
            choose_direction(&h, e, Some(ep), true),
            Err(PuiseuxError::ParityInfeasible)
        );
    }

    #[test]
    fn ray_polynomial_fixture() {
        let (h, base, direction, e) = igusa_fixture();
        let (complex_coeffs, int_poly) = ray_polynomial(&h, e, &direction, 101, &base.tau0);
        assert_eq!(int_poly.coeffs, vec![1, 0, -1]);
        // tau0 = 0: complex coefficients match the integer ones
        for (k, &c) in int_poly.coeffs.iter().enumerate() {
            assert!((complex_coeffs[k] - Complex64::new(c as f64, 0.0)).norm() < 1e-15);
        }
        let roots = polynomial_roots(&complex_coeffs);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn root_transport_invariants() {
        // for random tau0 and several p: transported roots satisfy the integer
        // ray polynomial to 1e-10, with equal moduli
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let ep = h.term_index(&[1, 1, 1]).unwrap();
        let direction = choose_direction(&h, e, Some(ep), true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &p in &[2u64, 101, 9973] {
            let tau: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..1.0)).collect();
            let base =
                BasePoint::from_sigma(&h, 1, e, vec![rat(-1), rat_frac(7, 10)], tau).unwrap();
            let (complex_coeffs, int_poly) = ray_polynomial(&h, e, &direction, p, &base.tau0);
            for c_mu in polynomial_roots(&complex_coeffs) {
                let c_theta = transport_root(c_mu, &h, &base, &direction, p);
                assert!((c_theta.norm() - c_mu.norm()).abs() < 1e-12);
                let residual = int_poly.evaluate(c_theta).norm();
                assert!(residual < 1e-10, "p={p}, residual {residual:e}");
            }
        }
    }

    #[test]
    fn e_prime_fixture() {
        let (h, base, direction, _) = igusa_fixture();
        for c0 in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)] {
            let ep = select_e_prime(&h, &base, &direction, c0).unwrap();
            assert_eq!(h.terms()[ep].exponent.0, vec![1, 1, 1]);
        }
    }

    #[test]
    fn e_prime_all_vanish() {
        // Constructed cancellation: the only off-face coset is
        // {(0,1,1) with a=+1, (1,1,2) = (0,1,1)+(1,0,1) with a=-1}, and the ray
        // polynomial 1 - Y has the root c0 = 1, so R(c0) = 1 - 1 = 0 on it.
        let h = parse_polynomial("1 - X1*X3 + X2*X3 - X1*X2*X3^2", 2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        let base = BasePoint::from_sigma(
            &h,
            1,
            e,
            // pairings: face 0; (0,1,1) -> 3/2; (1,1,2) -> -1 + 1/2 + 2 = 3/2
            vec![rat(-1), rat_frac(1, 2)],
            vec![0.0, 0.0],
        )
        .unwrap();
        let direction = choose_direction(&h, e, None, false).unwrap();
        assert_eq!(direction.theta, vec![1, 1]);
        let c0 = Complex64::new(1.0, 0.0);
        assert_eq!(
            select_e_prime(&h, &base, &direction, c0),
            Err(PuiseuxError::NoEPrimeFound)
        );
    }

    #[test]
    fn branch_closed_form_fixture() {
        let (h, base, direction, _) = igusa_fixture();
        let ep = h.term_index(&[1, 1, 1]).unwrap();
        let w = generalized_polynomial(&h, &base, &direction, 101);
        // W = 1 - Y^2 - X^{17/10} Y + X^{7/10} Y^3
        let minus = branch_leading_terms(&w, Complex64::new(-1.0, 0.0), ep).unwrap();
        assert!((minus.c1.unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((minus.theta1.unwrap() - 0.7).abs() < 1e-15);
        assert!(minus.descending);
        let plus = branch_leading_terms(&w, Complex64::new(1.0, 0.0), ep).unwrap();
        assert!((plus.c1.unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(!plus.descending);
        // parity pairing: equal c1 for +-c0
        assert!((minus.c1.unwrap() - plus.c1.unwrap()).norm() < 1e-14);
        assert!(genericity_check(&minus));
    }

    #[test]
    fn branch_tracking_matches_closed_form() {
        let (h, base, direction, _) = igusa_fixture();
        let w = generalized_polynomial(&h, &base, &direction, 101);
        let grid = geometric_grid(1e-2, 1e-8, 0.5);
        let tracked = track_branch(&w, Complex64::new(-1.0, 0.0), &grid).unwrap();
        assert!((tracked.theta1.unwrap() - 0.7).abs() < 1e-4);
        assert!((tracked.c1.unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-4);
        assert!(tracked.descending);
        for &(_, res) in &tracked.residual_profile {
            assert!(res <= TRACK_RESIDUAL);
        }
    }

    #[test]
    fn tracking_constant_branch_degenerate_fit() {
        // single-ray polynomial: Omega is a constant root, no second term
        let h = parse_polynomial("1 - 2*X1*X2", 2).unwrap();
        let base = BasePoint::from_sigma(&h, 1, 0, vec![rat(1), rat(-1)], vec![0.0, 0.0]);
        // sigma.alpha = 1 - 1 + 0... the column is (1,1,0): 1 - 1 + 0 = 0 ✓
        let base = base.unwrap();
        let direction = choose_direction(&h, 0, None, false).unwrap();
        let w = generalized_polynomial(&h, &base, &direction, 101);
        let grid = geometric_grid(1e-2, 1e-6, 0.5);
        let root = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let tracked = track_branch(&w, root, &grid).unwrap();
        assert!(tracked.c1.is_none());
        assert!(tracked.theta1.is_none());
        assert!(tracked.descending);
    }

    #[test]
    fn lattice_spacing_and_reality() {
        let (h, base, direction, _) = igusa_fixture();
        let ep = h.term_index(&[1, 1, 1]).unwrap();
        let p = 101u64;
        let branch = descending_branch(&h, &base, &direction, Some(ep), p, 1e-2).unwrap();
        let lattice = zero_lattice(&branch, p, 0..=5).unwrap();
        assert_eq!(lattice.len(), 6);
        let spacing = 2.0 * std::f64::consts::PI / (p as f64).ln();
        for w in lattice.windows(2) {
            let d = w[1] - w[0];
            assert!((d.re).abs() < 1e-15);
            assert!((d.im - spacing).abs() < 1e-12);
        }
        // common real part, positive
        assert!(lattice.iter().all(|t| (t.re - lattice[0].re).abs() < 1e-15));
        assert!(lattice[0].re > 0.0);
    }

    #[test]
    fn lattice_requires_descending() {
        let branch = PuiseuxBranch {
            c0: Complex64::new(1.0, 0.0),
            c1: None,
            theta1: None,
            descending: false,
            residual_profile: vec![],
            samples: vec![(0.01, Complex64::new(1.0, 0.0))],
        };
        assert_eq!(
            zero_lattice(&branch, 101, 0..=1),
            Err(PuiseuxError::NotDescending)
        );
    }

    #[test]
    fn verify_zero_on_lattice() {
        let (h, base, direction, _) = igusa_fixture();
        let ep = h.term_index(&[1, 1, 1]).unwrap();
        let p = 101u64;
        let branch = descending_branch(&h, &base, &direction, Some(ep), p, 1e-2).unwrap();
        let lattice = zero_lattice(&branch, p, 0..=5).unwrap();
        for t in lattice {
            let (refined, residual) = verify_zero(&h, 1, &base, &direction, p, t).unwrap();
            assert!(residual <= 1e-10);
            assert!((refined - t).norm() < 1e-6, "guess was already sharp");
        }
    }

    #[test]
    fn verify_zero_rejects_far_guess() {
        let (h, base, direction, _) = igusa_fixture();
        let far = Complex64::new(5.0, 40.0);
        assert!(matches!(
            verify_zero(&h, 1, &base, &direction, 101, far),
            Err(PuiseuxError::NoConvergence)
        ));
    }

    #[test]
    fn verify_zero_single_variable_sanity() {
        // 1 - 2 X1 X2 analog: t with p^{-(s0+t theta).alpha} = 1/2 exactly
        let h = parse_polynomial("1 - 2*X1*X2", 2).unwrap();
        let base =
            BasePoint::from_sigma(&h, 1, 0, vec![rat(1), rat(-1)], vec![0.0, 0.0]).unwrap();
        let direction = choose_direction(&h, 0, None, false).unwrap();
        let p = 101u64;
        // pairing s0.alpha = 0, theta.alpha = 2: need p^{-2t} = 1/2
        let t_exact = Complex64::new(2.0f64.ln() / (2.0 * (p as f64).ln()), 0.0);
        let (refined, residual) = verify_zero(&h, 1, &base, &direction, p, t_exact).unwrap();
        assert!(residual < 1e-12);
        assert!((refined - t_exact).norm() < 1e-12);
    }

    #[test]
    fn interference_disjoint_and_planted() {
        let zeros = vec![Complex64::new(0.1, 1.0), Complex64::new(0.1, 2.0)];
        let candidates = vec![Candidate {
            beta: vec![1],
            rho: crate::continuation::RhoPoint::Pole,
            t: Complex64::new(0.5, 0.0),
        }];
        let rep = interference_check(&zeros, &candidates);
        assert!(rep.flagged.is_empty());
        assert!(rep.min_distance.unwrap() > 0.9);
        // planted coincidence
        let planted = vec![Candidate {
            beta: vec![1],
            rho: crate::continuation::RhoPoint::Pole,
            t: zeros[0],
        }];
        let rep = interference_check(&zeros, &planted);
        assert_eq!(rep.flagged.len(), 1);
        assert_eq!(rep.min_distance, Some(0.0));
    }

    #[test]
    fn genericity_rejects_imaginary_and_zero() {
        let mk = |c1: Option<Complex64>| PuiseuxBranch {
            c0: Complex64::new(1.0, 0.0),
            c1,
            theta1: Some(0.5),
            descending: true,
            residual_profile: vec![],
            samples: vec![],
        };
        assert!(!genericity_check(&mk(Some(Complex64::new(0.0, 0.7)))));
        assert!(!genericity_check(&mk(Some(Complex64::new(0.0, 0.0)))));
        assert!(!genericity_check(&mk(None)));
        assert!(genericity_check(&mk(Some(Complex64::new(-0.5, 0.1)))));
    }

    #[test]
    fn descending_branch_paired_selection() {
        // Lemma-3.6 shape: exactly one of the +-c0 branches descends
        let (h, base, direction, _) = igusa_fixture();
        let ep = h.term_index(&[1, 1, 1]).unwrap();
        let branch = descending_branch(&h, &base, &direction, Some(ep), 997, 1e-2).unwrap();
        assert!((branch.c0 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(branch.descending);
        // |Omega(X)| < 1 verified at 1e-3-scale X
        let small = branch
            .samples
            .iter()
            .find(|(x, _)| *x <= 1.5e-3)
            .expect("grid reaches 1e-3");
        assert!(small.1.norm() < 1.0);
    }
}
