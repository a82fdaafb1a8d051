//! Convergence/meromorphy polytopes `W(delta)` and `W_c(delta)`, supporting
//! faces with polar vectors, and the hypothesis checks behind the strong and
//! weak natural-boundary verdicts.
//!
//! Face support is decided by exact rational feasibility (Fourier–Motzkin on
//! the face parameterization); collinearity and gcd computations are exact.

use crate::cyclotomy::{is_cyclotomic_multivariate, remove_cyclotomic_factors, CyclotomyVerdict};
use crate::linalg::{kernel_basis, rat, strict_feasible, StrictRow};
use crate::poly::{ray_reduce, ExponentVector, SparsePolynomial, UnivariateIntPolynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("some alpha_(n)j is zero; pass the override to analyze anyway")]
    AlphaPrefixZero,
    #[error("coset support does not reduce to the ray: internal invariant breach")]
    RayReductionFailed,
}

/// `normal . sigma + offset > 0` rows over the first n real coordinates.
#[derive(Debug, Clone)]
pub struct HalfspaceRow {
    pub normal: Vec<i64>,
    pub offset: BigRational,
}

/// A conjunction of strict halfspaces in `R^n`.
#[derive(Debug, Clone)]
pub struct HalfspaceSystem {
    pub n: usize,
    pub rows: Vec<HalfspaceRow>,
}

impl HalfspaceSystem {
    /// The system of `W_c(delta)`: one row `sigma.alpha_(n)j + c alpha_{n+1,j} > delta`
    /// per column.
    pub fn w_c_system(h: &SparsePolynomial, c: i64, delta: &BigRational) -> Self {
        let rows = h
            .terms()
            .iter()
            .map(|t| HalfspaceRow {
                normal: t.exponent.prefix().iter().map(|&e| i64::from(e)).collect(),
                offset: rat(c * i64::from(t.exponent.last_entry())) - delta,
            })
            .collect();
        HalfspaceSystem { n: h.n(), rows }
    }

    pub fn contains(&self, sigma: &[f64]) -> bool {
        assert_eq!(sigma.len(), self.n);
        self.rows.iter().all(|row| {
            let dot: f64 = row
                .normal
                .iter()
                .zip(sigma)
                .map(|(&a, &x)| a as f64 * x)
                .sum();
            dot + rational_to_f64(&row.offset) > 0.0
        })
    }

    pub fn contains_exact(&self, sigma: &[BigRational]) -> bool {
        self.rows.iter().all(|row| {
            let mut acc = row.offset.clone();
            for (&a, x) in row.normal.iter().zip(sigma) {
                acc += rat(a) * x;
            }
            acc.is_positive()
        })
    }

    /// Shift every coordinate by `shift` (rows rewritten for the new origin).
    pub fn translate(&self, shift: &[i64]) -> HalfspaceSystem {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let dot: i64 = row.normal.iter().zip(shift).map(|(&a, &s)| a * s).sum();
                HalfspaceRow {
                    normal: row.normal.clone(),
                    offset: &row.offset - rat(dot),
                }
            })
            .collect();
        HalfspaceSystem {
            n: self.n,
            rows,
        }
    }

    /// Row set normalized by the gcd of each normal, sorted and deduplicated;
    /// two systems describe the same polyhedron pattern iff these match.
    pub fn normalized_rows(&self) -> Vec<(Vec<i64>, BigRational)> {
        let mut out: Vec<(Vec<i64>, BigRational)> = self
            .rows
            .iter()
            .map(|row| {
                let g = row
                    .normal
                    .iter()
                    .fold(0i64, |acc, &x| num_integer::gcd(acc, x.abs()));
                if g > 1 {
                    (
                        row.normal.iter().map(|&x| x / g).collect(),
                        &row.offset / rat(g),
                    )
                } else {
                    (row.normal.clone(), row.offset.clone())
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Membership of `sigma` in `W_c(delta)`.
pub fn membership(h: &SparsePolynomial, c: i64, delta: f64, sigma: &[f64]) -> bool {
    assert_eq!(sigma.len(), h.n());
    h.terms().iter().all(|t| {
        let dot: f64 = t
            .exponent
            .prefix()
            .iter()
            .zip(sigma)
            .map(|(&a, &x)| a as f64 * x)
            .sum();
        dot + (c * i64::from(t.exponent.last_entry())) as f64 > delta
    })
}

/// The collinear vector with relatively prime components.
pub fn primitive_vector(alpha: &ExponentVector) -> ExponentVector {
    alpha.primitive()
}

/// Everything the boundary theorems ask about one supporting face.
#[derive(Debug, Clone)]
pub struct FaceReport {
    /// Representative term index (first column on the ray).
    pub e: usize,
    pub polar: ExponentVector,
    pub primitive: ExponentVector,
    pub lambda_e: Vec<usize>,
    pub nondegenerate: bool,
    pub hypothesis_h: bool,
    pub coprime_condition: bool,
    pub supporting: bool,
    /// Rational point on the face with every off-ray constraint strictly
    /// positive (re-checked by substitution).
    pub witness: Option<Vec<BigRational>>,
}

/// Rational parameterization of the affine face `sigma.alpha_(n)e + c a_{n+1,e} = 0`:
/// a particular solution and an integer basis of the tangent directions.
pub fn face_parameterization(
    h: &SparsePolynomial,
    c: i64,
    e: usize,
) -> Option<(Vec<BigRational>, Vec<Vec<i64>>)> {
    let col = &h.terms()[e].exponent;
    let prefix: Vec<i64> = col.prefix().iter().map(|&x| i64::from(x)).collect();
    let pivot = prefix.iter().position(|&x| x != 0)?;
    let mut particular = vec![BigRational::zero(); h.n()];
    particular[pivot] = BigRational::new(
        BigInt::from(-c * i64::from(col.last_entry())),
        BigInt::from(prefix[pivot]),
    );
    Some((particular, kernel_basis(&prefix)))
}

/// Exact feasibility witness for face support: a rational point on the face
/// hyperplane where every off-ray constraint holds strictly.
pub fn face_support_witness(
    h: &SparsePolynomial,
    c: i64,
    e: usize,
) -> Option<Vec<BigRational>> {
    let (particular, basis) = face_parameterization(h, c, e)?;
    let anchor = &h.terms()[e].exponent;
    let mut rows = Vec::new();
    for t in h.terms() {
        if t.exponent.collinear(anchor) {
            continue;
        }
        // row in tangent coordinates y: offset = row(particular), coeffs = v_k . alpha_(n)j
        let prefix: Vec<i64> = t.exponent.prefix().iter().map(|&x| i64::from(x)).collect();
        let mut offset = rat(c * i64::from(t.exponent.last_entry()));
        for (&a, x) in prefix.iter().zip(&particular) {
            offset += rat(a) * x;
        }
        let coeffs: Vec<BigRational> = basis
            .iter()
            .map(|v| rat(v.iter().zip(&prefix).map(|(&vk, &aj)| vk * aj).sum()))
            .collect();
        rows.push(StrictRow { coeffs, offset });
    }
    let y = strict_feasible(&rows, basis.len())?;
    let mut sigma = particular;
    for (yk, v) in y.iter().zip(&basis) {
        for (s, &vi) in sigma.iter_mut().zip(v) {
            *s += yk * rat(vi);
        }
    }
    // re-check by substitution: on the face exactly, off-ray strictly positive
    let mut on_face = rat(c * i64::from(anchor.last_entry()));
    for (&a, x) in anchor.prefix().iter().zip(&sigma) {
        on_face += rat(i64::from(a)) * x;
    }
    if !on_face.is_zero() {
        return None;
    }
    for t in h.terms() {
        if t.exponent.collinear(anchor) {
            continue;
        }
        let mut v = rat(c * i64::from(t.exponent.last_entry()));
        for (&a, x) in t.exponent.prefix().iter().zip(&sigma) {
            v += rat(i64::from(a)) * x;
        }
        if !v.is_positive() {
            return None;
        }
    }
    Some(sigma)
}

/// `~[h]_e` is squarefree: gcd with its derivative is constant. Exact.
pub fn is_nondegenerate_face(h: &SparsePolynomial, e: usize) -> bool {
    let mp = h.main_part(e);
    let (f, _) = ray_reduce(&mp).expect("main part lies on one ray");
    if f.is_constant() {
        return false;
    }
    univariate_gcd_degree(&f, &f.derivative()) == 0
}

/// Degree of gcd over Q of two integer polynomials (monic Euclid, exact).
pub fn univariate_gcd_degree(a: &UnivariateIntPolynomial, b: &UnivariateIntPolynomial) -> usize {
    let to_rat = |p: &UnivariateIntPolynomial| -> Vec<BigRational> {
        p.coeffs.iter().map(|&c| rat(c)).collect()
    };
    let trim = |v: &mut Vec<BigRational>| {
        while v.len() > 1 && v.last().map_or(false, |x| x.is_zero()) {
            v.pop();
        }
    };
    let is_zero_poly = |v: &[BigRational]| v.len() == 1 && v[0].is_zero();
    let mut p = to_rat(a);
    let mut q = to_rat(b);
    trim(&mut p);
    trim(&mut q);
    while !is_zero_poly(&q) {
        // p mod q
        let dq = q.len() - 1;
        let lead = q[dq].clone();
        while p.len() >= q.len() && !is_zero_poly(&p) {
            let dp = p.len() - 1;
            let f = &p[dp] / &lead;
            for i in 0..=dq {
                let v = &p[dp - dq + i] - &f * &q[i];
                p[dp - dq + i] = v;
            }
            trim(&mut p);
            if p.len() == 1 && p[0].is_zero() {
                break;
            }
            if p.len() <= dq {
                break;
            }
        }
        std::mem::swap(&mut p, &mut q);
        trim(&mut q);
    }
    p.len() - 1
}

/// Exact integer rank of the first-n-rows block exceeds 1 (hypothesis (1.2)).
pub fn rank_condition(h: &SparsePolynomial) -> bool {
    let rows: Vec<Vec<i64>> = h
        .terms()
        .iter()
        .map(|t| t.exponent.prefix().iter().map(|&x| i64::from(x)).collect())
        .collect();
    crate::linalg::integer_rank(&rows) > 1
}

fn prefix_collinear(a: &ExponentVector, b: &ExponentVector) -> bool {
    crate::poly::collinear_slices(a.prefix(), b.prefix())
}

/// Property (H) at face e: every column off the ray of `alpha_e` has its
/// first-n block off the ray of `alpha_(n)e`.
pub fn hypothesis_h(h: &SparsePolynomial, e: usize) -> bool {
    let anchor = &h.terms()[e].exponent;
    h.terms().iter().all(|t| {
        t.exponent.collinear(anchor) || !prefix_collinear(&t.exponent, anchor)
    })
}

/// Signed collinearity: `diff` lies on the rational line of `alpha` (2x2 minors).
fn diff_on_ray(diff: &[i64], alpha: &ExponentVector) -> bool {
    let b: Vec<i64> = alpha.0.iter().map(|&x| i64::from(x)).collect();
    for i in 0..diff.len() {
        for k in (i + 1)..diff.len() {
            if (diff[i] as i128) * (b[k] as i128) != (diff[k] as i128) * (b[i] as i128) {
                return false;
            }
        }
    }
    true
}

/// Condition (2.1): for every off-ray coset, the ray polynomial `~[h]_e` and
/// the coset polynomial reduced to one variable are relatively prime.
pub fn coprime_condition(h: &SparsePolynomial, e: usize) -> Result<bool, GeometryError> {
    let anchor = h.terms()[e].exponent.clone();
    let prim = anchor.primitive();
    let pivot = prim.0.iter().position(|&x| x != 0).unwrap();
    let mp = h.main_part(e);
    let (a_poly, _) = ray_reduce(&mp).expect("main part lies on one ray");

    let mut seen_cosets: Vec<usize> = Vec::new();
    for j0 in 0..h.r() {
        let col_j0 = &h.terms()[j0].exponent;
        if prefix_collinear(col_j0, &anchor) {
            continue;
        }
        // dedupe by coset alpha_j0 + Q alpha_e
        let same_coset = |a: &ExponentVector, b: &ExponentVector| -> bool {
            let diff: Vec<i64> = a
                .0
                .iter()
                .zip(&b.0)
                .map(|(&x, &y)| i64::from(x) - i64::from(y))
                .collect();
            diff_on_ray(&diff, &anchor)
        };
        if seen_cosets
            .iter()
            .any(|&prev| same_coset(&h.terms()[prev].exponent, col_j0))
        {
            continue;
        }
        seen_cosets.push(j0);
        // gather the coset and the integer offsets m_j along the primitive ray
        let mut offsets: Vec<(i64, i64)> = Vec::new(); // (m_j, a_j)
        for t in h.terms() {
            if !same_coset(&t.exponent, col_j0) {
                continue;
            }
            let diff: Vec<i64> = t
                .exponent
                .0
                .iter()
                .zip(&col_j0.0)
                .map(|(&x, &y)| i64::from(x) - i64::from(y))
                .collect();
            let m = diff[pivot] / i64::from(prim.0[pivot]);
            // exactness: diff == m * prim
            if diff
                .iter()
                .zip(&prim.0)
                .any(|(&d, &p)| d != m * i64::from(p))
            {
                return Err(GeometryError::RayReductionFailed);
            }
            offsets.push((m, t.coeff));
        }
        let m_min = offsets.iter().map(|&(m, _)| m).min().unwrap();
        let deg = offsets.iter().map(|&(m, _)| m - m_min).max().unwrap() as usize;
        let mut coeffs = vec![0i64; deg + 1];
        for (m, a) in offsets {
            coeffs[(m - m_min) as usize] += a;
        }
        let b_poly = UnivariateIntPolynomial::new(coeffs);
        if univariate_gcd_degree(&a_poly, &b_poly) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One report per distinct supporting face (columns merged by primitive
/// vector), with all theorem-hypothesis flags evaluated.
pub fn faces(h: &SparsePolynomial, c: i64) -> Vec<FaceReport> {
    let mut reports = Vec::new();
    let mut seen: Vec<ExponentVector> = Vec::new();
    for e in 0..h.r() {
        let prim = h.terms()[e].exponent.primitive();
        if seen.contains(&prim) {
            continue;
        }
        seen.push(prim.clone());
        let witness = face_support_witness(h, c, e);
        if witness.is_none() {
            continue;
        }
        reports.push(FaceReport {
            e,
            polar: h.terms()[e].exponent.clone(),
            primitive: prim,
            lambda_e: h.lambda(e),
            nondegenerate: is_nondegenerate_face(h, e),
            hypothesis_h: hypothesis_h(h, e),
            coprime_condition: coprime_condition(h, e).unwrap_or(false),
            supporting: true,
            witness,
        });
    }
    reports
}

/// Natural-boundary verdict kinds of the two theorems.
#[derive(Debug, Clone)]
pub enum BoundaryVerdict {
    EntireMeromorphic,
    StrongBoundary(Vec<FaceReport>),
    WeakBoundary(Vec<FaceReport>),
    RankConditionFailed,
    Inconclusive(Vec<FaceReport>),
}

impl BoundaryVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            BoundaryVerdict::EntireMeromorphic => "EntireMeromorphic",
            BoundaryVerdict::StrongBoundary(_) => "StrongBoundary",
            BoundaryVerdict::WeakBoundary(_) => "WeakBoundary",
            BoundaryVerdict::RankConditionFailed => "RankConditionFailed",
            BoundaryVerdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

/// Full classification record: verdict plus the evidence it rests on.
#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub verdict: BoundaryVerdict,
    pub removed_factors: BTreeMap<ExponentVector, u32>,
    pub residual: SparsePolynomial,
    /// Cyclotomicity of the residual (diagnostic; `UnknownUpToBound` does not
    /// block the face analysis but is reported).
    pub residual_cyclotomicity: Option<CyclotomyVerdict>,
    pub all_faces: Vec<FaceReport>,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Analyze polynomials violating the standing assumption `alpha_(n)j != 0`.
    pub allow_alpha_prefix_zero: bool,
    pub cyclo_beta_bound: u32,
    /// Defaults to twice the residual's total degree.
    pub cyclo_degree_bound: Option<u32>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            allow_alpha_prefix_zero: false,
            cyclo_beta_bound: 3,
            cyclo_degree_bound: None,
        }
    }
}

pub fn classify_boundary(h: &SparsePolynomial, c: i64) -> Result<ClassifyOutcome, GeometryError> {
    classify_boundary_with(h, c, &ClassifyOptions::default())
}

/// The full pipeline: remove cyclotomic factors, decide residual
/// cyclotomicity, check the rank hypothesis, then evaluate every supporting
/// face against the strong (non-degenerate + (H)) and weak (non-degenerate +
/// coprimality) hypotheses.
pub fn classify_boundary_with(
    h: &SparsePolynomial,
    c: i64,
    opts: &ClassifyOptions,
) -> Result<ClassifyOutcome, GeometryError> {
    if !h.alpha_n_nonzero() && !opts.allow_alpha_prefix_zero {
        return Err(GeometryError::AlphaPrefixZero);
    }
    let (residual, removed_factors) = remove_cyclotomic_factors(h);
    if residual.is_one() {
        return Ok(ClassifyOutcome {
            verdict: BoundaryVerdict::EntireMeromorphic,
            removed_factors,
            residual,
            residual_cyclotomicity: None,
            all_faces: Vec::new(),
        });
    }
    let degree_bound = opts
        .cyclo_degree_bound
        .unwrap_or(2 * residual.max_total_degree().max(1));
    let cyclo = is_cyclotomic_multivariate(&residual, opts.cyclo_beta_bound, degree_bound);
    if let CyclotomyVerdict::Cyclotomic { .. } = cyclo {
        return Ok(ClassifyOutcome {
            verdict: BoundaryVerdict::EntireMeromorphic,
            removed_factors,
            residual: residual.clone(),
            residual_cyclotomicity: Some(cyclo),
            all_faces: Vec::new(),
        });
    }
    if !rank_condition(&residual) {
        return Ok(ClassifyOutcome {
            verdict: BoundaryVerdict::RankConditionFailed,
            removed_factors,
            residual: residual.clone(),
            residual_cyclotomicity: Some(cyclo),
            all_faces: Vec::new(),
        });
    }
    let all_faces = faces(&residual, c);
    let strong: Vec<FaceReport> = all_faces
        .iter()
        .filter(|f| f.nondegenerate && f.hypothesis_h)
        .cloned()
        .collect();
    let verdict = if !strong.is_empty() {
        BoundaryVerdict::StrongBoundary(strong)
    } else {
        let weak: Vec<FaceReport> = all_faces
            .iter()
            .filter(|f| f.nondegenerate && f.coprime_condition)
            .cloned()
            .collect();
        if !weak.is_empty() {
            BoundaryVerdict::WeakBoundary(weak)
        } else {
            BoundaryVerdict::Inconclusive(all_faces.clone())
        }
    };
    Ok(ClassifyOutcome {
        verdict,
        removed_factors,
        residual: residual.clone(),
        residual_cyclotomicity: Some(cyclo),
        all_faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igusa::igusa_h;
    use crate::linalg::rat_frac;
    use crate::poly::parse_polynomial;

    #[test]
    fn membership_examples() {
        let h = igusa_h(2).unwrap();
        assert!(membership(&h, 1, 0.0, &[0.0, 0.0]));
        assert!(!membership(&h, 1, 0.0, &[-1.0, -0.1]));
        assert!(membership(&h, 1, 1.0, &[3.0, 3.0]));
    }

    #[test]
    fn faces_igusa() {
        let h = igusa_h(2).unwrap();
        let reports = faces(&h, 1);
        assert_eq!(reports.len(), 3);
        for report in &reports {
            assert!(report.supporting);
            let w = report.witness.as_ref().unwrap();
            // witness satisfies the face equality exactly
            let col = &report.polar;
            let mut acc = rat(i64::from(col.last_entry()));
            for (&a, x) in col.prefix().iter().zip(w) {
                acc += rat(i64::from(a)) * x;
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn faces_single_ray() {
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let reports = faces(&h, 1);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].polar.0, vec![1, 1, 0]);
    }

    #[test]
    fn faces_merge_proportional_columns() {
        // (1,0,1) and (2,0,2) share the ray: one face
        let h = parse_polynomial("1 - X1*X3 - X1^2*X3^2 - X2*X3", 2).unwrap();
        let reports = faces(&h, 1);
        let rays: Vec<&[u32]> = reports.iter().map(|r| r.primitive.0.as_slice()).collect();
        assert_eq!(rays.iter().filter(|r| **r == [1, 0, 1]).count(), 1);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(
            primitive_vector(&ExponentVector(vec![2, 2, 0])).0,
            vec![1, 1, 0]
        );
        assert_eq!(
            primitive_vector(&ExponentVector(vec![1, 0, 1])).0,
            vec![1, 0, 1]
        );
        assert_eq!(
            primitive_vector(&ExponentVector(vec![6, 4, 2])).0,
            vec![3, 2, 1]
        );
    }

    #[test]
    fn nondegenerate_examples() {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        assert!(is_nondegenerate_face(&h, e));

        // (1 - T)^2 = 1 - 2T + T^2 on the ray
        let h = parse_polynomial("1 - 2*X1*X3 + X1^2*X3^2", 2).unwrap();
        assert!(!is_nondegenerate_face(&h, 0));

        // 1 - T^2: distinct roots
        let h = parse_polynomial("1 - X1^2*X3^2", 2).unwrap();
        assert!(is_nondegenerate_face(&h, 0));
    }

    #[test]
    fn rank_examples() {
        assert!(rank_condition(&igusa_h(2).unwrap()));
        let h = parse_polynomial("1 + X1*X2 + X1^2*X2^2*X3", 2).unwrap();
        assert!(!rank_condition(&h));
        let h = parse_polynomial("1 - X1 - X2", 2).unwrap();
        assert!(rank_condition(&h));
    }

    #[test]
    fn hypothesis_h_examples() {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        assert!(hypothesis_h(&h, e));

        let h = parse_polynomial("1 - X1*X2*X3 + X1^2*X2^2*X3 - 2*X2*X3", 2).unwrap();
        let e = h.term_index(&[1, 1, 1]).unwrap();
        assert!(!hypothesis_h(&h, e));

        // every column on the ray: vacuously true
        let h = parse_polynomial("1 - X1*X2 + X1^2*X2^2", 2).unwrap();
        assert!(hypothesis_h(&h, 0));
    }

    #[test]
    fn coprime_examples() {
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        assert_eq!(coprime_condition(&h, e), Ok(true));

        // A = 1 - T^2 on the ray of e, coset image 1 - T: common factor
        let h = parse_polynomial("1 - X1^2*X2^2 + X1*X3 - X1^2*X2*X3", 2).unwrap();
        let e = h.term_index(&[2, 2, 0]).unwrap();
        assert_eq!(coprime_condition(&h, e), Ok(false));

        // vacuous: single-ray polynomial
        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        assert_eq!(coprime_condition(&h, 0), Ok(true));
    }

    #[test]
    fn classify_examples() {
        let out = classify_boundary(&igusa_h(2).unwrap(), 1).unwrap();
        assert_eq!(out.verdict.kind(), "StrongBoundary");

        let h = parse_polynomial("1 - X1*X2", 2).unwrap();
        let out = classify_boundary(&h, 1).unwrap();
        assert_eq!(out.verdict.kind(), "EntireMeromorphic");

        let h = parse_polynomial("1 + X1*X2 + X1^2*X2^2*X3", 2).unwrap();
        let out = classify_boundary(&h, 1).unwrap();
        assert_eq!(out.verdict.kind(), "RankConditionFailed");
    }

    #[test]
    fn classify_refuses_flagged_input() {
        let h = parse_polynomial("1 - X3 + X1*X2", 2).unwrap();
        assert_eq!(
            classify_boundary(&h, 1).unwrap_err(),
            GeometryError::AlphaPrefixZero
        );
        let opts = ClassifyOptions {
            allow_alpha_prefix_zero: true,
            ..Default::default()
        };
        assert!(classify_boundary_with(&h, 1, &opts).is_ok());
    }

    #[test]
    fn hypothesis_sets_consistent() {
        // when (H) holds, the coprime quantifier set equals the (H)-quantified
        // set restricted to non-ray columns (set-level consistency)
        let h = igusa_h(2).unwrap();
        let e = h.term_index(&[1, 0, 1]).unwrap();
        if hypothesis_h(&h, e) {
            let anchor = &h.terms()[e].exponent;
            for t in h.terms() {
                let full_off_ray = !t.exponent.collinear(anchor);
                let prefix_off_ray = !crate::poly::collinear_slices(
                    t.exponent.prefix(),
                    anchor.prefix(),
                );
                assert_eq!(full_off_ray, prefix_off_ray);
            }
        }
    }

    #[test]
    fn gcd_degree_helper() {
        let a = UnivariateIntPolynomial::new(vec![1, 0, -1]); // (1-T)(1+T)
        let b = UnivariateIntPolynomial::new(vec![1, -1]); // 1-T
        assert_eq!(univariate_gcd_degree(&a, &b), 1);
        let c = UnivariateIntPolynomial::new(vec![1, 1]); // 1+T
        assert_eq!(univariate_gcd_degree(&b, &c), 0);
        assert_eq!(univariate_gcd_degree(&a, &a.derivative()), 0);
    }

    #[test]
    fn w_c_system_and_translate() {
        let h = igusa_h(2).unwrap();
        let sys = HalfspaceSystem::w_c_system(&h, 1, &rat(0));
        assert!(sys.contains(&[0.1, 0.1]));
        assert!(!sys.contains(&[-2.0, 0.0]));
        let shifted = sys.translate(&[1, 1]);
        // w = s - 1: the shifted system lives in s-coordinates
        assert!(shifted.contains(&[1.1, 1.1]));
        assert!(!shifted.contains(&[0.4, 0.5]));
        assert_eq!(
            shifted.normalized_rows(),
            crate::igusa::igusa_boundary(2).unwrap().normalized_rows()
        );
        assert_eq!(sys.contains_exact(&[rat_frac(1, 10), rat_frac(1, 10)]), true);
    }
}
