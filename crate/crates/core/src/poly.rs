//! Exact sparse polynomials with constant term 1, their exponent matrices,
//! and ray restrictions.
//!
//! A polynomial `h = 1 + sum_j a_j X^{alpha_j}` over `X_1..X_{n+1}` is stored
//! without its constant term, in a canonical graded-lexicographic term order.
//! Collinearity of exponent columns is decided in exact integer arithmetic
//! (vanishing 2x2 minors); no floating point enters structural decisions.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("polynomial has no constant term")]
    MissingConstantTerm,
    #[error("constant term is {found}, must be 1")]
    ConstantTermNotOne { found: i64 },
    #[error("repeated exponent vector {0}")]
    RepeatedExponent(String),
    #[error("term with zero coefficient")]
    ZeroCoefficientTerm,
    #[error("zero exponent vector in a non-constant term")]
    ZeroExponentVector,
    #[error("variable X{index} out of range, expected X1..X{max}")]
    VariableOutOfRange { index: usize, max: usize },
    #[error("term exponent not collinear with the ray")]
    NonCollinearTerm,
    #[error("coefficient overflow")]
    CoefficientOverflow,
}

/// Exponent column `alpha_{.j}` of length n+1. The first n entries form the
/// distinguished prefix `alpha_{(n)j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// First n entries (`alpha_{(n)j}`).
    pub fn prefix(&self) -> &[u32] {
        &self.0[..self.0.len() - 1]
    }

    /// Last entry (`alpha_{n+1,j}`).
    pub fn last_entry(&self) -> u32 {
        *self.0.last().unwrap()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The collinear vector whose nonzero components are relatively prime.
    pub fn primitive(&self) -> ExponentVector {
        let g = self.0.iter().fold(0u32, |acc, &e| num_integer::gcd(acc, e));
        if g <= 1 {
            return self.clone();
        }
        ExponentVector(self.0.iter().map(|&e| e / g).collect())
    }

    /// Exact collinearity over Q (all 2x2 minors vanish). For nonzero
    /// nonnegative vectors this is membership in the positive rational ray.
    pub fn collinear(&self, other: &ExponentVector) -> bool {
        collinear_slices(&self.0, &other.0)
    }
}

/// All 2x2 minors of the pair vanish.
pub fn collinear_slices(a: &[u32], b: &[u32]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    for i in 0..a.len() {
        for k in (i + 1)..a.len() {
            if u64::from(a[i]) * u64::from(b[k]) != u64::from(a[k]) * u64::from(b[i]) {
                return false;
            }
        }
    }
    true
}

fn grlex(a: &ExponentVector, b: &ExponentVector) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| a.0.cmp(&b.0))
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// One non-constant term `a_j X^{alpha_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub exponent: ExponentVector,
}

/// `h = 1 + sum_j a_j X^{alpha_j}` in n+1 variables (n "s-variables" plus the
/// distinguished last slot). The constant 1 is implicit and never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    n: usize,
    terms: Vec<Term>,
    alpha_n_nonzero: bool,
}

impl SparsePolynomial {
    /// Validates and canonicalizes. Terms must have distinct nonzero exponent
    /// vectors of length n+1 and nonzero coefficients.
    pub fn new(n: usize, mut terms: Vec<Term>) -> Result<Self, PolyError> {
        assert!(n >= 1, "need at least one s-variable");
        for t in &terms {
            assert_eq!(t.exponent.len(), n + 1, "exponent length must be n+1");
            if t.coeff == 0 {
                return Err(PolyError::ZeroCoefficientTerm);
            }
            if t.exponent.is_zero() {
                return Err(PolyError::ZeroExponentVector);
            }
        }
        terms.sort_by(|a, b| grlex(&a.exponent, &b.exponent));
        for w in terms.windows(2) {
            if w[0].exponent == w[1].exponent {
                return Err(PolyError::RepeatedExponent(w[0].exponent.to_string()));
            }
        }
        let alpha_n_nonzero = terms
            .iter()
            .all(|t| t.exponent.prefix().iter().any(|&e| e != 0));
        Ok(SparsePolynomial {
            n,
            terms,
            alpha_n_nonzero,
        })
    }

    /// The constant polynomial 1.
    pub fn one(n: usize) -> Self {
        SparsePolynomial {
            n,
            terms: Vec::new(),
            alpha_n_nonzero: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of non-constant terms (`r`).
    pub fn r(&self) -> usize {
        self.terms.len()
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Whether every `alpha_{(n)j}` is nonzero (the standing assumption).
    pub fn alpha_n_nonzero(&self) -> bool {
        self.alpha_n_nonzero
    }

    /// Coefficient vector `(a_1, ..., a_r)` in canonical order.
    pub fn coefficients(&self) -> Vec<i64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    /// Index of the term with the given exponent, if present.
    pub fn term_index(&self, exponent: &[u32]) -> Option<usize> {
        self.terms.iter().position(|t| t.exponent.0 == exponent)
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exponent.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// `1 + sum a_j prod x_l^{alpha_lj}` at a complex point of length n+1.
    pub fn evaluate(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.n + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for t in &self.terms {
            let mut m = Complex64::new(t.coeff as f64, 0.0);
            for (xi, &e) in x.iter().zip(&t.exponent.0) {
                if e > 0 {
                    m *= xi.powu(e);
                }
            }
            acc += m;
        }
        acc
    }

    /// The e-th main part: terms whose full exponent lies on the rational ray
    /// through `alpha_e`, plus the implicit constant 1.
    pub fn main_part(&self, e: usize) -> SparsePolynomial {
        let anchor = &self.terms[e].exponent;
        let terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| t.exponent.collinear(anchor))
            .cloned()
            .collect();
        let alpha_n_nonzero = terms
            .iter()
            .all(|t| t.exponent.prefix().iter().any(|&x| x != 0));
        SparsePolynomial {
            n: self.n,
            terms,
            alpha_n_nonzero,
        }
    }

    /// Indexes `Lambda_e` of the terms on the ray of `alpha_e`.
    pub fn lambda(&self, e: usize) -> Vec<usize> {
        let anchor = &self.terms[e].exponent;
        (0..self.terms.len())
            .filter(|&j| self.terms[j].exponent.collinear(anchor))
            .collect()
    }

    /// Renders in the canonical grammar; `parse_polynomial` inverts this exactly.
    pub fn render(&self) -> String {
        let mut s = String::from("1");
        for t in &self.terms {
            s.push_str(if t.coeff < 0 { " - " } else { " + " });
            let mag = t.coeff.unsigned_abs();
            let mut factors: Vec<String> = Vec::new();
            if mag != 1 {
                factors.push(mag.to_string());
            }
            for (i, &e) in t.exponent.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("X{}", i + 1)),
                    _ => factors.push(format!("X{}^{}", i + 1, e)),
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

/// Univariate reduction of a single-ray polynomial: returns `~[h]_e(T)` with
/// `T = X^{primitive}` and the primitive vector itself. Every term must be a
/// positive multiple of the ray; substitution back reconstructs the input.
pub fn ray_reduce(
    h_main: &SparsePolynomial,
) -> Result<(UnivariateIntPolynomial, ExponentVector), PolyError> {
    let first = h_main
        .terms
        .first()
        .ok_or(PolyError::NonCollinearTerm)?
        .exponent
        .clone();
    let primitive = first.primitive();
    let pivot = primitive.0.iter().position(|&e| e != 0).unwrap();
    let mut coeffs = vec![1i64];
    for t in &h_main.terms {
        if !t.exponent.collinear(&primitive) {
            return Err(PolyError::NonCollinearTerm);
        }
        let q = t.exponent.0[pivot] / primitive.0[pivot];
        // exactness check: alpha_j == q * primitive
        if t.exponent
            .0
            .iter()
            .zip(&primitive.0)
            .any(|(&a, &p)| a != q * p)
        {
            return Err(PolyError::NonCollinearTerm);
        }
        let q = q as usize;
        if coeffs.len() <= q {
            coeffs.resize(q + 1, 0);
        }
        coeffs[q] = coeffs[q]
            .checked_add(t.coeff)
            .ok_or(PolyError::CoefficientOverflow)?;
    }
    Ok((UnivariateIntPolynomial::new(coeffs), primitive))
}

/// Substitute `T = X^{primitive}` into a univariate polynomial, producing the
/// sparse polynomial it reconstructs (constant term must be 1).
pub fn ray_expand(
    f: &UnivariateIntPolynomial,
    primitive: &ExponentVector,
    n: usize,
) -> Result<SparsePolynomial, PolyError> {
    if f.coeffs.first() != Some(&1) {
        return Err(PolyError::ConstantTermNotOne {
            found: f.coeffs.first().copied().unwrap_or(0),
        });
    }
    let mut terms = Vec::new();
    for (q, &c) in f.coeffs.iter().enumerate().skip(1) {
        if c != 0 {
            let expo = ExponentVector(primitive.0.iter().map(|&e| e * q as u32).collect());
            terms.push(Term {
                coeff: c,
                exponent: expo,
            });
        }
    }
    SparsePolynomial::new(n, terms)
}

/// Integer polynomial in one variable, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateIntPolynomial {
    pub coeffs: Vec<i64>,
}

impl UnivariateIntPolynomial {
    /// Trims trailing zeros.
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        UnivariateIntPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn derivative(&self) -> UnivariateIntPolynomial {
        if self.coeffs.len() <= 1 {
            return UnivariateIntPolynomial::new(vec![0]);
        }
        UnivariateIntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as i64)
                .collect(),
        )
    }

    pub fn evaluate(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c as f64;
        }
        acc
    }
}

impl fmt::Display for UnivariateIntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 && !(k == 0 && self.coeffs.len() == 1) {
                continue;
            }
            if wrote {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                f.write_str("-")?;
            }
            let mag = c.unsigned_abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "T")?;
                    } else {
                        write!(f, "T^{k}")?;
                    }
                }
            }
            wrote = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Int(i64),
    Var(usize),
    Caret,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: i64 = text[start..i].parse().map_err(|_| PolyError::Syntax {
                    pos: start,
                    msg: "integer too large".into(),
                })?;
                out.push((start, Token::Int(v)));
            }
            b'X' | b'x' => {
                let start = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(PolyError::Syntax {
                        pos: start,
                        msg: "variable needs an index, e.g. X1".into(),
                    });
                }
                let idx: usize = text[ds..i].parse().map_err(|_| PolyError::Syntax {
                    pos: ds,
                    msg: "variable index too large".into(),
                })?;
                out.push((start, Token::Var(idx)));
            }
            _ => {
                return Err(PolyError::Syntax {
                    pos: i,
                    msg: format!("unexpected character {:?}", b as char),
                })
            }
        }
    }
    Ok(out)
}

/// Parses the canonical grammar: integer coefficients, `*` products, `^`
/// powers, `+`/`-` between terms, variables `X1..X{n+1}`. The constant term
/// must be present and sum to exactly 1.
pub fn parse_polynomial(text: &str, n: usize) -> Result<SparsePolynomial, PolyError> {
    assert!(n >= 1);
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(PolyError::Syntax {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut constant_sum: i64 = 0;
    let mut saw_constant = false;
    let mut k = 0usize;
    let mut first = true;
    while k < tokens.len() {
        let mut sign = 1i64;
        match tokens[k].1 {
            Token::Plus => {
                k += 1;
            }
            Token::Minus => {
                sign = -1;
                k += 1;
            }
            _ if first => {}
            _ => {
                return Err(PolyError::Syntax {
                    pos: tokens[k].0,
                    msg: "expected + or - between terms".into(),
                })
            }
        }
        first = false;
        // factors separated by '*'
        let mut coeff: i64 = sign;
        let mut exps = vec![0u32; n + 1];
        let mut saw_factor = false;
        let mut explicit_zero = false;
        loop {
            if k >= tokens.len() {
                break;
            }
            match tokens[k].1 {
                Token::Int(v) => {
                    coeff = coeff.checked_mul(v).ok_or(PolyError::CoefficientOverflow)?;
                    if v == 0 {
                        explicit_zero = true;
                    }
                    k += 1;
                }
                Token::Var(idx) => {
                    if idx == 0 || idx > n + 1 {
                        return Err(PolyError::VariableOutOfRange {
                            index: idx,
                            max: n + 1,
                        });
                    }
                    let mut e: u32 = 1;
                    k += 1;
                    if k < tokens.len() && tokens[k].1 == Token::Caret {
                        k += 1;
                        match tokens.get(k).map(|t| &t.1) {
                            Some(&Token::Int(v)) if v >= 1 && v <= u32::MAX as i64 => {
                                e = v as u32;
                                k += 1;
                            }
                            _ => {
                                return Err(PolyError::Syntax {
                                    pos: tokens[k - 1].0,
                                    msg: "exponent must be a positive integer".into(),
                                })
                            }
                        }
                    }
                    exps[idx - 1] += e;
                }
                _ => {
                    return Err(PolyError::Syntax {
                        pos: tokens[k].0,
                        msg: "expected a coefficient or variable".into(),
                    })
                }
            }
            saw_factor = true;
            if k < tokens.len() && tokens[k].1 == Token::Star {
                k += 1;
                continue;
            }
            break;
        }
        if !saw_factor {
            return Err(PolyError::Syntax {
                pos: tokens.get(k).map_or(text.len(), |t| t.0),
                msg: "empty term".into(),
            });
        }
        let expo = ExponentVector(exps);
        if expo.is_zero() {
            saw_constant = true;
            constant_sum = constant_sum
                .checked_add(coeff)
                .ok_or(PolyError::CoefficientOverflow)?;
        } else {
            if coeff == 0 || explicit_zero {
                return Err(PolyError::ZeroCoefficientTerm);
            }
            if terms.iter().any(|t| t.exponent == expo) {
                return Err(PolyError::RepeatedExponent(expo.to_string()));
            }
            terms.push(Term {
                coeff,
                exponent: expo,
            });
        }
    }
    if !saw_constant {
        return Err(PolyError::MissingConstantTerm);
    }
    if constant_sum != 1 {
        return Err(PolyError::ConstantTermNotOne {
            found: constant_sum,
        });
    }
    SparsePolynomial::new(n, terms)
}
