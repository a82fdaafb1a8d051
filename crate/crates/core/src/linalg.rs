//! Exact rational linear algebra: integer matrix rank, strict-inequality
//! feasibility by Fourier–Motzkin elimination, and kernel bases. Small
//! dimensions only; everything is BigRational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn rat_frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rank of an integer matrix by rational Gaussian elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat(x)).collect())
        .collect();
    let mut rank = 0;
    let mut col = 0;
    while rank < m.len() && col < ncols {
        let pivot = (rank..m.len()).find(|&i| !m[i][col].is_zero());
        match pivot {
            None => col += 1,
            Some(p) => {
                m.swap(rank, p);
                let inv = m[rank][col].recip();
                for c in col..ncols {
                    let v = &m[rank][c] * &inv;
                    m[rank][c] = v;
                }
                for i in 0..m.len() {
                    if i != rank && !m[i][col].is_zero() {
                        let f = m[i][col].clone();
                        for c in col..ncols {
                            let v = &m[i][c] - &f * &m[rank][c];
                            m[i][c] = v;
                        }
                    }
                }
                rank += 1;
                col += 1;
            }
        }
    }
    rank
}

/// Integer basis of the kernel of the single row `a` in Q^n (n-1 vectors when
/// `a` is nonzero).
pub fn kernel_basis(a: &[i64]) -> Vec<Vec<i64>> {
    let pivot = match a.iter().position(|&x| x != 0) {
        Some(p) => p,
        None => {
            return (0..a.len())
                .map(|i| {
                    let mut v = vec![0i64; a.len()];
                    v[i] = 1;
                    v
                })
                .collect();
        }
    };
    let mut basis = Vec::new();
    for i in 0..a.len() {
        if i == pivot {
            continue;
        }
        let mut v = vec![0i64; a.len()];
        v[i] = a[pivot];
        v[pivot] = -a[i];
        basis.push(v);
    }
    basis
}

/// One strict inequality `coeffs . x + offset > 0`.
#[derive(Debug, Clone)]
pub struct StrictRow {
    pub coeffs: Vec<BigRational>,
    pub offset: BigRational,
}

impl StrictRow {
    fn eval_tail(&self, fixed: &[BigRational], from: usize) -> BigRational {
        let mut acc = self.offset.clone();
        for (i, v) in fixed.iter().enumerate() {
            acc += &self.coeffs[from + i] * v;
        }
        acc
    }
}

/// Decides whether a system of strict inequalities has a rational solution,
/// returning a witness point. Fourier–Motzkin elimination, exact throughout;
/// the witness is re-checked by substitution before returning.
pub fn strict_feasible(rows: &[StrictRow], nvars: usize) -> Option<Vec<BigRational>> {
    // stages[k] holds the system before eliminating variable k
    let mut stages: Vec<Vec<StrictRow>> = Vec::with_capacity(nvars);
    let mut current: Vec<StrictRow> = rows.to_vec();
    for k in 0..nvars {
        stages.push(current.clone());
        let mut next: Vec<StrictRow> = Vec::new();
        let (mut lowers, mut uppers): (Vec<&StrictRow>, Vec<&StrictRow>) = (vec![], vec![]);
        for row in &stages[k] {
            if row.coeffs[k].is_zero() {
                next.push(row.clone());
            } else if row.coeffs[k].is_positive() {
                lowers.push(row);
            } else {
                uppers.push(row);
            }
        }
        for lo in &lowers {
            for up in &uppers {
                // coeff_lo > 0, coeff_up < 0: scale and add to cancel x_k
                let a = lo.coeffs[k].clone();
                let b = -up.coeffs[k].clone();
                let mut coeffs = Vec::with_capacity(lo.coeffs.len());
                for (cl, cu) in lo.coeffs.iter().zip(&up.coeffs) {
                    coeffs.push(&b * cl + &a * cu);
                }
                let offset = &b * &lo.offset + &a * &up.offset;
                next.push(StrictRow { coeffs, offset });
            }
        }
        current = next;
    }
    // all variables eliminated: every remaining row must have positive offset
    for row in &current {
        if !row.offset.is_positive() {
            return None;
        }
    }
    // back-substitute a witness, last variable first
    let mut point: Vec<BigRational> = Vec::new(); // values of x_{k+1}..x_{n-1}
    for k in (0..nvars).rev() {
        let system = &stages[k];
        let mut lower: Option<BigRational> = None;
        let mut upper: Option<BigRational> = None;
        for row in system {
            let ck = &row.coeffs[k];
            if ck.is_zero() {
                continue;
            }
            // need ck * x_k + tail > 0 with the later variables already fixed
            let tail = row.eval_tail(&point, k + 1);
            let bound = -tail / ck;
            if ck.is_positive() {
                lower = Some(match lower {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                upper = Some(match upper {
                    Some(u) if u <= bound => u,
                    _ => bound,
                });
            }
        }
        let value = match (lower, upper) {
            (None, None) => BigRational::zero(),
            (Some(l), None) => l + BigRational::one(),
            (None, Some(u)) => u - BigRational::one(),
            (Some(l), Some(u)) => {
                debug_assert!(l < u, "interval must be nonempty after FM");
                (l + u) / rat(2)
            }
        };
        point.insert(0, value);
    }
    for row in rows {
        let mut acc = row.offset.clone();
        for (c, x) in row.coeffs.iter().zip(&point) {
            acc += c * x;
        }
        if !acc.is_positive() {
            return None;
        }
    }
    Some(point)
}
