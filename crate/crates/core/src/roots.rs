//! Roots of complex-coefficient polynomials by Aberth–Ehrlich simultaneous
//! iteration with deterministic starting points and a Newton polish.

use num_complex::Complex64;

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// All complex roots (with multiplicity) of `sum_k coeffs[k] z^k`.
/// Deterministic: same input, same output order.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().map_or(false, |v| v.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    // roots at the origin
    let mut zeros_at_origin = 0;
    while zeros_at_origin < deg && c[zeros_at_origin].norm() == 0.0 {
        zeros_at_origin += 1;
    }
    let c: Vec<Complex64> = c[zeros_at_origin..].to_vec();
    let m = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if m == 0 {
        return roots;
    }
    // monic normalization
    let lead = c[m];
    let monic: Vec<Complex64> = c.iter().map(|&x| x / lead).collect();
    // deterministic initial ring: radius from the Cauchy bound, offset angle
    let bound = 1.0
        + monic
            .iter()
            .take(m)
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
    let radius = bound.min(1.0 + monic[0].norm().powf(1.0 / m as f64));
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64) + 0.41;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for k in 0..m {
            let (v, d) = horner(&monic, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let newton = if d.norm() > 0.0 { v / d } else { v };
            let mut sum_inv = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    let diff = z[k] - zj;
                    if diff.norm() > 1e-300 {
                        sum_inv += diff.inv();
                    }
                }
            }
            let denom = 1.0 - newton * sum_inv;
            let step = if denom.norm() > 1e-12 {
                newton / denom
            } else {
                newton
            };
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish
    for zk in z.iter_mut() {
        for _ in 0..8 {
            let (v, d) = horner(&monic, *zk);
            if d.norm() == 0.0 || v.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if step.norm() > 0.5 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
            if step.norm() < 1e-16 * (1.0 + zk.norm()) {
                break;
            }
        }
    }
    // stable output order: by (re, im)
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    roots.extend(z);
    roots
}

/// Roots of an integer polynomial, constant term first.
pub fn int_polynomial_roots(coeffs: &[i64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = coeffs
        .iter()
        .map(|&x| Complex64::new(x as f64, 0.0))
        .collect();
    polynomial_roots(&c)
}
