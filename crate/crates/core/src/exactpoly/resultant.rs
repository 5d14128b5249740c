use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::IntPoly;
use super::PolyError;

/// Fraction-free (Bareiss) determinant of a square integer matrix given by rows.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n), size `m + n`.
pub fn sylvester_matrix(p: &IntPoly, q: &IntPoly) -> Vec<Vec<BigInt>> {
    let m = p.degree().unwrap_or(0);
    let n = q.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            rows[i][i + k] = p.coeff(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            rows[n + i][i + k] = q.coeff(n - k);
        }
    }
    rows
}

/// `Res(p, q)` as the Sylvester determinant. Zero if either input is zero.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> BigInt {
    match (p.degree(), q.degree()) {
        (None, _) | (_, None) => BigInt::zero(),
        (Some(0), Some(n)) => num_traits::pow(p.coeff(0), n),
        (Some(m), Some(0)) => num_traits::pow(q.coeff(0), m),
        _ => bareiss_det(sylvester_matrix(p, q)),
    }
}

/// `disc(p) = (-1)^(n(n-1)/2) Res(p, p') / lc(p)`.
pub fn discriminant(p: &IntPoly) -> Result<BigInt, PolyError> {
    let n = match p.degree() {
        Some(n) if n >= 2 => n,
        _ => return Err(PolyError::DegreeTooSmall),
    };
    let res = resultant(p, &p.derivative());
    let lc = p.leading_coeff().unwrap();
    let d = res / lc;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}
