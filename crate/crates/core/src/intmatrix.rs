//! Exact square integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactpoly::{bareiss_det, isolate_real_roots, IntPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix must have dimension at least 1")]
    Empty,
    #[error("entry count {got} does not match {dim}x{dim}")]
    BadShape { dim: usize, got: usize },
    #[error("characteristic polynomial has non-real roots ({real} real of {degree} distinct)")]
    NotTotallyRealSplit { real: usize, degree: usize },
}

/// Square matrix over `Z`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqIntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl SqIntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::BadShape {
                dim,
                got: entries.len(),
            });
        }
        Ok(SqIntMatrix { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(MatrixError::BadShape {
                    dim,
                    got: r.len() * dim,
                });
            }
            entries.extend(r);
        }
        Self::new(dim, entries)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, MatrixError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, BigInt::one())
    }

    pub fn scalar(dim: usize, c: BigInt) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = c.clone();
        }
        SqIntMatrix { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        Self::scalar(dim, BigInt::zero())
    }

    /// Matrix of multiplication by `x` on `Z[x]/(p)` in the basis `1, x, ..., x^(n-1)`.
    /// Panics unless `p` is monic of degree at least 1.
    pub fn companion(p: &IntPoly) -> Self {
        assert!(
            p.is_monic() && p.degree().unwrap() >= 1,
            "companion needs a monic polynomial"
        );
        let n = p.degree().unwrap();
        let mut m = Self::zero(n);
        for j in 0..n - 1 {
            m.set(j + 1, j, BigInt::one());
        }
        for i in 0..n {
            m.set(i, n - 1, -p.coeff(i));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.dim)
            .map(<[BigInt]>::to_vec)
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    fn check_dims(&self, other: &SqIntMatrix) -> Result<(), MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &SqIntMatrix) -> Result<SqIntMatrix, MatrixError> {
        self.check_dims(other)?;
        let n = self.dim;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(SqIntMatrix {
            dim: n,
            entries: out,
        })
    }

    pub fn add(&self, other: &SqIntMatrix) -> Result<SqIntMatrix, MatrixError> {
        self.check_dims(other)?;
        Ok(SqIntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigInt) -> SqIntMatrix {
        SqIntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn pow(&self, mut e: u32) -> SqIntMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mat_mul(&base).unwrap();
            }
            base = base.mat_mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        bareiss_det(self.rows())
    }

    /// `det(xI - M)` by Faddeev-LeVerrier in integer arithmetic.
    ///
    /// Every division in the recurrence is exact over `Z`; a nonzero
    /// remainder means an arithmetic bug and panics.
    pub fn charpoly(&self) -> IntPoly {
        self.faddeev_leverrier().0
    }

    /// Inverse of a matrix with determinant `+1` or `-1`.
    pub fn inverse_unimodular(&self) -> Option<SqIntMatrix> {
        let (cp, adj_like) = self.faddeev_leverrier();
        let c0 = cp.coeff(0);
        if !c0.abs().is_one() {
            return None;
        }
        // Cayley-Hamilton: M * N_n + c0 I = 0, so M^{-1} = -N_n / c0
        Some(adj_like.scale(&-c0))
    }

    fn faddeev_leverrier(&self) -> (IntPoly, SqIntMatrix) {
        let n = self.dim;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut nk = Self::zero(n);
        for k in 1..=n {
            // N_k = M N_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(M N_k) / k
            let mut next = self.mat_mul(&nk).unwrap();
            for i in 0..n {
                let v = next.get(i, i) + &coeffs[n - k + 1];
                next.set(i, i, v);
            }
            let t = self.mat_mul(&next).unwrap().trace();
            let (q, r) = t.div_rem(&BigInt::from(k));
            assert!(r.is_zero(), "Faddeev-LeVerrier: trace not divisible by {k}");
            coeffs[n - k] = -q;
            nk = next;
        }
        (IntPoly::new(coeffs), nk)
    }

    pub fn commutes_with(&self, other: &SqIntMatrix) -> Result<bool, MatrixError> {
        Ok(self.mat_mul(other)? == other.mat_mul(self)?)
    }

    /// Solves `self = sum_k f_k F^k` over `Q` for `k < degree`.
    ///
    /// Returns `None` when `self` is not a polynomial in `frame` of that degree.
    pub fn as_polynomial_in(
        &self,
        frame: &SqIntMatrix,
        degree: usize,
    ) -> Result<Option<Vec<BigRational>>, MatrixError> {
        self.check_dims(frame)?;
        let n2 = self.dim * self.dim;
        let mut powers = Vec::with_capacity(degree);
        let mut p = Self::identity(self.dim);
        for _ in 0..degree {
            powers.push(p.clone());
            p = p.mat_mul(frame)?;
        }
        // augmented system: n^2 equations, `degree` unknowns
        let mut rows: Vec<Vec<BigRational>> = (0..n2)
            .map(|e| {
                let mut row: Vec<BigRational> = powers
                    .iter()
                    .map(|pk| BigRational::from_integer(pk.entries[e].clone()))
                    .collect();
                row.push(BigRational::from_integer(self.entries[e].clone()));
                row
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..degree {
            let Some(pr) = (r..n2).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = rows[r][c].recip();
            for v in rows[r].iter_mut() {
                *v *= &inv;
            }
            for i in 0..n2 {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    let pivot_row = rows[r].clone();
                    for (x, p) in rows[i][c..=degree].iter_mut().zip(&pivot_row[c..=degree]) {
                        *x -= p * &f;
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|row| !row[degree].is_zero()) {
            return Ok(None);
        }
        let mut sol = vec![BigRational::zero(); degree];
        for (i, &c) in pivot_cols.iter().enumerate() {
            sol[c] = rows[i][degree].clone();
        }
        Ok(Some(sol))
    }

    /// Hyperbolicity for matrices whose eigenvalues are all real.
    ///
    /// Fails with `NotTotallyRealSplit` when the squarefree part of the
    /// characteristic polynomial has non-real roots.
    pub fn is_hyperbolic(&self) -> Result<bool, MatrixError> {
        let cp = self.charpoly();
        let sqf = cp.squarefree_part();
        let degree = sqf.degree().unwrap_or(0);
        let iso = isolate_real_roots(&sqf).expect("squarefree part is squarefree");
        if iso.len() != degree {
            return Err(MatrixError::NotTotallyRealSplit {
                real: iso.len(),
                degree,
            });
        }
        // all eigenvalues real: off the unit circle iff different from +1 and -1
        Ok(!cp.eval(&BigInt::one()).is_zero() && !cp.eval(&BigInt::from(-1)).is_zero())
    }
}

pub fn mat_mul(a: &SqIntMatrix, b: &SqIntMatrix) -> Result<SqIntMatrix, MatrixError> {
    a.mat_mul(b)
}

pub fn det(m: &SqIntMatrix) -> BigInt {
    m.det()
}

pub fn charpoly(m: &SqIntMatrix) -> IntPoly {
    m.charpoly()
}

pub fn commute_check(a: &SqIntMatrix, b: &SqIntMatrix) -> Result<bool, MatrixError> {
    a.commutes_with(b)
}

pub fn is_hyperbolic_matrix(m: &SqIntMatrix) -> Result<bool, MatrixError> {
    m.is_hyperbolic()
}

/// Direct sum of the blocks in order.
pub fn block_diag(blocks: &[SqIntMatrix]) -> Result<SqIntMatrix, MatrixError> {
    if blocks.is_empty() {
        return Err(MatrixError::Empty);
    }
    let d: usize = blocks.iter().map(SqIntMatrix::dim).sum();
    let mut out = SqIntMatrix::zero(d);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.dim {
            for j in 0..b.dim {
                out.set(off + i, off + j, b.get(i, j).clone());
            }
        }
        off += b.dim;
    }
    Ok(out)
}

impl fmt::Display for SqIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SqIntMatrix {
        SqIntMatrix::from_i64_rows(rows).unwrap()
    }

    fn xi() -> IntPoly {
        IntPoly::from_i64s(&[-1, -2, 1, 1])
    }

    /// Leibniz-formula determinant, independent of Bareiss.
    fn leibniz(a: &SqIntMatrix) -> BigInt {
        fn perms(n: usize) -> Vec<(Vec<usize>, i32)> {
            if n == 1 {
                return vec![(vec![0], 1)];
            }
            let mut out = Vec::new();
            for (p, s) in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    let sign = if (n - 1 - pos).is_multiple_of(2) {
                        s
                    } else {
                        -s
                    };
                    out.push((q, sign));
                }
            }
            out
        }
        let n = a.dim();
        perms(n)
            .into_iter()
            .map(|(p, s)| {
                let prod: BigInt = (0..n).map(|i| a.get(i, p[i]).clone()).product();
                prod * s
            })
            .sum()
    }

    #[test]
    fn leibniz_oracle_sanity() {
        assert_eq!(leibniz(&m(&[&[1, 2], &[3, 4]])), BigInt::from(-2));
        assert_eq!(
            leibniz(&m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])),
            BigInt::from(1)
        );
    }

    #[test]
    fn det_examples() {
        assert_eq!(SqIntMatrix::identity(5).det(), BigInt::one());
        assert_eq!(
            SqIntMatrix::scalar(3, BigInt::from(2)).det(),
            BigInt::from(8)
        );
        let a = m(&[
            &[2, -1, 0, 3],
            &[1, 4, -2, 0],
            &[0, 5, 1, 1],
            &[-3, 0, 2, 2],
        ]);
        assert_eq!(a.det(), leibniz(&a));
    }

    #[test]
    fn companion_is_multiplication_by_alpha() {
        let c = SqIntMatrix::companion(&xi());
        assert_eq!(c.column(0), vec![0.into(), 1.into(), 0.into()]);
        assert_eq!(c.column(1), vec![0.into(), 0.into(), 1.into()]);
        assert_eq!(
            c.column(2),
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(-1)]
        );
        assert_eq!(c.charpoly(), xi());
    }

    #[test]
    fn charpoly_examples() {
        let cube = &(&IntPoly::from_i64s(&[-1, 1]) * &IntPoly::from_i64s(&[-1, 1]))
            * &IntPoly::from_i64s(&[-1, 1]);
        assert_eq!(SqIntMatrix::identity(3).charpoly(), cube);
        // det(kI - A) at integer points, via Leibniz
        let a = m(&[
            &[2, -1, 0, 3],
            &[1, 4, -2, 0],
            &[0, 5, 1, 1],
            &[-3, 0, 2, 2],
        ]);
        let cp = a.charpoly();
        for k in -2..=4i64 {
            let shifted = SqIntMatrix::scalar(4, BigInt::from(k))
                .add(&a.scale(&BigInt::from(-1)))
                .unwrap();
            assert_eq!(cp.eval(&BigInt::from(k)), leibniz(&shifted));
        }
    }

    #[test]
    fn commute_examples() {
        let e12 = m(&[&[0, 1], &[0, 0]]);
        let e21 = m(&[&[0, 0], &[1, 0]]);
        assert!(!commute_check(&e12, &e21).unwrap());
        assert!(commute_check(&e12, &SqIntMatrix::identity(2)).unwrap());
        assert_eq!(
            commute_check(&e12, &SqIntMatrix::identity(3)),
            Err(MatrixError::DimMismatch(2, 3))
        );
    }

    #[test]
    fn block_diag_examples() {
        let i5 = block_diag(&[SqIntMatrix::identity(2), SqIntMatrix::identity(3)]).unwrap();
        assert_eq!(i5, SqIntMatrix::identity(5));
        let b = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(block_diag(std::slice::from_ref(&b)).unwrap(), b);
        let c = SqIntMatrix::companion(&xi());
        let a = block_diag(&[b.clone(), c.clone()]).unwrap();
        assert_eq!(a.charpoly(), &b.charpoly() * &c.charpoly());
        assert_eq!(a.det(), b.det() * c.det());
        let sq = block_diag(&[b.mat_mul(&b).unwrap(), c.mat_mul(&c).unwrap()]).unwrap();
        assert_eq!(a.mat_mul(&a).unwrap(), sq);
    }

    #[test]
    fn inverse_of_unimodular() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.mat_mul(&inv).unwrap(), SqIntMatrix::identity(2));
        let c = SqIntMatrix::companion(&xi());
        let inv = c.inverse_unimodular().unwrap();
        assert_eq!(inv.mat_mul(&c).unwrap(), SqIntMatrix::identity(3));
        assert!(SqIntMatrix::scalar(2, BigInt::from(2))
            .inverse_unimodular()
            .is_none());
    }

    #[test]
    fn hyperbolicity() {
        assert!(m(&[&[2, 1], &[1, 1]]).is_hyperbolic().unwrap());
        assert!(!SqIntMatrix::identity(3).is_hyperbolic().unwrap());
        assert!(!SqIntMatrix::scalar(3, BigInt::from(-1))
            .is_hyperbolic()
            .unwrap());
        let rot = m(&[&[0, -1], &[1, 0]]);
        assert!(matches!(
            rot.is_hyperbolic(),
            Err(MatrixError::NotTotallyRealSplit { real: 0, degree: 2 })
        ));
    }

    #[test]
    fn polynomial_in_frame() {
        let c = SqIntMatrix::companion(&xi());
        let c2 = c.mat_mul(&c).unwrap();
        let target = c2.add(&SqIntMatrix::scalar(3, BigInt::from(-1))).unwrap();
        let f = target.as_polynomial_in(&c, 3).unwrap().unwrap();
        let want: Vec<BigRational> = [-1, 0, 1]
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect();
        assert_eq!(f, want);
        let e12 = m(&[&[0, 1], &[0, 0]]);
        assert_eq!(
            e12.as_polynomial_in(&SqIntMatrix::identity(2), 2).unwrap(),
            None
        );
    }
}
