use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::PolyError;

/// Dense univariate polynomial with arbitrary-precision integer coefficients.
///
/// `coeffs[k]` is the coefficient of `x^k`. The representation is kept
/// canonical: no trailing zeros, and the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &IntPoly, b: &IntPoly, op: PolyOp) -> IntPoly {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    /// `x - r`
    pub fn linear_root(r: &BigInt) -> Self {
        Self::new(vec![-r, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(One::is_one)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Horner evaluation at an integer.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Exact evaluation at a dyadic rational.
    pub fn eval_dyadic(&self, x: &Dyadic) -> Dyadic {
        self.coeffs.iter().rev().fold(Dyadic::zero(), |acc, c| {
            &(&acc * x) + &Dyadic::from_int(c.clone())
        })
    }

    /// Nonnegative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and normalizes the leading coefficient to be positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading_coeff().is_some_and(Signed::is_negative) {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
    ///
    /// The multiplier is replaced by its absolute value so that the result
    /// is a positive multiple of the true remainder; Sturm chains depend on
    /// that sign.
    pub fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree().expect("pseudo_rem by zero polynomial");
        let Some(da) = self.degree() else {
            return IntPoly::zero();
        };
        if da < db {
            return self.clone();
        }
        let lc = b.leading_coeff().unwrap().clone();
        let mut r = self.coeffs.clone();
        let mut steps = 0usize;
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1;
            let lead = r[k].clone();
            for c in r.iter_mut() {
                *c *= &lc;
            }
            let shift = k - db;
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[i + shift] -= &lead * bc;
            }
            steps += 1;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        // Pad the multiplier up to lc^(da - db + 1) so callers get a fixed exponent.
        let total = da - db + 1;
        let mut out = IntPoly::new(r);
        if total > steps {
            out = out.scale(&num_traits::pow(lc.clone(), total - steps));
        }
        if lc.is_negative() && total % 2 == 1 {
            out = -out;
        }
        out
    }

    /// Reduction modulo a monic polynomial. The result has degree below `deg xi`.
    pub fn mod_reduce(&self, xi: &IntPoly) -> Result<IntPoly, PolyError> {
        if !xi.is_monic() {
            return Err(PolyError::NonMonicModulus);
        }
        let n = xi.degree().unwrap();
        if n == 0 {
            return Ok(IntPoly::zero());
        }
        let mut r = self.coeffs.clone();
        while r.len() > n {
            let k = r.len() - 1;
            let lead = r.pop().unwrap();
            let shift = k - n;
            for (i, c) in xi.coeffs[..n].iter().enumerate() {
                r[i + shift] -= &lead * c;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok(IntPoly::new(r))
    }

    /// Exact quotient in `Z[x]`, or `None` when `b` does not divide `self`.
    pub fn div_exact(&self, b: &IntPoly) -> Option<IntPoly> {
        let db = b.degree()?;
        let Some(da) = self.degree() else {
            return Some(IntPoly::zero());
        };
        if da < db {
            return None;
        }
        let lc = b.leading_coeff().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); da - db + 1];
        for k in (db..=da).rev() {
            if r[k].is_zero() {
                continue;
            }
            let (t, rem) = r[k].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            let shift = k - db;
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[i + shift] -= &t * bc;
            }
            q[shift] = t;
        }
        if r.iter().all(Zero::is_zero) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    /// Greatest common divisor in `Z[x]`, primitive part normalized to a
    /// positive leading coefficient and multiplied by the gcd of contents.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let content = self.content().gcd(&other.content());
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&content)
    }

    /// True when `gcd(p, p')` is constant. The zero polynomial is not squarefree.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).is_constant(),
        }
    }

    /// Primitive squarefree part `p / gcd(p, p')`.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.is_constant() {
            return self.primitive_part();
        }
        let pp = self.primitive_part();
        let g = pp.gcd(&pp.derivative());
        pp.div_exact(&g)
            .expect("gcd divides its argument")
            .primitive_part()
    }

    /// Yun's squarefree decomposition of the primitive part.
    ///
    /// Entry `i` of the result collects the irreducible factors of
    /// multiplicity `i + 1`; constant entries mean "no factor of that
    /// multiplicity". Trailing constant entries are dropped.
    pub fn squarefree_decomposition(&self) -> Vec<IntPoly> {
        let p = self.primitive_part();
        if p.is_constant() {
            return Vec::new();
        }
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.div_exact(&a0).expect("exact");
        let mut c = dp.div_exact(&a0).expect("exact");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("exact");
            c = d.div_exact(&a).expect("exact");
            d = &c - &b.derivative();
            out.push(a.primitive_part());
        }
        while out.last().is_some_and(IntPoly::is_constant) {
            out.pop();
        }
        out
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -self.clone()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn xi() -> IntPoly {
        p(&[-1, -2, 1, 1])
    }

    #[test]
    fn arith_examples() {
        assert_eq!(
            poly_arith(&p(&[1, 1]), &p(&[-1, 1]), PolyOp::Mul),
            p(&[-1, 0, 1])
        );
        assert_eq!(poly_arith(&xi(), &IntPoly::zero(), PolyOp::Add), xi());
        assert_eq!(
            poly_arith(&xi(), &p(&[0, 0, 0, 1]), PolyOp::Sub),
            p(&[-1, -2, 1])
        );
        assert_eq!((&xi() - &xi()).coeffs().len(), 0);
    }

    #[test]
    fn mod_reduce_examples() {
        // x^3 = xi - x^2 + 2x + 1
        assert_eq!(p(&[0, 0, 0, 1]).mod_reduce(&xi()).unwrap(), p(&[1, 2, -1]));
        assert_eq!(p(&[0, 1]).mod_reduce(&xi()).unwrap(), p(&[0, 1]));
        // x^4 = x * (-x^2 + 2x + 1) = -x^3 + 2x^2 + x = 3x^2 - x - 1 (mod xi)
        assert_eq!(
            p(&[0, 0, 0, 0, 1]).mod_reduce(&xi()).unwrap(),
            p(&[-1, -1, 3])
        );
        assert_eq!(
            p(&[0, 1]).mod_reduce(&p(&[1, 2])),
            Err(PolyError::NonMonicModulus)
        );
    }

    #[test]
    fn pseudo_remainder_sign() {
        // -2x + 1 has negative leading coefficient and odd exponent
        let a = p(&[0, 0, 1]);
        let b = p(&[1, -2]);
        // lc^2 * x^2 mod (-2x+1): 4x^2 = (-2x+1)(-2x-1) + 1 -> remainder 1
        assert_eq!(a.pseudo_rem(&b), p(&[1]));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert!(xi().is_squarefree());
        let sq = &a * &p(&[-1, 1]);
        assert!(!sq.is_squarefree());
        assert_eq!(sq.squarefree_part(), a);
        assert_eq!(p(&[6, 4]).gcd(&p(&[3, 2])), p(&[3, 2]));
    }

    #[test]
    fn yun_multiplicities() {
        let l1 = p(&[-1, 1]);
        let l2 = p(&[2, 1]);
        let q = p(&[1, 0, 1]);
        let f = &(&l1 * &(&(&l2 * &l2) * &l2)) * &q;
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], &l1 * &q);
        assert!(dec[1].is_constant());
        assert_eq!(dec[2], l2);
    }

    #[test]
    fn div_exact_rejects_non_divisor() {
        assert!(xi().div_exact(&p(&[-1, 1])).is_none());
        let f = &xi() * &p(&[3, 2]);
        assert_eq!(f.div_exact(&p(&[3, 2])), Some(xi()));
    }

    #[test]
    fn display() {
        assert_eq!(xi().to_string(), "x^3 + x^2 - 2*x - 1");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
    }
}
