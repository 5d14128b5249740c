use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::{interval_eval, Dyadic, DyadicInterval};
use super::poly::IntPoly;
use super::PolyError;

/// Sturm sequence of a squarefree polynomial, built from a primitive
/// pseudo-remainder sequence.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if !p.is_squarefree() {
            return Err(PolyError::NotSquarefree);
        }
        let mut chain = vec![p.primitive_part()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d.primitive_part());
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let r = chain[n - 2].pseudo_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            // -prem divided by a positive content keeps the Sturm sign convention
            let content = r.content();
            let next = IntPoly::new(r.coeffs().iter().map(|c| -(c / &content)).collect());
            chain.push(next);
        }
        Ok(SturmChain { chain })
    }

    pub fn polys(&self) -> &[IntPoly] {
        &self.chain
    }

    fn variations<I: Iterator<Item = Ordering>>(signs: I) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs.filter(|s| *s != Ordering::Equal) {
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Dyadic) -> usize {
        Self::variations(self.chain.iter().map(|q| q.eval_dyadic(x).signum()))
    }

    /// Sign variations at `+inf` (`positive = true`) or `-inf`.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|q| {
            let lc = q.leading_coeff().unwrap();
            let mut s = lc.cmp(&BigInt::zero());
            if !positive && q.degree().unwrap() % 2 == 1 {
                s = s.reverse();
            }
            s
        }))
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    /// Endpoints must not be roots.
    pub fn count(&self, lo: &Dyadic, hi: &Dyadic) -> Result<usize, PolyError> {
        let p = &self.chain[0];
        if p.eval_dyadic(lo).is_zero() || p.eval_dyadic(hi).is_zero() {
            return Err(PolyError::EndpointIsRoot);
        }
        if lo >= hi {
            return Ok(0);
        }
        Ok(self.variations_at(lo) - self.variations_at(hi))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Number of real roots of the squarefree polynomial `p` in `(lo, hi)`.
pub fn sturm_count(p: &IntPoly, lo: &Dyadic, hi: &Dyadic) -> Result<usize, PolyError> {
    SturmChain::new(p)?.count(lo, hi)
}

/// Integer `B` with every complex root strictly inside `|z| < B`
/// (Cauchy: `1 + max |c_k / c_n|`, rounded up).
pub fn root_bound(p: &IntPoly) -> BigInt {
    let Some(lc) = p.leading_coeff() else {
        return BigInt::one();
    };
    let lc = lc.abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default();
    BigInt::one() + max.div_ceil(&lc)
}

/// Disjoint isolating intervals for the real roots of a squarefree polynomial,
/// sorted ascending. Interval `j` encloses the `j`-th smallest real root.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    poly: IntPoly,
    chain: SturmChain,
    intervals: Vec<DyadicInterval>,
}

impl RootIsolation {
    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn chain(&self) -> &SturmChain {
        &self.chain
    }

    /// Enclosure of root `idx` of width at most `width_bound`.
    pub fn refine(&self, idx: usize, width_bound: &Dyadic) -> Result<DyadicInterval, PolyError> {
        let iv = self.intervals.get(idx).ok_or(PolyError::IndexOutOfRange {
            idx,
            len: self.intervals.len(),
        })?;
        Ok(bisect_to_width(&self.poly, iv.clone(), width_bound))
    }

    /// Certified sign of `q(r)` where `r` is root `idx`.
    ///
    /// A zero value is detected exactly through `gcd(p, q)`; otherwise the
    /// enclosure is refined until `interval_eval` excludes zero, which must
    /// happen because the value is nonzero.
    pub fn sign_at_root(&self, q: &IntPoly, idx: usize) -> Result<Ordering, PolyError> {
        let iv = self.intervals.get(idx).ok_or(PolyError::IndexOutOfRange {
            idx,
            len: self.intervals.len(),
        })?;
        if q.is_zero() {
            return Ok(Ordering::Equal);
        }
        if let Some(s) = interval_eval(q, iv).certified_sign() {
            return Ok(s);
        }
        if self.is_root_of(q, iv) {
            return Ok(Ordering::Equal);
        }
        let mut bits = 32i64;
        let mut current = iv.clone();
        loop {
            current = bisect_to_width(&self.poly, current, &Dyadic::pow2(-bits));
            if let Some(s) = interval_eval(q, &current).certified_sign() {
                return Ok(s);
            }
            bits += 32;
        }
    }

    /// Enclosure of `q(r)` with `r` refined to width `2^-bits`.
    pub fn eval_at_root(
        &self,
        q: &IntPoly,
        idx: usize,
        bits: i64,
    ) -> Result<DyadicInterval, PolyError> {
        let iv = self.refine(idx, &Dyadic::pow2(-bits))?;
        Ok(interval_eval(q, &iv))
    }

    fn is_root_of(&self, q: &IntPoly, iv: &DyadicInterval) -> bool {
        let g = self.poly.gcd(q);
        if g.is_constant() {
            return false;
        }
        if iv.is_point() {
            return g.eval_dyadic(iv.lo()).is_zero();
        }
        // g divides a squarefree p, so it is squarefree and its roots are roots of p
        sturm_count(&g, iv.lo(), iv.hi())
            .map(|c| c > 0)
            .unwrap_or(false)
    }
}

fn bisect_to_width(p: &IntPoly, mut iv: DyadicInterval, width_bound: &Dyadic) -> DyadicInterval {
    if iv.is_point() {
        return iv;
    }
    let lo_sign = p.eval_dyadic(iv.lo()).signum();
    while &iv.width() > width_bound {
        let mid = iv.midpoint();
        let s = p.eval_dyadic(&mid).signum();
        if s == Ordering::Equal {
            return DyadicInterval::point(mid);
        }
        iv = if s == lo_sign {
            DyadicInterval::new(mid, iv.hi().clone())
        } else {
            DyadicInterval::new(iv.lo().clone(), mid)
        };
    }
    iv
}

/// Isolates every real root of a squarefree polynomial by Sturm-guided bisection
/// starting from `(-B, B)` with `B` the Cauchy bound.
pub fn isolate_real_roots(p: &IntPoly) -> Result<RootIsolation, PolyError> {
    let chain = SturmChain::new(p)?;
    let poly = p.clone();
    let mut intervals = Vec::new();
    match p.degree() {
        Some(0) => {}
        Some(1) => {
            // exact root -c0/c1; dyadic iff the odd part of c1 divides c0
            let c0 = p.coeff(0);
            let c1 = p.coeff(1);
            let tz = c1.trailing_zeros().unwrap_or(0);
            let odd = &c1 >> tz;
            let (q, r) = (-&c0).div_rem(&odd);
            if r.is_zero() {
                intervals.push(DyadicInterval::point(Dyadic::new(q, -(tz as i64))));
            } else {
                let b = Dyadic::from_int(root_bound(p));
                intervals.push(bisect_to_width(
                    p,
                    DyadicInterval::new(-&b, b.clone()),
                    &(&b + &b),
                ));
            }
        }
        _ => {
            let b = Dyadic::from_int(root_bound(p));
            let lo = -&b;
            let total = chain.count(&lo, &b)?;
            let mut stack = vec![(lo, b, total)];
            while let Some((lo, hi, n)) = stack.pop() {
                match n {
                    0 => {}
                    1 => intervals.push(DyadicInterval::new(lo, hi)),
                    _ => {
                        let mid = Dyadic::midpoint(&lo, &hi);
                        let mut left_hi = mid.clone();
                        let mut right_lo = mid.clone();
                        if p.eval_dyadic(&mid).is_zero() {
                            intervals.push(DyadicInterval::point(mid.clone()));
                            // step off the root just enough to keep endpoints non-roots
                            let mut eps = (&hi - &lo).half();
                            loop {
                                eps = eps.half();
                                let l = &mid - &eps;
                                let r = &mid + &eps;
                                if !p.eval_dyadic(&l).is_zero()
                                    && !p.eval_dyadic(&r).is_zero()
                                    && chain.count(&l, &r)? == 1
                                {
                                    left_hi = l;
                                    right_lo = r;
                                    break;
                                }
                            }
                        }
                        let nl = chain.count(&lo, &left_hi)?;
                        let nr = chain.count(&right_lo, &hi)?;
                        stack.push((right_lo, hi, nr));
                        stack.push((lo, left_hi, nl));
                    }
                }
            }
        }
    }
    intervals.sort_by(|a, b| a.lo().cmp(b.lo()));
    Ok(RootIsolation {
        poly,
        chain,
        intervals,
    })
}

/// Refines root `idx` of an isolation to width at most `width_bound`.
pub fn refine_root(
    iso: &RootIsolation,
    idx: usize,
    width_bound: &Dyadic,
) -> Result<DyadicInterval, PolyError> {
    iso.refine(idx, width_bound)
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

    fn d(n: i64) -> Dyadic {
        Dyadic::from_i64(n)
    }

    #[test]
    fn sturm_count_examples() {
        assert_eq!(sturm_count(&xi(), &d(-10), &d(10)).unwrap(), 3);
        assert_eq!(sturm_count(&p(&[1, 0, 1]), &d(-10), &d(10)).unwrap(), 0);
        assert_eq!(sturm_count(&xi(), &d(0), &d(10)).unwrap(), 1);
    }

    #[test]
    fn sturm_count_errors() {
        assert_eq!(
            sturm_count(&p(&[-1, 0, 1]), &d(1), &d(3)),
            Err(PolyError::EndpointIsRoot)
        );
        let sq = &p(&[-1, 1]) * &p(&[-1, 1]);
        assert_eq!(
            sturm_count(&sq, &d(-3), &d(3)),
            Err(PolyError::NotSquarefree)
        );
    }

    #[test]
    fn isolate_heptagonal_cubic() {
        let iso = isolate_real_roots(&xi()).unwrap();
        assert_eq!(iso.len(), 3);
        let approx = [-1.8019377358, -0.4450418679, 1.2469796037];
        for (j, r) in approx.iter().enumerate() {
            let iv = iso.refine(j, &Dyadic::pow2(-1)).unwrap();
            assert!(iv.width() <= Dyadic::pow2(-1));
            assert!(iv.lo().to_f64() <= *r && *r <= iv.hi().to_f64());
        }
        for w in iso.intervals().windows(2) {
            assert!(w[0].hi() <= w[1].lo());
        }
    }

    #[test]
    fn isolate_simple_cases() {
        let iso = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(iso.len(), 2);
        assert!(iso.intervals()[0].hi() <= &d(0));
        assert!(iso.intervals()[1].lo() >= &d(0));

        let iso = isolate_real_roots(&p(&[-5, 1])).unwrap();
        assert_eq!(iso.intervals(), &[DyadicInterval::point(d(5))]);

        let iso = isolate_real_roots(&p(&[1, 3])).unwrap();
        assert_eq!(iso.len(), 1);
        assert!(!iso.intervals()[0].is_point());

        let half = isolate_real_roots(&p(&[-1, 2])).unwrap();
        assert_eq!(half.intervals(), &[DyadicInterval::point(Dyadic::pow2(-1))]);
    }

    #[test]
    fn isolate_hits_midpoint_roots() {
        // roots -2, 0, 1, 2 with 0 the first bisection midpoint
        let f = &(&p(&[0, 1]) * &p(&[-1, 1])) * &p(&[-4, 0, 1]);
        let iso = isolate_real_roots(&f).unwrap();
        assert_eq!(iso.len(), 4);
        let expect = [-2.0, 0.0, 1.0, 2.0];
        for (j, r) in expect.iter().enumerate() {
            let iv = iso.refine(j, &Dyadic::pow2(-20)).unwrap();
            assert!(iv.lo().to_f64() <= *r && *r <= iv.hi().to_f64());
        }
    }

    #[test]
    fn refine_examples() {
        let iso = isolate_real_roots(&xi()).unwrap();
        let iv = refine_root(&iso, 0, &Dyadic::pow2(-20)).unwrap();
        assert!(iv.width() <= Dyadic::pow2(-20));
        assert!(iso.intervals()[0].contains_interval(&iv));
        assert!((iv.lo().to_f64() + 1.8019377358).abs() < 1e-5);

        let sqrt2 = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        let iv = refine_root(&sqrt2, 1, &Dyadic::pow2(-10)).unwrap();
        assert!(iv.width() <= Dyadic::pow2(-10));
        assert!(iv.lo().to_f64() <= 2f64.sqrt() && 2f64.sqrt() <= iv.hi().to_f64());

        let five = isolate_real_roots(&p(&[-5, 1])).unwrap();
        assert_eq!(
            refine_root(&five, 0, &Dyadic::pow2(-30)).unwrap(),
            DyadicInterval::point(d(5))
        );
        assert_eq!(
            refine_root(&five, 1, &Dyadic::pow2(-3)),
            Err(PolyError::IndexOutOfRange { idx: 1, len: 1 })
        );
    }

    #[test]
    fn sign_at_root_exact_zero_and_nonzero() {
        let iso = isolate_real_roots(&xi()).unwrap();
        // x^2 + x - 1 at the three roots of xi (eps_1 conjugates)
        let eps1 = p(&[-1, 1, 1]);
        let signs: Vec<_> = (0..3)
            .map(|j| iso.sign_at_root(&eps1, j).unwrap())
            .collect();
        assert_eq!(
            signs,
            vec![Ordering::Greater, Ordering::Less, Ordering::Greater]
        );
        assert_eq!(iso.sign_at_root(&xi(), 1).unwrap(), Ordering::Equal);
    }

    #[test]
    fn root_bound_is_strict() {
        assert_eq!(root_bound(&xi()), BigInt::from(3));
        assert_eq!(root_bound(&p(&[-5, 1])), BigInt::from(6));
    }
}
