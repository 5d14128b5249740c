//! Arithmetic in the order `Z[α]` of a totally real number field.
//!
//! Elements are coefficient vectors in the power basis `1, α, …, α^{n-1}`.
//! The `j`-th real embedding sends `α` to the `j`-th smallest root of the
//! defining polynomial. Everything here works in `Z[α]`, which equals the
//! maximal order only when the index is 1 (e.g. when `disc(ξ)` is squarefree).

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactpoly::{
    discriminant, interval_eval, isolate_real_roots, Dyadic, DyadicInterval, IntPoly, PolyError,
    RootIsolation,
};
use crate::intmatrix::SqIntMatrix;
use crate::obstruction::SignPattern;

/// Refinement rounds for [`independence_certify`] when no budget is given.
pub const DEFAULT_PRECISION_BUDGET: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("defining polynomial is not monic")]
    NotMonic,
    #[error("defining polynomial must have degree at least 2")]
    DegreeTooSmall,
    #[error("defining polynomial is not squarefree")]
    NotSquarefree,
    #[error("defining polynomial is reducible; factor {factor}")]
    Reducible { factor: IntPoly },
    #[error("field is not totally real: {real_roots} real roots of {degree}")]
    NotTotallyReal { real_roots: usize, degree: usize },
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("element is zero")]
    ZeroElement,
    #[error("element is not a unit (norm {norm})")]
    NotAUnit { norm: BigInt },
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug)]
struct FieldData {
    xi: IntPoly,
    degree: usize,
    roots: RootIsolation,
    disc: BigInt,
}

/// A validated totally real field `Q[x]/(ξ)`: `ξ` monic, squarefree,
/// irreducible, with all roots real. Cheap to clone.
#[derive(Clone, Debug)]
pub struct TotallyRealField {
    data: Arc<FieldData>,
}

impl PartialEq for TotallyRealField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data.xi == other.data.xi
    }
}

impl Eq for TotallyRealField {}

impl TotallyRealField {
    pub fn new(xi: IntPoly) -> Result<Self, FieldError> {
        new_field(xi)
    }

    pub fn poly(&self) -> &IntPoly {
        &self.data.xi
    }

    pub fn degree(&self) -> usize {
        self.data.degree
    }

    pub fn roots(&self) -> &RootIsolation {
        &self.data.roots
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.data.disc
    }

    pub fn element(&self, coeffs: Vec<BigInt>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.degree() {
            return Err(FieldError::WrongLength {
                expected: self.degree(),
                got: coeffs.len(),
            });
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    pub fn element_i64(&self, coeffs: &[i64]) -> Result<FieldElement, FieldError> {
        self.element(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_int(&self, c: BigInt) -> FieldElement {
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        coeffs[0] = c;
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(BigInt::one())
    }

    /// The generator `α`.
    pub fn alpha(&self) -> FieldElement {
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        coeffs[1] = BigInt::one();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    fn reduce(&self, p: &IntPoly) -> FieldElement {
        let r = p
            .mod_reduce(&self.data.xi)
            .expect("defining polynomial is monic");
        let coeffs = (0..self.degree()).map(|k| r.coeff(k)).collect();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }
}

/// Validates `ξ` and builds the field.
///
/// Irreducibility is decided by trial factorization over subsets of the
/// certified real roots: a monic integer factor of degree `k <= n/2` is
/// `∏ (x - r_j)` over some `k`-subset, so its coefficients are integers
/// inside the interval enclosures of the elementary symmetric functions.
/// Each candidate is confirmed or rejected by exact division.
pub fn new_field(xi: IntPoly) -> Result<TotallyRealField, FieldError> {
    if !xi.is_monic() {
        return Err(FieldError::NotMonic);
    }
    let degree = xi.degree().unwrap();
    if degree < 2 {
        return Err(FieldError::DegreeTooSmall);
    }
    if !xi.is_squarefree() {
        return Err(FieldError::NotSquarefree);
    }
    let roots = isolate_real_roots(&xi)?;
    if roots.len() != degree {
        return Err(FieldError::NotTotallyReal {
            real_roots: roots.len(),
            degree,
        });
    }
    if let Some(factor) = find_factor(&roots, degree) {
        return Err(FieldError::Reducible { factor });
    }
    let disc = discriminant(&xi)?;
    Ok(TotallyRealField {
        data: Arc::new(FieldData {
            xi,
            degree,
            roots,
            disc,
        }),
    })
}

fn find_factor(roots: &RootIsolation, n: usize) -> Option<IntPoly> {
    let xi = roots.poly();
    for k in 1..=n / 2 {
        for subset in k_subsets(n, k) {
            let mut bits = 32i64;
            loop {
                let ivs: Vec<DyadicInterval> = subset
                    .iter()
                    .map(|&j| roots.refine(j, &Dyadic::pow2(-bits)).unwrap())
                    .collect();
                match integer_candidate(&ivs) {
                    Candidate::None => break,
                    Candidate::Ambiguous => bits *= 2,
                    Candidate::Poly(g) => {
                        if xi.div_exact(&g).is_some() {
                            return Some(g);
                        }
                        break;
                    }
                }
            }
        }
    }
    None
}

enum Candidate {
    None,
    Ambiguous,
    Poly(IntPoly),
}

/// Interval coefficients of `∏ (x - r_j)`, then the unique integer in each, if any.
fn integer_candidate(ivs: &[DyadicInterval]) -> Candidate {
    let one = DyadicInterval::point(Dyadic::from_i64(1));
    let zero = DyadicInterval::point(Dyadic::zero());
    let mut coeffs = vec![one];
    for iv in ivs {
        let mut next = vec![zero.clone(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(iv));
        }
        coeffs = next;
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        let lo = c.lo().ceil();
        let hi = c.hi().floor();
        match lo.cmp(&hi) {
            Ordering::Greater => return Candidate::None,
            Ordering::Less => return Candidate::Ambiguous,
            Ordering::Equal => out.push(lo),
        }
    }
    Candidate::Poly(IntPoly::new(out))
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|j| m >> j & 1 == 1).collect())
        .collect()
}

/// Element `c_0 + c_1 α + … + c_{n-1} α^{n-1}` of `Z[α]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: TotallyRealField,
    coeffs: Vec<BigInt>,
}

impl FieldElement {
    pub fn field(&self) -> &TotallyRealField {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_poly(&self) -> IntPoly {
        IntPoly::new(self.coeffs.clone())
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.field.reduce(&(&self.as_poly() * &other.as_poly())))
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.field.reduce(&(&self.as_poly() + &other.as_poly())))
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// Matrix of `x ↦ u·x` in the power basis: column `j` holds `u·α^j`.
    pub fn mult_matrix(&self) -> SqIntMatrix {
        let n = self.field.degree();
        let mut m = SqIntMatrix::zero(n);
        let mut col = self.clone();
        let alpha = self.field.alpha();
        for j in 0..n {
            for (i, c) in col.coeffs.iter().enumerate() {
                m.set(i, j, c.clone());
            }
            col = col.mul(&alpha).unwrap();
        }
        m
    }

    /// Field norm, `det(mult_matrix)`.
    pub fn norm(&self) -> BigInt {
        self.mult_matrix().det()
    }

    /// Enclosure of `σ_j(u)` with the root refined to width `2^-bits`.
    pub fn conjugate_enclosure(&self, j: usize, bits: i64) -> Result<DyadicInterval, FieldError> {
        Ok(self.field.roots().eval_at_root(&self.as_poly(), j, bits)?)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.as_poly().to_string().replace('x', "α");
        f.write_str(&s)
    }
}

pub fn elem_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.mul(b)
}

pub fn mult_matrix(u: &FieldElement) -> SqIntMatrix {
    u.mult_matrix()
}

/// Signs of the real conjugates `σ_j(u)`, embeddings in ascending root order.
pub fn conjugate_signs(u: &FieldElement) -> Result<SignPattern, FieldError> {
    if u.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    let roots = u.field.roots();
    let p = u.as_poly();
    let signs: Vec<Ordering> = (0..roots.len())
        .map(|j| roots.sign_at_root(&p, j))
        .collect::<Result<_, _>>()?;
    // embeddings are injective, so no conjugate of a nonzero element vanishes
    debug_assert!(signs.iter().all(|s| *s != Ordering::Equal));
    Ok(SignPattern::from_orderings(&signs))
}

/// Certified facts about a unit of `Z[α]`.
#[derive(Clone, Debug)]
pub struct UnitCertificate {
    pub element: FieldElement,
    /// `+1` or `-1`.
    pub det_of_mult_matrix: i8,
    pub conjugate_signs: SignPattern,
    pub hyperbolic: bool,
}

#[derive(Clone, Debug)]
pub enum UnitCheck {
    Unit(UnitCertificate),
    NotAUnit { norm: BigInt },
}

impl UnitCheck {
    pub fn certificate(self) -> Option<UnitCertificate> {
        match self {
            UnitCheck::Unit(c) => Some(c),
            UnitCheck::NotAUnit { .. } => None,
        }
    }
}

fn hyperbolic_from_matrix(m: &SqIntMatrix) -> bool {
    let cp = m.charpoly();
    !cp.eval(&BigInt::one()).is_zero() && !cp.eval(&BigInt::from(-1)).is_zero()
}

/// `u` is a unit of `Z[α]` iff its norm is `±1`.
pub fn is_unit(u: &FieldElement) -> Result<UnitCheck, FieldError> {
    if u.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    let m = u.mult_matrix();
    let norm = m.det();
    if !norm.abs().is_one() {
        return Ok(UnitCheck::NotAUnit { norm });
    }
    Ok(UnitCheck::Unit(UnitCertificate {
        element: u.clone(),
        det_of_mult_matrix: if norm.is_positive() { 1 } else { -1 },
        conjugate_signs: conjugate_signs(u)?,
        hyperbolic: hyperbolic_from_matrix(&m),
    }))
}

/// No conjugate equals `±1`; in a totally real field that is the whole
/// unit-circle condition.
pub fn is_hyperbolic_unit(u: &FieldElement) -> Result<bool, FieldError> {
    if u.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    let m = u.mult_matrix();
    let norm = m.det();
    if !norm.abs().is_one() {
        return Err(FieldError::NotAUnit { norm });
    }
    Ok(hyperbolic_from_matrix(&m))
}

/// A certified nonzero 2×2 minor of the log-embedding matrix
/// `L[i][j] = log|σ_j(u_i)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceWitness {
    pub j: usize,
    pub k: usize,
    pub minor_lo: f64,
    pub minor_hi: f64,
    pub precision_bits: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Independence {
    /// `<u1, u2>` is free of rank 2 modulo the torsion `{±1}`.
    Independent(IndependenceWitness),
    /// No minor separated from zero within the budget. Never a claim of dependence.
    Inconclusive,
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent(_))
    }
}

/// Closed `f64` interval with outward widening after every operation.
#[derive(Clone, Copy, Debug)]
struct Fi {
    lo: f64,
    hi: f64,
}

impl Fi {
    fn widen(lo: f64, hi: f64) -> Fi {
        let pad = |x: f64| x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
        Fi {
            lo: lo - pad(lo),
            hi: hi + pad(hi),
        }
    }

    fn sub(self, o: Fi) -> Fi {
        Fi::widen(self.lo - o.hi, self.hi - o.lo)
    }

    fn mul(self, o: Fi) -> Fi {
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Fi::widen(
            p.iter().copied().fold(f64::INFINITY, f64::min),
            p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Enclosure of `ln|x|` for `x` in an interval that excludes zero.
    fn ln_abs(iv: &DyadicInterval) -> Option<Fi> {
        let (a, b) = match iv.certified_sign()? {
            Ordering::Greater => (iv.lo().clone(), iv.hi().clone()),
            Ordering::Less => (iv.hi().abs(), iv.lo().abs()),
            Ordering::Equal => return None,
        };
        // to_f64 is within one part in 2^52; ln is within a few ulps
        let lo = a.to_f64() * (1.0 - 4.0 * f64::EPSILON);
        let hi = b.to_f64() * (1.0 + 4.0 * f64::EPSILON);
        if !(lo > 0.0 && hi.is_finite()) {
            return None;
        }
        let (l, h) = (lo.ln(), hi.ln());
        Some(Fi::widen(l - 1e-15 * l.abs(), h + 1e-15 * h.abs()))
    }

    fn excludes_zero(self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }
}

/// Rows `log|p_i(r_j) / den_i|` over the roots of `roots`; searches for a
/// 2×2 minor whose enclosure excludes zero.
pub(crate) fn certify_log_rank_two(
    roots: &RootIsolation,
    rows: [(&IntPoly, &BigInt); 2],
    budget: u32,
) -> Independence {
    let n = roots.len();
    let ln_den: Vec<Fi> = rows
        .iter()
        .map(|(_, den)| {
            let iv = DyadicInterval::point(Dyadic::from_int((*den).clone()));
            Fi::ln_abs(&iv).expect("positive denominator")
        })
        .collect();
    for round in 0..budget {
        let bits = 32 * (round as i64 + 1);
        let mut logs: Vec<Vec<Option<Fi>>> = vec![Vec::new(), Vec::new()];
        for j in 0..n {
            let iv = roots
                .refine(j, &Dyadic::pow2(-bits))
                .expect("root index in range");
            for (i, (p, _)) in rows.iter().enumerate() {
                logs[i].push(Fi::ln_abs(&interval_eval(p, &iv)).map(|l| l.sub(ln_den[i])));
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let (Some(a), Some(b), Some(c), Some(d)) =
                    (logs[0][j], logs[1][k], logs[0][k], logs[1][j])
                else {
                    continue;
                };
                let minor = a.mul(b).sub(c.mul(d));
                if minor.excludes_zero() {
                    return Independence::Independent(IndependenceWitness {
                        j,
                        k,
                        minor_lo: minor.lo,
                        minor_hi: minor.hi,
                        precision_bits: bits,
                    });
                }
            }
        }
    }
    Independence::Inconclusive
}

/// One-sided certificate that two units generate `Z²` modulo torsion.
pub fn independence_certify(
    u1: &FieldElement,
    u2: &FieldElement,
    budget: u32,
) -> Result<Independence, FieldError> {
    u1.same_field(u2)?;
    for u in [u1, u2] {
        if u.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let norm = u.norm();
        if !norm.abs().is_one() {
            return Err(FieldError::NotAUnit { norm });
        }
    }
    let one = BigInt::one();
    let (p1, p2) = (u1.as_poly(), u2.as_poly());
    Ok(certify_log_rank_two(
        u1.field.roots(),
        [(&p1, &one), (&p2, &one)],
        budget,
    ))
}
