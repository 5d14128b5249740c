//! The `Z/2` obstruction to lifting a commuting pair from `SL_d(R)` to its
//! universal cover.
//!
//! After simultaneous diagonalization each generator `A_i` is joined by a path
//! of diagonal matrices to the sign matrix `D_i`. Lifting `D_i` to `Spin(d)`
//! as an ordered product of basis vectors over its `-1` set `S_i`, the lifts
//! commute up to `(-1)^{|S_1 ∩ S_2|}` when both sets have even size. The
//! commutator of the lifts is therefore the nontrivial deck transformation
//! exactly when `|S_1 ∩ S_2|` is odd. `clifford_oracle` checks this rule by
//! lifting the commutator loop numerically.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactpoly::{isolate_real_roots, IntPoly, RootIsolation};
use crate::intmatrix::{MatrixError, SqIntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("sign pattern has an odd number of -1 entries")]
    OddWeight,
    #[error("dimension {0} is below 3")]
    DimTooSmall(usize),
    #[error("sign patterns have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("sign entries must be +1 or -1")]
    BadSign,
    #[error("matrices do not commute")]
    NotCommuting,
    #[error("matrix is not hyperbolic")]
    NotHyperbolic,
    #[error("determinant is {0}, expected 1")]
    DetNotOne(BigInt),
    #[error("matrices are not simultaneously diagonalizable over R")]
    NotDiagonalizable,
    #[error("rotation planes do not pair up the -1 coordinates: {0}")]
    BadPairing(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A vector in `{+1, -1}^d`: the signs of real eigenvalues in a fixed coordinate order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl TryFrom<Vec<i8>> for SignPattern {
    type Error = ObstructionError;
    fn try_from(signs: Vec<i8>) -> Result<Self, Self::Error> {
        SignPattern::new(signs)
    }
}

impl From<SignPattern> for Vec<i8> {
    fn from(s: SignPattern) -> Vec<i8> {
        s.signs
    }
}

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self, ObstructionError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(ObstructionError::BadSign);
        }
        Ok(SignPattern { signs })
    }

    pub fn all_positive(d: usize) -> Self {
        SignPattern { signs: vec![1; d] }
    }

    /// Pattern of length `d` that is `-1` exactly on `negatives` (0-based).
    pub fn from_negatives(d: usize, negatives: &[usize]) -> Self {
        let mut signs = vec![1; d];
        for &j in negatives {
            signs[j] = -1;
        }
        SignPattern { signs }
    }

    pub fn from_orderings(signs: &[Ordering]) -> Self {
        SignPattern {
            signs: signs
                .iter()
                .map(|s| if *s == Ordering::Less { -1 } else { 1 })
                .collect(),
        }
    }

    /// Pattern whose bit `j` of `mask` marks a `-1` entry.
    pub fn from_mask(d: usize, mask: u64) -> Self {
        SignPattern {
            signs: (0..d)
                .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                .collect(),
        }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// 0-based indices of the `-1` entries, ascending.
    pub fn negatives(&self) -> Vec<usize> {
        (0..self.signs.len())
            .filter(|&j| self.signs[j] < 0)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn is_even(&self) -> bool {
        self.weight().is_multiple_of(2)
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Entrywise product (the product of the diagonal sign matrices).
    pub fn product(&self, other: &SignPattern) -> SignPattern {
        assert_eq!(self.len(), other.len());
        SignPattern {
            signs: self
                .signs
                .iter()
                .zip(&other.signs)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Coordinate permutation: entry `j` of the result is entry `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SignPattern {
        SignPattern {
            signs: perm.iter().map(|&j| self.signs[j]).collect(),
        }
    }

    pub fn concat(&self, other: &SignPattern) -> SignPattern {
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        SignPattern { signs }
    }

    /// Sign matrix after rotating by `±π` in each listed plane.
    fn flipped(&self, planes: &[(usize, usize)]) -> SignPattern {
        let mut out = self.clone();
        for &(i, j) in planes {
            out.signs[i] = -out.signs[i];
            out.signs[j] = -out.signs[j];
        }
        out
    }

    /// Number of coordinates where both patterns are `-1`.
    pub fn intersection(&self, other: &SignPattern) -> usize {
        self.signs
            .iter()
            .zip(&other.signs)
            .filter(|(a, b)| **a < 0 && **b < 0)
            .count()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .signs
            .iter()
            .map(|&x| if x > 0 { '+' } else { '-' })
            .collect();
        write!(f, "({s})")
    }
}

/// Element of `Z/2 ≅ π_1(SO(d))`, `d >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstructionClass {
    Trivial,
    Generator,
}

impl ObstructionClass {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            ObstructionClass::Generator
        } else {
            ObstructionClass::Trivial
        }
    }

    pub fn is_generator(self) -> bool {
        self == ObstructionClass::Generator
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObstructionClass::Trivial => "trivial",
            ObstructionClass::Generator => "generator",
        }
    }
}

/// Group law of `Z/2`.
impl std::ops::Add for ObstructionClass {
    type Output = ObstructionClass;

    fn add(self, other: ObstructionClass) -> ObstructionClass {
        Self::from_parity(self.is_generator() != other.is_generator())
    }
}

impl fmt::Display for ObstructionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_patterns(s1: &SignPattern, s2: &SignPattern) -> Result<(), ObstructionError> {
    if s1.len() != s2.len() {
        return Err(ObstructionError::LengthMismatch(s1.len(), s2.len()));
    }
    if s1.len() < 3 {
        return Err(ObstructionError::DimTooSmall(s1.len()));
    }
    if !s1.is_even() || !s2.is_even() {
        return Err(ObstructionError::OddWeight);
    }
    Ok(())
}

/// Commutator class of the lifts of the sign matrices: `Generator` iff
/// `|S_1 ∩ S_2|` is odd.
pub fn pairing(s1: &SignPattern, s2: &SignPattern) -> Result<ObstructionClass, ObstructionError> {
    check_patterns(s1, s2)?;
    Ok(ObstructionClass::from_parity(s1.intersection(s2) % 2 == 1))
}

/// A simultaneous eigenbasis for a commuting pair, described exactly.
///
/// `frame = a1 + shift * a2` is diagonalizable with real spectrum and both
/// generators are polynomials in it, so the eigenvalue of `a_i` on the
/// eigenspace of the root `r` of `frame_poly` is `poly_i(r) / den_i`.
#[derive(Clone, Debug)]
pub struct JointFrame {
    pub shift: i64,
    pub frame_poly: IntPoly,
    pub roots: RootIsolation,
    /// Multiplicity of each root of `frame_poly` (ascending order).
    pub multiplicities: Vec<usize>,
    /// Integer numerator and positive denominator of the polynomial giving `a_i`.
    pub generators: [(IntPoly, BigInt); 2],
}

impl JointFrame {
    /// Sign patterns of both generators, coordinates ordered by ascending
    /// eigenvalue of the frame and repeated by multiplicity.
    pub fn sign_patterns(&self) -> [SignPattern; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (idx, &mult) in self.multiplicities.iter().enumerate() {
            for (g, (num, _)) in self.generators.iter().enumerate() {
                let s = self
                    .roots
                    .sign_at_root(num, idx)
                    .expect("root index in range");
                out[g].extend(std::iter::repeat_n(s, mult));
            }
        }
        out.map(|v| SignPattern::from_orderings(&v))
    }
}

fn rational_to_integer_poly(coeffs: &[BigRational]) -> (IntPoly, BigInt) {
    let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let num = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    (IntPoly::new(num), den)
}

fn eval_poly_at_matrix(p: &IntPoly, m: &SqIntMatrix) -> SqIntMatrix {
    let mut acc = SqIntMatrix::zero(m.dim());
    for c in p.coeffs().iter().rev() {
        acc = acc
            .mat_mul(m)
            .unwrap()
            .add(&SqIntMatrix::scalar(m.dim(), c.clone()))
            .unwrap();
    }
    acc
}

/// Finds an exact simultaneous diagonalization of a commuting pair with real spectra.
///
/// A shift `c` fails only when two distinct joint eigenvalue pairs collide
/// under `λ + cμ`, which happens for at most `d(d-1)/2` values of `c`; the
/// search range covers more than that many candidates.
pub fn joint_frame(a1: &SqIntMatrix, a2: &SqIntMatrix) -> Result<JointFrame, ObstructionError> {
    if !a1.commutes_with(a2)? {
        return Err(ObstructionError::NotCommuting);
    }
    let d = a1.dim() as i64;
    let bound = d * d;
    let shifts = std::iter::once(0).chain((1..=bound).flat_map(|c| [c, -c]));
    for shift in shifts {
        let frame = a1.add(&a2.scale(&BigInt::from(shift)))?;
        let cp = frame.charpoly();
        let q = cp.squarefree_part();
        if !eval_poly_at_matrix(&q, &frame)
            .entries()
            .iter()
            .all(Zero::is_zero)
        {
            continue;
        }
        let degree = q.degree().unwrap();
        let Some(f1) = a1.as_polynomial_in(&frame, degree)? else {
            continue;
        };
        let Some(f2) = a2.as_polynomial_in(&frame, degree)? else {
            continue;
        };
        let roots = isolate_real_roots(&q).expect("squarefree part");
        if roots.len() != degree {
            return Err(MatrixError::NotTotallyRealSplit {
                real: roots.len(),
                degree,
            }
            .into());
        }
        let decomposition = cp.squarefree_decomposition();
        let multiplicities = (0..roots.len())
            .map(|idx| {
                decomposition
                    .iter()
                    .position(|s| {
                        !s.is_constant()
                            && roots.sign_at_root(s, idx).expect("in range") == Ordering::Equal
                    })
                    .map(|i| i + 1)
                    .expect("every root of the squarefree part has a multiplicity")
            })
            .collect();
        return Ok(JointFrame {
            shift,
            frame_poly: q,
            roots,
            multiplicities,
            generators: [rational_to_integer_poly(&f1), rational_to_integer_poly(&f2)],
        });
    }
    Err(ObstructionError::NotDiagonalizable)
}

fn require_hyperbolic(m: &SqIntMatrix) -> Result<(), ObstructionError> {
    if !m.is_hyperbolic()? {
        return Err(ObstructionError::NotHyperbolic);
    }
    Ok(())
}

/// Signs of the eigenvalues of a hyperbolic matrix with real spectrum,
/// listed by ascending eigenvalue with multiplicity.
///
/// Patterns from this function are only comparable across matrices that were
/// diagonalized in the same frame; use [`joint_frame`] for pairs.
pub fn sign_pattern_of(m: &SqIntMatrix) -> Result<SignPattern, ObstructionError> {
    require_hyperbolic(m)?;
    let frame = joint_frame(m, m)?;
    let [s, _] = frame.sign_patterns();
    Ok(s)
}

/// Outcome of [`obstruction_of_pair`].
#[derive(Clone, Debug)]
pub struct PairObstruction {
    pub class: ObstructionClass,
    pub s1: SignPattern,
    pub s2: SignPattern,
    pub intersection: usize,
    pub frame_shift: i64,
}

/// Decides whether the universal cover of `SL_d(R)` splits over `<a1, a2>`.
pub fn obstruction_of_pair(
    a1: &SqIntMatrix,
    a2: &SqIntMatrix,
) -> Result<PairObstruction, ObstructionError> {
    if a1.dim() != a2.dim() {
        return Err(MatrixError::DimMismatch(a1.dim(), a2.dim()).into());
    }
    if a1.dim() < 3 {
        return Err(ObstructionError::DimTooSmall(a1.dim()));
    }
    for a in [a1, a2] {
        let det = a.det();
        if !det.is_one() {
            return Err(ObstructionError::DetNotOne(det));
        }
    }
    if !a1.commutes_with(a2)? {
        return Err(ObstructionError::NotCommuting);
    }
    require_hyperbolic(a1)?;
    require_hyperbolic(a2)?;
    let frame = joint_frame(a1, a2)?;
    let [s1, s2] = frame.sign_patterns();
    let class = pairing(&s1, &s2)?;
    Ok(PairObstruction {
        class,
        intersection: s1.intersection(&s2),
        s1,
        s2,
        frame_shift: frame.shift,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Angle runs `0 → π`.
    Forward,
    /// Pointwise inverse: angle runs `0 → -π`.
    Inverse,
}

/// One leg `t ↦ left · η(t)` of the commutator loop, where `η` rotates through
/// the listed coordinate planes one after another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub left: SignPattern,
    pub planes: Vec<(usize, usize)>,
    pub direction: Direction,
}

impl Segment {
    pub fn start(&self) -> SignPattern {
        self.left.clone()
    }

    pub fn end(&self) -> SignPattern {
        self.left.flipped(&self.planes)
    }
}

/// `η_1 ∗ (D_1·η_2) ∗ (D_1D_2·η_1⁻¹) ∗ (D_2·η_2⁻¹)`, all planes 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopSpec {
    d: usize,
    segments: Vec<Segment>,
}

impl LoopSpec {
    /// Unvalidated constructor; [`LoopSpec::closes`] reports whether the legs chain.
    pub fn from_segments(d: usize, segments: Vec<Segment>) -> Self {
        LoopSpec { d, segments }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// True when the legs chain end to start and the loop is based at the identity.
    pub fn closes(&self) -> bool {
        let mut at = SignPattern::all_positive(self.d);
        for seg in &self.segments {
            if seg.left.len() != self.d
                || seg.planes.iter().any(|&(i, j)| i >= j || j >= self.d)
                || seg.start() != at
            {
                return false;
            }
            at = seg.end();
        }
        at.is_identity()
    }

    /// Union of the coordinates touched by any rotation plane.
    pub fn support(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .segments
            .iter()
            .flat_map(|s| s.planes.iter().flat_map(|&(i, j)| [i, j]))
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

/// Sorted adjacent pairs of the `-1` coordinates: `{a<b<c<d}` gives `(a,b), (c,d)`.
pub fn adjacent_pairing(s: &SignPattern) -> Vec<(usize, usize)> {
    s.negatives().chunks(2).map(|c| (c[0], c[1])).collect()
}

pub fn build_loop_spec(s1: &SignPattern, s2: &SignPattern) -> Result<LoopSpec, ObstructionError> {
    build_loop_spec_with(s1, s2, &adjacent_pairing(s1), &adjacent_pairing(s2))
}

/// Like [`build_loop_spec`] with caller-chosen rotation planes for each `η_i`.
pub fn build_loop_spec_with(
    s1: &SignPattern,
    s2: &SignPattern,
    planes1: &[(usize, usize)],
    planes2: &[(usize, usize)],
) -> Result<LoopSpec, ObstructionError> {
    check_patterns(s1, s2)?;
    for (s, planes) in [(s1, planes1), (s2, planes2)] {
        let mut touched: Vec<usize> = planes.iter().flat_map(|&(i, j)| [i, j]).collect();
        touched.sort_unstable();
        if planes.iter().any(|&(i, j)| i >= j) || touched != s.negatives() {
            return Err(ObstructionError::BadPairing(format!(
                "{planes:?} is not a perfect matching of {:?}",
                s.negatives()
            )));
        }
    }
    let d = s1.len();
    let d1d2 = s1.product(s2);
    let segments = vec![
        Segment {
            left: SignPattern::all_positive(d),
            planes: planes1.to_vec(),
            direction: Direction::Forward,
        },
        Segment {
            left: s1.clone(),
            planes: planes2.to_vec(),
            direction: Direction::Forward,
        },
        Segment {
            left: d1d2,
            planes: planes1.to_vec(),
            direction: Direction::Inverse,
        },
        // D_1 D_2 D_1^{-1} = D_2 for diagonal sign matrices
        Segment {
            left: s2.clone(),
            planes: planes2.to_vec(),
            direction: Direction::Inverse,
        },
    ];
    let spec = LoopSpec { d, segments };
    debug_assert!(spec.closes());
    Ok(spec)
}
