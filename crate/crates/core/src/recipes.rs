//! End-to-end constructions of commuting hyperbolic pairs in `SL_d(Z)` whose
//! lifts to the universal cover of `SL_d(R)` do not commute.
//!
//! `A_i = diag(B_i, C_i)`: `B_i` comes from two units of the cubic field of
//! discriminant 49 with weight-2 sign patterns meeting in one coordinate, and
//! `C_i` is multiplication by the square of a unit in a totally real field of
//! degree `d - 3`, so its spectrum is positive and leaves the pairing alone.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::clifford_oracle::{lift_loop, OracleError, DEFAULT_STEPS, MAX_ORACLE_DIM};
use crate::exactpoly::IntPoly;
use crate::intmatrix::{block_diag, MatrixError, SqIntMatrix};
use crate::numberfield::{
    conjugate_signs, independence_certify, is_hyperbolic_unit, is_unit, new_field, FieldElement,
    FieldError, Independence, TotallyRealField, UnitCertificate, DEFAULT_PRECISION_BUDGET,
};
use crate::obstruction::{
    build_loop_spec, obstruction_of_pair, pairing, ObstructionClass, ObstructionError, SignPattern,
};

pub const CERT_SCHEMA: &str = "cert/1";
/// Smallest dimension the construction reaches.
pub const MIN_ASSEMBLY_DIM: usize = 6;
/// Smallest dimension covered by the non-splitting theorem.
pub const THEOREM_MIN_DIM: usize = 7;
/// Coefficient bounds tried, in order, when picking units automatically.
pub const UNIT_SEARCH_BOUNDS: [i64; 3] = [1, 2, 3];
const JSON_SAFE_BITS: u32 = 53;
/// Statements a certificate relies on for context but does not check.
pub const UNVERIFIED_CLAIMS: [&str; 2] = [
    "the cubic units generate the unit group modulo torsion",
    "the obstruction class does not depend on the diagonalizing frame or the chosen paths",
];

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("dimension {0} is below {MIN_ASSEMBLY_DIM}")]
    DimTooSmall(usize),
    #[error("no totally real field of degree {0} available")]
    NoFieldAvailable(usize),
    #[error("field has degree {got}, expected {expected}")]
    FieldDegreeMismatch { expected: usize, got: usize },
    #[error("no pair of independent hyperbolic units with coefficients in [-{bound}, {bound}]")]
    NoUnitsFound { bound: i64 },
    #[error("units are not certified independent")]
    DependentUnits,
    #[error("unit is not hyperbolic")]
    NotHyperbolic,
    #[error("certificates mix dimensions {0} and {1}")]
    MixedDimensions(usize, usize),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("integer of magnitude at least 2^53 must be encoded as a decimal string")]
    IntegerOverflowEncoding,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn verify(cond: bool, what: &str) -> Result<(), RecipeError> {
    if cond {
        Ok(())
    } else {
        Err(RecipeError::Verification(what.to_string()))
    }
}

// ---------------------------------------------------------------------------
// built-in fields

/// Totally real defining polynomials, ascending coefficients, grouped by degree.
const BUILTIN_FIELDS: &[&[i64]] = &[
    // x^3 + x^2 - 2x - 1
    &[-1, -2, 1, 1],
    // x^4 - 4x^2 + 1
    &[1, 0, -4, 0, 1],
    // x^4 - x^3 - 3x^2 + x + 1
    &[1, 1, -3, -1, 1],
    // x^4 - 4x^2 + 2
    &[2, 0, -4, 0, 1],
    // x^4 - 5x^2 + 5
    &[5, 0, -5, 0, 1],
    // x^5 + x^4 - 4x^3 - 3x^2 + 3x + 1
    &[1, 3, -3, -4, 1, 1],
    // x^5 - 5x^3 + 4x - 1
    &[-1, 4, 0, -5, 0, 1],
    // x^6 + x^5 - 5x^4 - 4x^3 + 6x^2 + 3x - 1
    &[-1, 3, 6, -4, -5, 1, 1],
    // x(x^2 - 1)(x^2 - 4)(x^2 - 9) - 1
    &[-1, -36, 0, 49, 0, -14, 0, 1],
    // x^8 + x^7 - 7x^6 - 6x^5 + 15x^4 + 10x^3 - 10x^2 - 4x + 1
    &[1, -4, -10, 10, 15, -6, -7, 1, 1],
];

/// Every built-in defining polynomial.
pub fn builtin_polys() -> Vec<IntPoly> {
    BUILTIN_FIELDS
        .iter()
        .map(|c| IntPoly::from_i64s(c))
        .collect()
}

/// Built-in fields of the given degree, validated, in table order.
pub fn builtin_fields(degree: usize) -> Result<Vec<TotallyRealField>, RecipeError> {
    builtin_polys()
        .into_iter()
        .filter(|p| p.degree() == Some(degree))
        .map(|p| new_field(p).map_err(RecipeError::from))
        .collect()
}

/// First built-in field of the given degree.
pub fn builtin_field(degree: usize) -> Result<TotallyRealField, RecipeError> {
    builtin_fields(degree)?
        .into_iter()
        .next()
        .ok_or(RecipeError::NoFieldAvailable(degree))
}

// ---------------------------------------------------------------------------
// blocks

/// The cubic block: multiplication by `-ε₁` and `ε₁ε₂` on `Z[α]`,
/// `α³ + α² - 2α - 1 = 0`, `ε₁ = α² + α - 1`, `ε₂ = -α² + 2`.
#[derive(Clone, Debug)]
pub struct CubicBlock {
    pub field: TotallyRealField,
    pub units: [FieldElement; 2],
    pub matrices: [SqIntMatrix; 2],
    pub signs: [SignPattern; 2],
    pub intersection: usize,
    pub independence: Independence,
}

pub fn heptagonal_cubic_block() -> Result<CubicBlock, RecipeError> {
    let field = new_field(IntPoly::from_i64s(&[-1, -2, 1, 1]))?;
    verify(
        *field.discriminant() == BigInt::from(49),
        "cubic discriminant is not 49",
    )?;
    let eps1 = field.element_i64(&[-1, 1, 1])?;
    let eps2 = field.element_i64(&[2, 0, -1])?;
    let u1 = eps1.neg();
    let u2 = eps1.mul(&eps2)?;
    let mut signs = Vec::new();
    let mut matrices = Vec::new();
    for u in [&u1, &u2] {
        let cert = is_unit(u)?
            .certificate()
            .ok_or_else(|| RecipeError::Verification(format!("{u} is not a unit")))?;
        verify(cert.hyperbolic, "cubic unit is not hyperbolic")?;
        verify(cert.det_of_mult_matrix == 1, "cubic unit has norm -1")?;
        verify(
            cert.conjugate_signs.weight() == 2,
            "cubic sign pattern weight is not 2",
        )?;
        let m = u.mult_matrix();
        verify(m.det().is_one(), "cubic block determinant is not 1")?;
        signs.push(cert.conjugate_signs);
        matrices.push(m);
    }
    verify(
        matrices[0].commutes_with(&matrices[1])?,
        "cubic block does not commute",
    )?;
    let intersection = signs[0].intersection(&signs[1]);
    verify(
        intersection == 1,
        "cubic sign patterns do not meet in one coordinate",
    )?;
    let independence = independence_certify(&u1, &u2, DEFAULT_PRECISION_BUDGET)?;
    let [m1, m2]: [SqIntMatrix; 2] = matrices.try_into().unwrap();
    let [s1, s2]: [SignPattern; 2] = signs.try_into().unwrap();
    Ok(CubicBlock {
        field,
        units: [u1, u2],
        matrices: [m1, m2],
        signs: [s1, s2],
        intersection,
        independence,
    })
}

/// A block with all-positive spectrum: multiplication by `u_i²`.
#[derive(Clone, Debug)]
pub struct PositiveBlock {
    pub field: TotallyRealField,
    pub base_units: [FieldElement; 2],
    pub squares: [FieldElement; 2],
    pub matrices: [SqIntMatrix; 2],
    /// Independence of the squares, certified afresh.
    pub independence: Independence,
}

pub fn positive_block(
    field: &TotallyRealField,
    u1: &FieldElement,
    u2: &FieldElement,
) -> Result<PositiveBlock, RecipeError> {
    if field.degree() < 3 {
        return Err(FieldError::DegreeTooSmall.into());
    }
    for u in [u1, u2] {
        if u.field() != field {
            return Err(FieldError::FieldMismatch.into());
        }
        if !is_hyperbolic_unit(u)? {
            return Err(RecipeError::NotHyperbolic);
        }
    }
    if !independence_certify(u1, u2, DEFAULT_PRECISION_BUDGET)?.is_independent() {
        return Err(RecipeError::DependentUnits);
    }
    let squares = [u1.pow(2), u2.pow(2)];
    let independence = independence_certify(&squares[0], &squares[1], DEFAULT_PRECISION_BUDGET)?;
    if !independence.is_independent() {
        return Err(RecipeError::DependentUnits);
    }
    let matrices = [squares[0].mult_matrix(), squares[1].mult_matrix()];
    for (sq, m) in squares.iter().zip(&matrices) {
        verify(
            conjugate_signs(sq)?.is_identity(),
            "square has a negative conjugate",
        )?;
        verify(m.det().is_one(), "positive block determinant is not 1")?;
        verify(m.is_hyperbolic()?, "positive block is not hyperbolic")?;
    }
    verify(
        matrices[0].commutes_with(&matrices[1])?,
        "positive block does not commute",
    )?;
    Ok(PositiveBlock {
        field: field.clone(),
        base_units: [u1.clone(), u2.clone()],
        squares,
        matrices,
        independence,
    })
}

// ---------------------------------------------------------------------------
// unit search

/// Units `u ≠ 0` of `Z[α]` with coefficients in `[-bound, bound]`, one per
/// pair `±u` (the one whose first nonzero coefficient is positive), in
/// lexicographic order of coefficient vectors. `jobs` sizes the worker pool.
pub fn unit_search(
    field: &TotallyRealField,
    bound: i64,
    jobs: usize,
) -> Result<Vec<UnitCertificate>, RecipeError> {
    if bound < 1 {
        return Ok(Vec::new());
    }
    let n = field.degree() as u32;
    let base = (2 * bound + 1) as u64;
    let total = base
        .checked_pow(n)
        .ok_or_else(|| RecipeError::Verification("search box too large".into()))?;
    let decode = |mut idx: u64| -> Vec<i64> {
        let mut c = vec![0i64; n as usize];
        for k in (0..n as usize).rev() {
            c[k] = (idx % base) as i64 - bound;
            idx /= base;
        }
        c
    };
    let probe = |idx: u64| -> Option<Result<UnitCertificate, RecipeError>> {
        let c = decode(idx);
        match c.iter().find(|x| **x != 0) {
            Some(first) if *first > 0 => {}
            _ => return None,
        }
        let u = match field.element_i64(&c) {
            Ok(u) => u,
            Err(e) => return Some(Err(e.into())),
        };
        match is_unit(&u) {
            Ok(check) => check.certificate().map(Ok),
            Err(e) => Some(Err(e.into())),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RecipeError::Verification(format!("worker pool: {e}")))?;
    pool.install(|| (0..total).into_par_iter().filter_map(probe).collect())
}

/// First hyperbolic unit paired with the first later hyperbolic unit
/// certified independent of it, over increasing coefficient bounds.
pub fn choose_units(
    field: &TotallyRealField,
    jobs: usize,
) -> Result<(FieldElement, FieldElement), RecipeError> {
    let mut last = 0;
    for bound in UNIT_SEARCH_BOUNDS {
        last = bound;
        let hyp: Vec<FieldElement> = unit_search(field, bound, jobs)?
            .into_iter()
            .filter(|c| c.hyperbolic)
            .map(|c| c.element)
            .collect();
        for (i, u1) in hyp.iter().enumerate() {
            for u2 in &hyp[i + 1..] {
                if independence_certify(u1, u2, DEFAULT_PRECISION_BUDGET)?.is_independent() {
                    return Ok((u1.clone(), u2.clone()));
                }
            }
        }
    }
    Err(RecipeError::NoUnitsFound { bound: last })
}

// ---------------------------------------------------------------------------
// assembly

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Cubic,
    Positive,
}

impl BlockKind {
    fn as_str(self) -> &'static str {
        match self {
            BlockKind::Cubic => "cubic",
            BlockKind::Positive => "positive",
        }
    }
}

/// One diagonal block: multiplication by `units[i]^exponent` in `Z[x]/(xi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRecord {
    pub kind: BlockKind,
    pub xi: IntPoly,
    pub disc: BigInt,
    pub units: [Vec<BigInt>; 2],
    pub exponent: u32,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionCertificate {
    pub d: usize,
    pub blocks: Vec<BlockRecord>,
    pub a1: SqIntMatrix,
    pub a2: SqIntMatrix,
    pub charpolys: [IntPoly; 2],
    pub dets: [BigInt; 2],
    pub hyperbolic: [bool; 2],
    pub commuting: bool,
    /// Independence of the units generating the positive block.
    pub independent: bool,
    pub s1: SignPattern,
    pub s2: SignPattern,
    pub intersection: usize,
    pub obstruction: ObstructionClass,
    /// `None` when `d` exceeds the oracle limit.
    pub oracle_agreement: Option<bool>,
    pub theorem_scope: bool,
}

/// Builds `A_i = diag(B_i, C_i)` in dimension `d`, the positive block coming
/// from `field` or from the built-in table.
pub fn assemble(
    d: usize,
    field: Option<&TotallyRealField>,
    jobs: usize,
) -> Result<ConstructionCertificate, RecipeError> {
    if d < MIN_ASSEMBLY_DIM {
        return Err(RecipeError::DimTooSmall(d));
    }
    let n = d - 3;
    let field = match field {
        Some(k) if k.degree() != n => {
            return Err(RecipeError::FieldDegreeMismatch {
                expected: n,
                got: k.degree(),
            })
        }
        Some(k) => k.clone(),
        None => builtin_field(n)?,
    };
    let (u1, u2) = choose_units(&field, jobs)?;
    assemble_with_units(&field, &u1, &u2)
}

/// As [`assemble`] with the positive-block units given.
pub fn assemble_with_units(
    field: &TotallyRealField,
    u1: &FieldElement,
    u2: &FieldElement,
) -> Result<ConstructionCertificate, RecipeError> {
    let cubic = heptagonal_cubic_block()?;
    let pos = positive_block(field, u1, u2)?;
    let a1 = block_diag(&[cubic.matrices[0].clone(), pos.matrices[0].clone()])?;
    let a2 = block_diag(&[cubic.matrices[1].clone(), pos.matrices[1].clone()])?;
    let blocks = vec![
        BlockRecord {
            kind: BlockKind::Cubic,
            xi: cubic.field.poly().clone(),
            disc: cubic.field.discriminant().clone(),
            units: [
                cubic.units[0].coeffs().to_vec(),
                cubic.units[1].coeffs().to_vec(),
            ],
            exponent: 1,
            independent: cubic.independence.is_independent(),
        },
        BlockRecord {
            kind: BlockKind::Positive,
            xi: field.poly().clone(),
            disc: field.discriminant().clone(),
            units: [u1.coeffs().to_vec(), u2.coeffs().to_vec()],
            exponent: 2,
            independent: pos.independence.is_independent(),
        },
    ];
    let cert = certify_pair(a1, a2, blocks)?;
    // all-positive blocks leave the intersection of the cubic patterns alone
    let (c1, c2) = (
        cubic.signs[0].concat(&SignPattern::all_positive(field.degree())),
        cubic.signs[1].concat(&SignPattern::all_positive(field.degree())),
    );
    verify(
        cert.intersection == c1.intersection(&c2),
        "joint frame intersection differs from the block computation",
    )?;
    verify(
        cert.obstruction == ObstructionClass::Generator,
        "assembled pair is not obstructed",
    )?;
    Ok(cert)
}

/// Oracle verdict for a sign-pattern pair, compared with the formula.
fn oracle_agrees(
    s1: &SignPattern,
    s2: &SignPattern,
    class: ObstructionClass,
) -> Result<bool, RecipeError> {
    let spec = build_loop_spec(s1, s2)?;
    Ok(lift_loop(&spec, DEFAULT_STEPS, None)?.class == class)
}

fn certify_pair(
    a1: SqIntMatrix,
    a2: SqIntMatrix,
    blocks: Vec<BlockRecord>,
) -> Result<ConstructionCertificate, RecipeError> {
    let d = a1.dim();
    let obs = obstruction_of_pair(&a1, &a2)?;
    let oracle_agreement = if d <= MAX_ORACLE_DIM {
        let ok = oracle_agrees(&obs.s1, &obs.s2, obs.class)?;
        verify(ok, "Clifford oracle disagrees with the pairing formula")?;
        Some(ok)
    } else {
        None
    };
    let independent = blocks
        .iter()
        .filter(|b| b.kind == BlockKind::Positive)
        .all(|b| b.independent);
    let hyperbolic = [a1.is_hyperbolic()?, a2.is_hyperbolic()?];
    let commuting = a1.commutes_with(&a2)?;
    let dets = [a1.det(), a2.det()];
    let theorem_scope = d >= THEOREM_MIN_DIM
        && hyperbolic.iter().all(|h| *h)
        && commuting
        && dets.iter().all(One::is_one)
        && independent;
    Ok(ConstructionCertificate {
        d,
        blocks,
        charpolys: [a1.charpoly(), a2.charpoly()],
        a1,
        a2,
        dets,
        hyperbolic,
        commuting,
        independent,
        s1: obs.s1,
        s2: obs.s2,
        intersection: obs.intersection,
        obstruction: obs.class,
        oracle_agreement,
        theorem_scope,
    })
}

impl ConstructionCertificate {
    /// Recomputes every stored fact from the stored blocks and matrices.
    pub fn reverify(&self) -> Result<(), RecipeError> {
        verify(
            self.a1.dim() == self.d && self.a2.dim() == self.d,
            "matrix dimension differs from d",
        )?;
        let mut m1 = Vec::new();
        let mut m2 = Vec::new();
        for b in &self.blocks {
            let field = new_field(b.xi.clone())?;
            verify(
                field.discriminant() == &b.disc,
                "stored discriminant is wrong",
            )?;
            let u1 = field.element(b.units[0].clone())?;
            let u2 = field.element(b.units[1].clone())?;
            let indep = independence_certify(
                &u1.pow(b.exponent),
                &u2.pow(b.exponent),
                DEFAULT_PRECISION_BUDGET,
            )?;
            verify(
                indep.is_independent() == b.independent,
                "stored independence does not reproduce",
            )?;
            m1.push(u1.pow(b.exponent).mult_matrix());
            m2.push(u2.pow(b.exponent).mult_matrix());
        }
        verify(
            block_diag(&m1)? == self.a1,
            "A1 is not the block diagonal of the stored units",
        )?;
        verify(
            block_diag(&m2)? == self.a2,
            "A2 is not the block diagonal of the stored units",
        )?;
        let blocks = self.blocks.clone();
        let fresh = certify_pair(self.a1.clone(), self.a2.clone(), blocks)?;
        verify(
            pairing(&self.s1, &self.s2)? == self.obstruction,
            "stored class does not follow from the stored sign patterns",
        )?;
        verify(fresh == *self, "certificate does not reproduce")?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| {
                json!({
                    "kind": b.kind.as_str(),
                    "xi": encode_ints(b.xi.coeffs()),
                    "disc": encode_int(&b.disc),
                    "units": [encode_ints(&b.units[0]), encode_ints(&b.units[1])],
                    "exponent": b.exponent,
                    "independence": independence_label(b.independent),
                })
            })
            .collect();
        json!({
            "schema": CERT_SCHEMA,
            "d": self.d,
            "blocks": blocks,
            "matrices": {"a1": encode_matrix(&self.a1), "a2": encode_matrix(&self.a2)},
            "charpolys": {
                "a1": encode_ints(self.charpolys[0].coeffs()),
                "a2": encode_ints(self.charpolys[1].coeffs()),
            },
            "det": {"a1": encode_int(&self.dets[0]), "a2": encode_int(&self.dets[1])},
            "hyperbolic": {"a1": self.hyperbolic[0], "a2": self.hyperbolic[1]},
            "commuting": self.commuting,
            "independence": independence_label(self.independent),
            "sign_patterns": {"s1": self.s1.signs(), "s2": self.s2.signs()},
            "intersection": self.intersection,
            "obstruction": self.obstruction.as_str(),
            "oracle_agreement": self.oracle_agreement,
            "theorem_scope": self.theorem_scope,
            "unverified_claims": UNVERIFIED_CLAIMS,
        })
    }

    /// Canonical text: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(v: &Value) -> Result<Self, RecipeError> {
        let obj = as_object(v, "certificate")?;
        let schema = get(obj, "schema")?.as_str().unwrap_or_default();
        if schema != CERT_SCHEMA {
            return Err(RecipeError::Schema(format!(
                "unsupported schema {schema:?}"
            )));
        }
        if *get(obj, "unverified_claims")? != json!(UNVERIFIED_CLAIMS) {
            return Err(schema_err(
                "unverified_claims does not match this schema version",
            ));
        }
        let d = get_usize(obj, "d")?;
        let blocks = get(obj, "blocks")?
            .as_array()
            .ok_or_else(|| schema_err("blocks must be an array"))?
            .iter()
            .map(parse_block)
            .collect::<Result<Vec<_>, _>>()?;
        let mats = as_object(get(obj, "matrices")?, "matrices")?;
        let cps = as_object(get(obj, "charpolys")?, "charpolys")?;
        let dets = as_object(get(obj, "det")?, "det")?;
        let hyp = as_object(get(obj, "hyperbolic")?, "hyperbolic")?;
        let sp = as_object(get(obj, "sign_patterns")?, "sign_patterns")?;
        let obstruction = match get(obj, "obstruction")?.as_str() {
            Some("generator") => ObstructionClass::Generator,
            Some("trivial") => ObstructionClass::Trivial,
            _ => {
                return Err(schema_err(
                    "obstruction must be \"generator\" or \"trivial\"",
                ))
            }
        };
        let oracle_agreement = match get(obj, "oracle_agreement")? {
            Value::Null => None,
            Value::Bool(b) => Some(*b),
            _ => return Err(schema_err("oracle_agreement must be a boolean or null")),
        };
        Ok(ConstructionCertificate {
            d,
            blocks,
            a1: decode_matrix(get(mats, "a1")?)?,
            a2: decode_matrix(get(mats, "a2")?)?,
            charpolys: [
                IntPoly::new(decode_ints(get(cps, "a1")?)?),
                IntPoly::new(decode_ints(get(cps, "a2")?)?),
            ],
            dets: [decode_int(get(dets, "a1")?)?, decode_int(get(dets, "a2")?)?],
            hyperbolic: [get_bool(hyp, "a1")?, get_bool(hyp, "a2")?],
            commuting: get_bool(obj, "commuting")?,
            independent: parse_independence(get(obj, "independence")?)?,
            s1: decode_signs(get(sp, "s1")?)?,
            s2: decode_signs(get(sp, "s2")?)?,
            intersection: get_usize(obj, "intersection")?,
            obstruction,
            oracle_agreement,
            theorem_scope: get_bool(obj, "theorem_scope")?,
        })
    }
}

fn independence_label(independent: bool) -> &'static str {
    if independent {
        "independent"
    } else {
        "inconclusive"
    }
}

fn parse_independence(v: &Value) -> Result<bool, RecipeError> {
    match v.as_str() {
        Some("independent") => Ok(true),
        Some("inconclusive") => Ok(false),
        _ => Err(schema_err(
            "independence must be \"independent\" or \"inconclusive\"",
        )),
    }
}

fn parse_block(v: &Value) -> Result<BlockRecord, RecipeError> {
    let obj = as_object(v, "block")?;
    let kind = match get(obj, "kind")?.as_str() {
        Some("cubic") => BlockKind::Cubic,
        Some("positive") => BlockKind::Positive,
        _ => return Err(schema_err("block kind must be \"cubic\" or \"positive\"")),
    };
    let units = get(obj, "units")?
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| schema_err("units must be a list of two coefficient vectors"))?;
    let exponent = get_usize(obj, "exponent")?;
    Ok(BlockRecord {
        kind,
        xi: IntPoly::new(decode_ints(get(obj, "xi")?)?),
        disc: decode_int(get(obj, "disc")?)?,
        units: [decode_ints(&units[0])?, decode_ints(&units[1])?],
        exponent: u32::try_from(exponent).map_err(|_| schema_err("exponent out of range"))?,
        independent: parse_independence(get(obj, "independence")?)?,
    })
}

// ---------------------------------------------------------------------------
// catalog

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogClass {
    /// The unordered pair `{charpoly(A1), charpoly(A2)}`, sorted.
    pub charpolys: [IntPoly; 2],
    /// Indices into the input list.
    pub members: Vec<usize>,
}

/// Certificates grouped by their charpoly pairs. Different classes are
/// certainly non-conjugate; one class may still hold non-conjugate pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogReport {
    pub d: Option<usize>,
    pub classes: Vec<CatalogClass>,
}

impl CatalogReport {
    pub fn distinct_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                json!({
                    "charpolys": [encode_ints(c.charpolys[0].coeffs()), encode_ints(c.charpolys[1].coeffs())],
                    "members": c.members,
                })
            })
            .collect();
        json!({
            "d": self.d,
            "invariant": "unordered charpoly pair",
            "distinct_classes": self.distinct_classes(),
            "classes": classes,
        })
    }
}

pub fn conjugacy_catalog(certs: &[ConstructionCertificate]) -> Result<CatalogReport, RecipeError> {
    let d = certs.first().map(|c| c.d);
    let mut classes: Vec<CatalogClass> = Vec::new();
    for (idx, cert) in certs.iter().enumerate() {
        if Some(cert.d) != d {
            return Err(RecipeError::MixedDimensions(d.unwrap_or(0), cert.d));
        }
        let mut key = [cert.a1.charpoly(), cert.a2.charpoly()];
        if key[0].coeffs() > key[1].coeffs() {
            key.swap(0, 1);
        }
        match classes.iter_mut().find(|c| c.charpolys == key) {
            Some(c) => c.members.push(idx),
            None => classes.push(CatalogClass {
                charpolys: key,
                members: vec![idx],
            }),
        }
    }
    Ok(CatalogReport { d, classes })
}

// ---------------------------------------------------------------------------
// JSON integers

/// JSON number when the magnitude is below `2^53`, decimal string otherwise.
pub fn encode_int(x: &BigInt) -> Value {
    if x.bits() <= u64::from(JSON_SAFE_BITS) {
        if let Some(i) = x.to_i64() {
            if i.unsigned_abs() < 1u64 << JSON_SAFE_BITS {
                return Value::from(i);
            }
        }
    }
    Value::String(x.to_string())
}

pub fn encode_ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(encode_int).collect())
}

fn encode_matrix(m: &SqIntMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| encode_ints(r)).collect())
}

/// Inverse of [`encode_int`]; numbers of magnitude `2^53` or more are refused.
pub fn decode_int(v: &Value) -> Result<BigInt, RecipeError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                if i.unsigned_abs() >= 1u64 << JSON_SAFE_BITS {
                    return Err(RecipeError::IntegerOverflowEncoding);
                }
                Ok(BigInt::from(i))
            } else if n.as_u64().is_some() {
                Err(RecipeError::IntegerOverflowEncoding)
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if f.is_finite() && f.fract() == 0.0 && f.abs() >= 2f64.powi(JSON_SAFE_BITS as i32)
                {
                    Err(RecipeError::IntegerOverflowEncoding)
                } else {
                    Err(schema_err(&format!("{n} is not an integer")))
                }
            }
        }
        Value::String(s) => {
            let digits = s.strip_prefix('-').unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(schema_err(&format!("{s:?} is not a decimal integer")));
            }
            Ok(BigInt::from_str(s).expect("validated decimal"))
        }
        other => Err(schema_err(&format!("expected an integer, found {other}"))),
    }
}

pub fn decode_ints(v: &Value) -> Result<Vec<BigInt>, RecipeError> {
    v.as_array()
        .ok_or_else(|| schema_err("expected an array of integers"))?
        .iter()
        .map(decode_int)
        .collect()
}

pub fn decode_matrix(v: &Value) -> Result<SqIntMatrix, RecipeError> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema_err("matrix must be an array of rows"))?
        .iter()
        .map(decode_ints)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SqIntMatrix::from_rows(rows)?)
}

fn decode_signs(v: &Value) -> Result<SignPattern, RecipeError> {
    let signs = decode_ints(v)?
        .iter()
        .map(|s| s.to_i8().ok_or_else(|| schema_err("sign out of range")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SignPattern::new(signs)?)
}

fn schema_err(msg: &str) -> RecipeError {
    RecipeError::Schema(msg.to_string())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, RecipeError> {
    v.as_object()
        .ok_or_else(|| schema_err(&format!("{what} must be an object")))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, RecipeError> {
    obj.get(key)
        .ok_or_else(|| schema_err(&format!("missing key {key:?}")))
}

fn get_bool(obj: &Map<String, Value>, key: &str) -> Result<bool, RecipeError> {
    get(obj, key)?
        .as_bool()
        .ok_or_else(|| schema_err(&format!("{key} must be a boolean")))
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize, RecipeError> {
    get(obj, key)?
        .as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema_err(&format!("{key} must be a non-negative integer")))
}
