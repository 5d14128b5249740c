//! Numerical lifting of loops in `SO(d)` to `Spin(d)`.
//!
//! `Spin(d)` sits in the even part of the Clifford algebra with `e_i² = -1`.
//! Blade products get their signs combinatorially, so floating point only
//! enters through magnitudes. A loop lifts to a path ending at `+1`
//! (contractible) or `-1` (the generator of `π_1(SO(d))`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{Unit, UnitQuaternion, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::obstruction::{
    build_loop_spec, pairing, Direction, LoopSpec, ObstructionClass, SignPattern,
};

/// Largest dimension supported by the oracle (4096 blades).
pub const MAX_ORACLE_DIM: usize = 12;
pub const DEFAULT_STEPS: usize = 64;
/// Window around `±1` for reading off the final lift.
pub const LIFT_TOLERANCE: f64 = 1e-6;
const PRUNE: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("invalid rotation plane ({i}, {j}) in dimension {d}")]
    BadPlane { i: usize, j: usize, d: usize },
    #[error("dimension {0} exceeds the oracle limit of {MAX_ORACLE_DIM}")]
    DimTooLarge(usize),
    #[error("loop does not close at the identity")]
    LoopNotClosed,
    #[error("final lift has scalar part {0}, not within tolerance of +1 or -1")]
    IndeterminateLift(f64),
    #[error("rotation planes are not confined to three coordinates")]
    NotRank3Confined,
    #[error("at least {min} steps per segment required, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("trace output failed: {0}")]
    Io(#[from] io::Error),
}

/// Sparse multivector; blades are bitmasks over `e_1..e_d` (bit `i` is `e_{i+1}`).
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    d: usize,
    terms: BTreeMap<u32, f64>,
}

/// Sign of `e_A e_B` reduced to canonical order, with `e_i² = -1`.
fn blade_sign(a: u32, b: u32) -> f64 {
    // transpositions: for each generator in b, count generators of a above it
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let i = bb.trailing_zeros();
        swaps += (a >> (i + 1)).count_ones();
        bb &= bb - 1;
    }
    let squares = (a & b).count_ones();
    if (swaps + squares).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl CliffordElement {
    pub fn zero(d: usize) -> Self {
        CliffordElement {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(d: usize, s: f64) -> Self {
        Self::blade(d, 0, s)
    }

    /// `coeff * e_{i1} e_{i2} …` for the 0-based indices set in `mask`.
    pub fn blade(d: usize, mask: u32, coeff: f64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0.0 {
            terms.insert(mask, coeff);
        }
        CliffordElement { d, terms }
    }

    /// Basis vector `e_{i+1}` (0-based `i`).
    pub fn vector(d: usize, i: usize) -> Self {
        Self::blade(d, 1 << i, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeff(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn geom_product(&self, other: &CliffordElement) -> Result<CliffordElement, OracleError> {
        if self.d != other.d {
            return Err(OracleError::DimMismatch(self.d, other.d));
        }
        let mut terms: BTreeMap<u32, f64> = BTreeMap::new();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                *terms.entry(a ^ b).or_insert(0.0) += blade_sign(a, b) * ca * cb;
            }
        }
        terms.retain(|_, c| c.abs() >= PRUNE);
        Ok(CliffordElement { d: self.d, terms })
    }

    /// Reversion: a grade-`k` blade picks up `(-1)^{k(k-1)/2}`.
    pub fn reverse(&self) -> CliffordElement {
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| {
                let k = m.count_ones();
                let s = if (k * k.saturating_sub(1) / 2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                (m, s * c)
            })
            .collect();
        CliffordElement { d: self.d, terms }
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn scaled(&self, s: f64) -> CliffordElement {
        CliffordElement {
            d: self.d,
            terms: self.terms.iter().map(|(&m, &c)| (m, c * s)).collect(),
        }
    }

    /// Blade labels like `1`, `e12`, `e1e10` (1-based indices).
    pub fn support_labels(&self) -> Vec<String> {
        self.terms.keys().map(|&m| blade_label(m)).collect()
    }
}

fn blade_label(mask: u32) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let idx: Vec<u32> = (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect();
    if idx.iter().all(|&i| i < 10) {
        format!("e{}", idx.iter().map(u32::to_string).collect::<String>())
    } else {
        idx.iter().map(|i| format!("e{i}")).collect()
    }
}

pub fn geom_product(
    a: &CliffordElement,
    b: &CliffordElement,
) -> Result<CliffordElement, OracleError> {
    a.geom_product(b)
}

/// Even unit-norm element of the Clifford algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotor(CliffordElement);

impl Rotor {
    pub fn identity(d: usize) -> Self {
        Rotor(CliffordElement::scalar(d, 1.0))
    }

    pub fn element(&self) -> &CliffordElement {
        &self.0
    }

    pub fn mul(&self, other: &Rotor) -> Rotor {
        Rotor(
            self.0
                .geom_product(&other.0)
                .expect("rotors share a dimension"),
        )
    }

    /// Rescales to unit norm; for even elements `⟨R R̃⟩₀` is the squared coefficient norm.
    pub fn renormalized(&self) -> Rotor {
        let n = self.0.norm();
        Rotor(self.0.scaled(1.0 / n))
    }

    /// `v ↦ R v R̃` on a grade-1 vector given by coordinates.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.0.d;
        let mut vec = CliffordElement::zero(d);
        for (i, &x) in v.iter().enumerate() {
            if x != 0.0 {
                vec.terms.insert(1 << i, x);
            }
        }
        let out = self
            .0
            .geom_product(&vec)
            .and_then(|p| p.geom_product(&self.0.reverse()))
            .expect("same dimension");
        (0..d).map(|i| out.coeff(1 << i)).collect()
    }

    /// Rotation matrix of the covering map; column `j` is the image of `e_j`.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.0.d;
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                self.apply(&e)
            })
            .collect();
        (0..d)
            .map(|i| (0..d).map(|j| cols[j][i]).collect())
            .collect()
    }
}

/// `cos(θ/2) + sin(θ/2) e_i e_j`, covering the rotation by `θ` in plane `(i, j)`
/// (0-based, `i < j`) that sends `e_i` toward `e_j`.
pub fn plane_rotor(i: usize, j: usize, theta: f64, d: usize) -> Result<Rotor, OracleError> {
    if i >= j || j >= d {
        return Err(OracleError::BadPlane { i, j, d });
    }
    if d > MAX_ORACLE_DIM {
        return Err(OracleError::DimTooLarge(d));
    }
    let mut terms = BTreeMap::new();
    let (s, c) = (theta / 2.0).sin_cos();
    if c.abs() >= PRUNE {
        terms.insert(0, c);
    }
    if s.abs() >= PRUNE {
        terms.insert((1 << i) | (1 << j), s);
    }
    Ok(Rotor(CliffordElement { d, terms }))
}

fn signed_angle(direction: Direction) -> f64 {
    match direction {
        Direction::Forward => PI,
        Direction::Inverse => -PI,
    }
}

fn classify(scalar: f64) -> Result<ObstructionClass, OracleError> {
    if (scalar - 1.0).abs() <= LIFT_TOLERANCE {
        Ok(ObstructionClass::Trivial)
    } else if (scalar + 1.0).abs() <= LIFT_TOLERANCE {
        Ok(ObstructionClass::Generator)
    } else {
        Err(OracleError::IndeterminateLift(scalar))
    }
}

fn check_spec(spec: &LoopSpec, steps: usize) -> Result<(), OracleError> {
    if steps < 8 {
        return Err(OracleError::TooFewSteps { min: 8, got: steps });
    }
    if spec.dim() > MAX_ORACLE_DIM {
        return Err(OracleError::DimTooLarge(spec.dim()));
    }
    if !spec.closes() {
        return Err(OracleError::LoopNotClosed);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub class: ObstructionClass,
    pub final_scalar: f64,
    pub final_rotor: Rotor,
}

/// Lifts the loop by composing small plane rotors along every leg.
///
/// A left-translated leg `t ↦ g·η(t)` starting from the current lift `g̃`
/// lifts to `g̃·η̃(t)`, so only the rotor increments of `η` matter. Each
/// `±π` plane rotation is cut into `steps` increments.
///
/// With `trace`, writes one line per step:
/// `t=<param> blade-support=[...] scalar=<value>`, `t` running over `[0, 1]`.
pub fn lift_loop(
    spec: &LoopSpec,
    steps: usize,
    mut trace: Option<&mut dyn Write>,
) -> Result<LiftReport, OracleError> {
    check_spec(spec, steps)?;
    let d = spec.dim();
    let mut lift = Rotor::identity(d);
    let nseg = spec.segments().len().max(1) as f64;
    if let Some(out) = trace.as_deref_mut() {
        write_trace_line(out, 0.0, &lift)?;
    }
    for (si, seg) in spec.segments().iter().enumerate() {
        let angle = signed_angle(seg.direction);
        let nplanes = seg.planes.len();
        for (pi, &(i, j)) in seg.planes.iter().enumerate() {
            let inc = plane_rotor(i, j, angle / steps as f64, d)?;
            for k in 1..=steps {
                lift = lift.mul(&inc).renormalized();
                if let Some(out) = trace.as_deref_mut() {
                    let frac = (pi as f64 + k as f64 / steps as f64) / nplanes as f64;
                    write_trace_line(out, (si as f64 + frac) / nseg, &lift)?;
                }
            }
        }
        if nplanes == 0 {
            if let Some(out) = trace.as_deref_mut() {
                write_trace_line(out, (si as f64 + 1.0) / nseg, &lift)?;
            }
        }
    }
    let final_scalar = lift.element().scalar_part();
    Ok(LiftReport {
        class: classify(final_scalar)?,
        final_scalar,
        final_rotor: lift,
    })
}

fn write_trace_line(out: &mut dyn Write, t: f64, r: &Rotor) -> io::Result<()> {
    writeln!(
        out,
        "t={t:.6} blade-support=[{}] scalar={:.12}",
        r.element().support_labels().join(","),
        r.element().scalar_part()
    )
}

/// Independent second lift through unit quaternions, for loops whose rotation
/// planes all lie in one 3-coordinate block.
///
/// Block coordinates `a < b < c` are identified with `x, y, z`. Rotation in
/// `(x, y)` is about `+z`, in `(y, z)` about `+x`, and in `(x, z)` (sending
/// `x` toward `z`) about `-y`.
pub fn so3_quaternion_check(
    spec: &LoopSpec,
    steps: usize,
) -> Result<ObstructionClass, OracleError> {
    check_spec(spec, steps)?;
    let support = spec.support();
    if support.len() > 3 {
        return Err(OracleError::NotRank3Confined);
    }
    let mut block = support.clone();
    let mut extra = 0;
    while block.len() < 3 {
        if !block.contains(&extra) {
            block.push(extra);
        }
        extra += 1;
    }
    block.sort_unstable();
    let pos = |i: usize| block.iter().position(|&b| b == i).unwrap();
    let axis_for = |i: usize, j: usize| -> Vector3<f64> {
        match (pos(i), pos(j)) {
            (0, 1) => Vector3::z(),
            (1, 2) => Vector3::x(),
            (0, 2) => -Vector3::y(),
            _ => unreachable!("planes are ordered i < j"),
        }
    };
    let mut q = UnitQuaternion::identity();
    for seg in spec.segments() {
        let angle = signed_angle(seg.direction);
        for &(i, j) in &seg.planes {
            let axis = Unit::new_normalize(axis_for(i, j));
            let inc = UnitQuaternion::from_axis_angle(&axis, angle / steps as f64);
            for _ in 0..steps {
                q = UnitQuaternion::new_normalize(*(q * inc).quaternion());
            }
        }
    }
    classify(q.w)
}

/// All sign patterns of length `d` with an even number of `-1`s, by bitmask.
pub fn even_patterns(d: usize) -> Vec<SignPattern> {
    (0u64..1 << d)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| SignPattern::from_mask(d, m))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepDiscrepancy {
    pub s1: SignPattern,
    pub s2: SignPattern,
    pub formula: ObstructionClass,
    /// Oracle verdict, or the error it raised.
    pub oracle: Result<ObstructionClass, String>,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub d: usize,
    pub total: usize,
    pub agreements: usize,
    pub discrepancies: Vec<SweepDiscrepancy>,
}

impl SweepReport {
    pub fn all_agree(&self) -> bool {
        self.agreements == self.total
    }

    /// `"<agree>/<total> sign-pattern pairs: formula == oracle"`.
    pub fn summary_line(&self) -> String {
        format!(
            "{}/{} sign-pattern pairs: formula == oracle",
            self.agreements, self.total
        )
    }
}

/// Compares the pairing formula with [`lift_loop`] on every ordered pair of
/// even sign patterns in dimension `d`, using `jobs` workers.
pub fn oracle_sweep(d: usize, steps: usize, jobs: usize) -> Result<SweepReport, OracleError> {
    if d > MAX_ORACLE_DIM {
        return Err(OracleError::DimTooLarge(d));
    }
    if steps < 8 {
        return Err(OracleError::TooFewSteps { min: 8, got: steps });
    }
    let pats = even_patterns(d);
    let pairs: Vec<(&SignPattern, &SignPattern)> = pats
        .iter()
        .flat_map(|a| pats.iter().map(move |b| (a, b)))
        .collect();
    let check = |&(s1, s2): &(&SignPattern, &SignPattern)| -> Option<SweepDiscrepancy> {
        let formula = pairing(s1, s2).expect("even patterns of equal length");
        let spec = build_loop_spec(s1, s2).expect("even patterns of equal length");
        let oracle = lift_loop(&spec, steps, None)
            .map(|r| r.class)
            .map_err(|e| e.to_string());
        (oracle.as_ref() != Ok(&formula)).then(|| SweepDiscrepancy {
            s1: s1.clone(),
            s2: s2.clone(),
            formula,
            oracle,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| OracleError::Io(io::Error::other(e)))?;
    let discrepancies: Vec<SweepDiscrepancy> =
        pool.install(|| pairs.par_iter().filter_map(check).collect());
    Ok(SweepReport {
        d,
        total: pairs.len(),
        agreements: pairs.len() - discrepancies.len(),
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstruction::{build_loop_spec, SignPattern};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    fn rotation_matrix(i: usize, j: usize, theta: f64, d: usize) -> Vec<Vec<f64>> {
        let mut m: Vec<Vec<f64>> = (0..d)
            .map(|r| (0..d).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
            .collect();
        let (s, c) = theta.sin_cos();
        m[i][i] = c;
        m[i][j] = -s;
        m[j][i] = s;
        m[j][j] = c;
        m
    }

    #[test]
    fn basis_products() {
        let d = 3;
        let e1 = CliffordElement::vector(d, 0);
        let e2 = CliffordElement::vector(d, 1);
        let e12 = e1.geom_product(&e2).unwrap();
        assert_eq!(e12, CliffordElement::blade(d, 0b011, 1.0));
        let e23 = CliffordElement::blade(d, 0b110, 1.0);
        assert_eq!(
            e12.geom_product(&e23).unwrap(),
            CliffordElement::blade(d, 0b101, -1.0)
        );
        assert_eq!(
            e12.geom_product(&e12).unwrap(),
            CliffordElement::scalar(d, -1.0)
        );
        assert_eq!(
            e1.geom_product(&e1).unwrap(),
            CliffordElement::scalar(d, -1.0)
        );
        let e21 = e2.geom_product(&e1).unwrap();
        assert_eq!(e21, CliffordElement::blade(d, 0b011, -1.0));
        assert!(e1.geom_product(&CliffordElement::vector(4, 0)).is_err());
    }

    #[test]
    fn plane_rotor_examples() {
        let r = plane_rotor(0, 1, 0.0, 3).unwrap();
        assert_eq!(r.element(), &CliffordElement::scalar(3, 1.0));
        let r = plane_rotor(0, 1, PI, 3).unwrap();
        assert!(close(r.element().coeff(0b011), 1.0));
        assert_eq!(r.element().terms().count(), 1);
        let img: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let mut e = vec![0.0; 3];
                e[j] = 1.0;
                r.apply(&e)
            })
            .collect();
        assert!(close(img[0][0], -1.0) && close(img[1][1], -1.0) && close(img[2][2], 1.0));
        let r = plane_rotor(1, 2, 2.0 * PI, 4).unwrap();
        assert!(close(r.element().scalar_part(), -1.0));
        assert!(matches!(
            plane_rotor(2, 1, 0.3, 3),
            Err(OracleError::BadPlane { .. })
        ));
        assert!(matches!(
            plane_rotor(0, 3, 0.3, 3),
            Err(OracleError::BadPlane { .. })
        ));
    }

    #[test]
    fn rotor_matches_rotation_matrix() {
        for (i, j, theta) in [(0, 1, 0.7), (1, 3, -2.1), (0, 4, 3.0)] {
            let m = plane_rotor(i, j, theta, 5).unwrap().to_matrix();
            let want = rotation_matrix(i, j, theta, 5);
            for r in 0..5 {
                for c in 0..5 {
                    assert!(close(m[r][c], want[r][c]), "({i},{j},{theta}) at {r},{c}");
                }
            }
        }
    }

    #[test]
    fn quaternion_axes_match_plane_rotations() {
        // the axis convention in so3_quaternion_check reproduces the plane rotation matrices
        let theta = 0.9;
        for ((i, j), axis) in [
            ((0, 1), Vector3::z()),
            ((1, 2), Vector3::x()),
            ((0, 2), -Vector3::y()),
        ] {
            let q = UnitQuaternion::from_axis_angle(&Unit::new_normalize(axis), theta);
            let m = q.to_rotation_matrix();
            let want = rotation_matrix(i, j, theta, 3);
            for r in 0..3 {
                for c in 0..3 {
                    assert!(close(m[(r, c)], want[r][c]));
                }
            }
        }
    }

    fn neg(d: usize, idx: &[usize]) -> SignPattern {
        SignPattern::from_negatives(d, idx)
    }

    #[test]
    fn lift_loop_examples() {
        let fig = build_loop_spec(&neg(3, &[0, 1]), &neg(3, &[1, 2])).unwrap();
        let r = lift_loop(&fig, 64, None).unwrap();
        assert_eq!(r.class, ObstructionClass::Generator);
        assert!(close(r.final_scalar, -1.0));

        let triv = build_loop_spec(&SignPattern::all_positive(3), &neg(3, &[0, 1])).unwrap();
        assert_eq!(
            lift_loop(&triv, 64, None).unwrap().class,
            ObstructionClass::Trivial
        );

        let disjoint = build_loop_spec(&neg(4, &[0, 1]), &neg(4, &[2, 3])).unwrap();
        assert_eq!(
            lift_loop(&disjoint, 64, None).unwrap().class,
            ObstructionClass::Trivial
        );
    }

    #[test]
    fn lift_loop_rejects_bad_specs() {
        let fig = build_loop_spec(&neg(3, &[0, 1]), &neg(3, &[1, 2])).unwrap();
        assert!(matches!(
            lift_loop(&fig, 4, None),
            Err(OracleError::TooFewSteps { .. })
        ));
        let mut segs = fig.segments().to_vec();
        segs.pop();
        let open = LoopSpec::from_segments(3, segs);
        assert!(matches!(
            lift_loop(&open, 64, None),
            Err(OracleError::LoopNotClosed)
        ));
    }

    #[test]
    fn trace_format() {
        let fig = build_loop_spec(&neg(3, &[0, 1]), &neg(3, &[1, 2])).unwrap();
        let mut buf = Vec::new();
        lift_loop(&fig, 8, Some(&mut buf)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 4 * 8);
        assert!(lines[0].starts_with("t=0.000000 blade-support=[1] scalar=1.0"));
        assert!(lines[8].contains("blade-support=[e12]"));
        assert!(lines.last().unwrap().starts_with("t=1.000000 "));
        assert!(lines.last().unwrap().contains("scalar=-1.0"));
    }

    #[test]
    fn sweep_small_dimensions() {
        assert_eq!(even_patterns(3).len(), 4);
        let r = oracle_sweep(3, 16, 2).unwrap();
        assert_eq!(r.total, 16);
        assert!(r.all_agree());
        assert_eq!(
            r.summary_line(),
            "16/16 sign-pattern pairs: formula == oracle"
        );
    }

    #[test]
    fn quaternion_oracle_examples() {
        let fig = build_loop_spec(&neg(3, &[0, 1]), &neg(3, &[1, 2])).unwrap();
        assert_eq!(
            so3_quaternion_check(&fig, 64).unwrap(),
            ObstructionClass::Generator
        );
        let triv =
            build_loop_spec(&SignPattern::all_positive(3), &SignPattern::all_positive(3)).unwrap();
        assert_eq!(
            so3_quaternion_check(&triv, 64).unwrap(),
            ObstructionClass::Trivial
        );
        let same = build_loop_spec(&neg(3, &[0, 1]), &neg(3, &[0, 1])).unwrap();
        assert_eq!(
            so3_quaternion_check(&same, 64).unwrap(),
            ObstructionClass::Trivial
        );
        let wide = build_loop_spec(&neg(4, &[0, 1]), &neg(4, &[2, 3])).unwrap();
        assert!(matches!(
            so3_quaternion_check(&wide, 64),
            Err(OracleError::NotRank3Confined)
        ));
    }
}
