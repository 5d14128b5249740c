//! End-to-end constructions checked against independent floating-point
//! computations and the Spin-lift oracle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use torus_obstruct::clifford_oracle::oracle_sweep;
use torus_obstruct::exactpoly::IntPoly;
use torus_obstruct::intmatrix::SqIntMatrix;
use torus_obstruct::numberfield::new_field;
use torus_obstruct::obstruction::{obstruction_of_pair, ObstructionClass};
use torus_obstruct::recipes::{
    assemble, builtin_fields, conjugacy_catalog, heptagonal_cubic_block, unit_search,
    ConstructionCertificate,
};

fn to_f64(m: &SqIntMatrix) -> DMatrix<f64> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| m.get(i, j).to_f64().unwrap())
}

/// Eigenvalue signs of a matrix with real simple spectrum, by ascending value.
fn float_eigen_signs(m: &SqIntMatrix) -> Vec<f64> {
    let ev = to_f64(m).complex_eigenvalues();
    let mut re: Vec<f64> = ev
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-8, "non-real eigenvalue {z}");
            z.re
        })
        .collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    re
}

#[test]
fn cubic_block_matches_cosine_model() {
    // conjugates of α are 2cos(2πk/7); ε₁ = α² + α - 1, ε₂ = 2 - α²
    let b = heptagonal_cubic_block().unwrap();
    let alphas: Vec<f64> = (1..=3)
        .map(|k| 2.0 * (2.0 * PI * k as f64 / 7.0).cos())
        .collect();
    let e1: Vec<f64> = alphas.iter().map(|a| a * a + a - 1.0).collect();
    let e2: Vec<f64> = alphas.iter().map(|a| 2.0 - a * a).collect();
    let mut u1: Vec<f64> = e1.iter().map(|x| -x).collect();
    let mut u2: Vec<f64> = e1.iter().zip(&e2).map(|(x, y)| x * y).collect();
    u1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    u2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (model, m) in [(&u1, &b.matrices[0]), (&u2, &b.matrices[1])] {
        let got = float_eigen_signs(m);
        for (x, y) in model.iter().zip(&got) {
            assert!((x - y).abs() < 1e-9);
        }
        assert_eq!(got.iter().filter(|x| **x < 0.0).count(), 2);
        assert!(got.iter().all(|x| (x.abs() - 1.0).abs() > 1e-3));
    }
    // joint sign pattern in α-root order, read off the float model
    let neg = |v: &[f64]| -> Vec<usize> { (0..3).filter(|&i| v[i] < 0.0).collect() };
    let n1 = neg(&e1.iter().map(|x| -x).collect::<Vec<_>>());
    let n2 = neg(&e1.iter().zip(&e2).map(|(x, y)| x * y).collect::<Vec<_>>());
    let common = n1.iter().filter(|i| n2.contains(i)).count();
    assert_eq!(common, 1);
    assert_eq!(b.intersection, common);
}

#[test]
fn assembled_pairs_are_obstructed_in_dimensions_6_to_10() {
    for d in 6..=10 {
        let c = assemble(d, None, 2).unwrap();
        assert_eq!(c.d, d);
        assert_eq!(c.obstruction, ObstructionClass::Generator, "d={d}");
        assert_eq!(c.oracle_agreement, Some(true));
        assert_eq!(c.theorem_scope, d >= 7);
        assert_eq!(c.s1.weight(), 2);
        assert_eq!(c.s2.weight(), 2);
        let back = ConstructionCertificate::from_json(&c.to_json()).unwrap();
        back.reverify().unwrap();
        assert_eq!(back.to_canonical_string(), c.to_canonical_string());
        // every eigenvalue off the unit circle, negative ones in the cubic block only;
        // beyond d = 8 the spectrum spreads too far for double precision
        if d > 8 {
            continue;
        }
        for a in [&c.a1, &c.a2] {
            let ev = float_eigen_signs(a);
            assert!(ev.iter().all(|x| (x.abs() - 1.0).abs() > 1e-6));
            assert_eq!(ev.iter().filter(|x| **x < 0.0).count(), 2, "d={d} {ev:?}");
        }
    }
}

#[test]
fn self_pairs_are_trivial() {
    let c = assemble(7, None, 1).unwrap();
    assert_eq!(
        obstruction_of_pair(&c.a1, &c.a1).unwrap().class,
        ObstructionClass::Trivial
    );
    assert_eq!(
        obstruction_of_pair(&c.a2, &c.a2).unwrap().class,
        ObstructionClass::Trivial
    );
}

#[test]
fn quartic_catalog_separates_fields() {
    let certs: Vec<ConstructionCertificate> = builtin_fields(4)
        .unwrap()
        .iter()
        .map(|k| assemble(7, Some(k), 1).unwrap())
        .collect();
    assert!(certs.len() >= 3);
    let report = conjugacy_catalog(&certs).unwrap();
    assert_eq!(report.distinct_classes(), certs.len());
    assert_eq!(
        conjugacy_catalog(&certs[..1]).unwrap().distinct_classes(),
        1
    );
}

#[test]
fn unit_search_quadratic() {
    let k = new_field(IntPoly::from_i64s(&[-2, 0, 1])).unwrap();
    let found = unit_search(&k, 2, 1).unwrap();
    let want = [BigInt::from(1), BigInt::from(1)];
    let u = found.iter().find(|u| u.element.coeffs() == want).unwrap();
    assert_eq!(u.det_of_mult_matrix, -1);
    assert!(u.hyperbolic);
    // 1 + √2 ≈ 2.414, 1 - √2 ≈ -0.414
    assert_eq!(u.conjugate_signs.negatives(), vec![0]);
}

#[test]
fn oracle_matches_formula_exhaustively_up_to_dimension_6() {
    for (d, pairs) in [(3, 16), (4, 64), (5, 256), (6, 1024)] {
        let r = oracle_sweep(d, 64, 4).unwrap();
        assert_eq!(r.total, pairs);
        assert!(r.all_agree(), "d={d}: {:?}", r.discrepancies);
    }
}
