//! Randomized algebraic identities across the exact and numeric layers.

use num_bigint::BigInt;
use proptest::prelude::*;
use torus_obstruct::clifford_oracle::{even_patterns, lift_loop};
use torus_obstruct::exactpoly::{
    discriminant, interval_eval, resultant, Dyadic, DyadicInterval, IntPoly,
};
use torus_obstruct::intmatrix::SqIntMatrix;
use torus_obstruct::numberfield::{conjugate_signs, new_field, TotallyRealField};
use torus_obstruct::obstruction::{build_loop_spec, pairing, ObstructionClass, SignPattern};

fn cubic() -> TotallyRealField {
    new_field(IntPoly::from_i64s(&[-1, -2, 1, 1])).unwrap()
}

fn quartic() -> TotallyRealField {
    new_field(IntPoly::from_i64s(&[1, 1, -3, -1, 1])).unwrap()
}

fn poly_strategy(max_deg: usize, c: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-c..=c, 1..=max_deg + 1).prop_map(|v| IntPoly::from_i64s(&v))
}

fn nonzero_coeffs(n: usize, c: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-c..=c, n).prop_filter("nonzero", |v| v.iter().any(|x| *x != 0))
}

fn even_pattern(d: usize) -> impl Strategy<Value = SignPattern> {
    (0u64..1 << d).prop_map(move |m| {
        let m = if m.count_ones() % 2 == 1 { m ^ 1 } else { m };
        SignPattern::from_mask(d, m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discriminant_of_product(p in poly_strategy(3, 6), q in poly_strategy(3, 6)) {
        prop_assume!(p.degree().unwrap_or(0) >= 2 && q.degree().unwrap_or(0) >= 2);
        let lhs = discriminant(&(&p * &q)).unwrap();
        let r = resultant(&p, &q);
        let rhs = discriminant(&p).unwrap() * discriminant(&q).unwrap() * &r * &r;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mod_reduce_is_compatible_with_multiplication(a in poly_strategy(6, 9), b in poly_strategy(6, 9)) {
        let xi = IntPoly::from_i64s(&[-1, -2, 1, 1]);
        let lhs = (&a * &b).mod_reduce(&xi).unwrap();
        let rhs = (&a.mod_reduce(&xi).unwrap() * &b.mod_reduce(&xi).unwrap()).mod_reduce(&xi).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(lhs.degree().is_none_or(|d| d < 3));
        // the remainder differs from the input by a multiple of xi
        let diff = &(&a * &b) - &lhs;
        prop_assert!(diff.is_zero() || diff.div_exact(&xi).is_some());
    }

    #[test]
    fn mult_matrix_is_a_homomorphism(u in nonzero_coeffs(3, 6), v in nonzero_coeffs(3, 6),
                                     x in nonzero_coeffs(4, 4), y in nonzero_coeffs(4, 4)) {
        for (k, a, b) in [(cubic(), u, v), (quartic(), x, y)] {
            let (a, b) = (k.element_i64(&a).unwrap(), k.element_i64(&b).unwrap());
            let prod = a.mul(&b).unwrap().mult_matrix();
            prop_assert_eq!(prod, a.mult_matrix().mat_mul(&b.mult_matrix()).unwrap());
            let sum = a.add(&b).unwrap().mult_matrix();
            prop_assert_eq!(sum, a.mult_matrix().add(&b.mult_matrix()).unwrap());
        }
    }

    #[test]
    fn conjugate_signs_are_multiplicative(u in nonzero_coeffs(3, 6), v in nonzero_coeffs(3, 6)) {
        let k = cubic();
        let (a, b) = (k.element_i64(&u).unwrap(), k.element_i64(&v).unwrap());
        let sa = conjugate_signs(&a).unwrap();
        let sb = conjugate_signs(&b).unwrap();
        prop_assert_eq!(conjugate_signs(&a.mul(&b).unwrap()).unwrap(), sa.product(&sb));
    }

    #[test]
    fn charpoly_is_a_conjugacy_invariant(m in prop::collection::vec(-5i64..=5, 16),
                                         ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 1..6)) {
        let rows: Vec<Vec<BigInt>> = m.chunks(4).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let a = SqIntMatrix::from_rows(rows).unwrap();
        // product of elementary matrices I + c E_ij, i != j
        let mut p = SqIntMatrix::identity(4);
        for (i, j, c) in ops {
            if i == j { continue; }
            let mut e = SqIntMatrix::identity(4);
            e.set(i, j, BigInt::from(c));
            p = p.mat_mul(&e).unwrap();
        }
        let pinv = p.inverse_unimodular().unwrap();
        let conj = p.mat_mul(&a).unwrap().mat_mul(&pinv).unwrap();
        prop_assert_eq!(conj.charpoly(), a.charpoly());
    }

    #[test]
    fn permutation_invariance(d in 3usize..=7, seed in any::<u64>(), perm_seed in any::<u64>()) {
        let pats = even_patterns(d);
        let s1 = &pats[(seed % pats.len() as u64) as usize];
        let s2 = &pats[((seed >> 20) % pats.len() as u64) as usize];
        let mut perm: Vec<usize> = (0..d).collect();
        let mut state = perm_seed;
        for i in (1..d).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let (p1, p2) = (s1.permuted(&perm), s2.permuted(&perm));
        let before = pairing(s1, s2).unwrap();
        prop_assert_eq!(pairing(&p1, &p2).unwrap(), before);
        let lifted = lift_loop(&build_loop_spec(&p1, &p2).unwrap(), 16, None).unwrap();
        prop_assert_eq!(lifted.class, before);
    }

    #[test]
    fn stable_under_positive_extension(d in 3usize..=6, k in 1usize..=4, s1 in even_pattern(6), s2 in even_pattern(6)) {
        let cut = |s: &SignPattern| {
            let mut v = s.signs()[..d].to_vec();
            if v.iter().filter(|x| **x < 0).count() % 2 == 1 { v[0] = -v[0]; }
            SignPattern::new(v).unwrap()
        };
        let (a, b) = (cut(&s1), cut(&s2));
        let pos = SignPattern::all_positive(k);
        prop_assert_eq!(pairing(&a.concat(&pos), &b.concat(&pos)).unwrap(), pairing(&a, &b).unwrap());
        prop_assert_eq!(pairing(&pos.concat(&a), &pos.concat(&b)).unwrap(), pairing(&a, &b).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interval_eval_encloses_every_point(p in poly_strategy(6, 20), lo in -4000i64..4000, w in 0i64..2000,
                                          t in 0i64..=64, e in -10i64..0) {
        let lo = Dyadic::new(BigInt::from(lo), e);
        let hi = &lo + &Dyadic::new(BigInt::from(w), e);
        let iv = DyadicInterval::new(lo.clone(), hi.clone());
        let enc = interval_eval(&p, &iv);
        // sample x = lo + t/64 * (hi - lo), exactly dyadic
        let x = &lo + &(&(&hi - &lo) * &Dyadic::new(BigInt::from(t), -6));
        prop_assert!(iv.contains(&x));
        prop_assert!(enc.contains(&p.eval_dyadic(&x)));
        prop_assert!(enc.contains(&p.eval_dyadic(&lo)) && enc.contains(&p.eval_dyadic(&hi)));
    }
}

#[test]
fn pairing_is_symmetric_and_bilinear_exhaustively() {
    for d in 3..=5 {
        let pats = even_patterns(d);
        for a in &pats {
            for b in &pats {
                let ab = pairing(a, b).unwrap();
                assert_eq!(ab, pairing(b, a).unwrap());
                for c in &pats {
                    let lhs = pairing(&a.product(c), b).unwrap();
                    assert_eq!(lhs, ab + pairing(c, b).unwrap(), "d={d} {a} {b} {c}");
                }
            }
            assert_eq!(
                pairing(a, &SignPattern::all_positive(d)).unwrap(),
                ObstructionClass::Trivial
            );
        }
    }
}
