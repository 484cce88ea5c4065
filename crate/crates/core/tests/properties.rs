//! Property tests for the exact layers below the staggered module code.

use proptest::prelude::*;
use virstag_core::algebra::{decompose_against_l1l2, AlgebraElement};
use virstag_core::intersection::{intersection_basis, intersection_dim};
use num_traits::Zero;
use virstag_core::scalars::{central_charge, kac_weight, rat, Poly, RatFunc};
use virstag_core::staggered::{
    beta_invariants, data_from_beta, gauge_apply, BetaValue, CaseTag, StaggeredProblem,
};
use virstag_core::verma::{act_element, find_singular, kac_determinant_ratio, GradedVector, ModeAction, VermaModule};
use virstag_core::Scalar;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn small_rat() -> impl Strategy<Value = Scalar> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn nonzero_t() -> impl Strategy<Value = Scalar> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=5).prop_map(|(n, d)| Scalar::ratio(n, d))
}

/// Weights with denominator 7, which no Kac weight at the sampled t has.
fn off_kac_weight() -> impl Strategy<Value = Scalar> {
    (-40i64..=40).prop_filter("denominator 7", |n| n % 7 != 0).prop_map(|n| Scalar::ratio(n, 7))
}

fn word() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-3i32..=3, 0..=3)
}

/// Small linear combination of words with rational coefficients.
fn element(c: Scalar) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((word(), small_rat()), 1..=3).prop_map(move |terms| {
        terms.iter().fold(AlgebraElement::zero(&c), |acc, (w, k)| {
            acc.add(&AlgebraElement::word(&c, w).scale(k)).unwrap()
        })
    })
}

fn elements3() -> impl Strategy<Value = (AlgebraElement, AlgebraElement, AlgebraElement)> {
    nonzero_t().prop_flat_map(|t| {
        let c = central_charge(&t).unwrap();
        (element(c.clone()), element(c.clone()), element(c))
    })
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn multiplication_is_associative((a, b, c) in elements3()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn multiplication_distributes((a, b, c) in elements3()) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn adjoint_reverses_products((a, b, _) in elements3()) {
        let l = a.mul(&b).unwrap().adjoint();
        let r = b.adjoint().mul(&a.adjoint()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn virasoro_commutator(t in nonzero_t(), m in -5i32..=5, n in -5i32..=5) {
        let c = central_charge(&t).unwrap();
        let lm = AlgebraElement::mode(&c, m);
        let ln = AlgebraElement::mode(&c, n);
        let bracket = lm.mul(&ln).unwrap().sub(&ln.mul(&lm).unwrap()).unwrap();
        let mut want = AlgebraElement::mode(&c, m + n).scale(&Scalar::int((m - n) as i64));
        if m + n == 0 {
            let k = Scalar::int((m * m * m - m) as i64) * &c * Scalar::ratio(1, 12);
            want = want.add(&AlgebraElement::one(&c).scale(&k)).unwrap();
        }
        prop_assert_eq!(bracket, want);
    }

    #[test]
    fn action_is_a_representation(
        t in nonzero_t(),
        h in small_rat(),
        a in prop::collection::vec(-3i32..=2, 1..=3),
        b in prop::collection::vec(-3i32..=2, 1..=3),
    ) {
        let v = VermaModule::new(&h, &t).unwrap();
        let c = v.c().clone();
        let x = GradedVector { grade: 0, coords: vec![Scalar::one()] };
        let start = act_element(v.as_ref(), &AlgebraElement::word(&c, &[-2, -1]), &x).unwrap();
        let ea = AlgebraElement::word(&c, &a);
        let eb = AlgebraElement::word(&c, &b);
        let two_steps = act_element(v.as_ref(), &ea, &act_element(v.as_ref(), &eb, &start).unwrap()).unwrap();
        let product = act_element(v.as_ref(), &ea.mul(&eb).unwrap(), &start).unwrap();
        prop_assert_eq!(two_steps, product);
    }

    #[test]
    fn decomposition_reassembles(t in nonzero_t(), w in prop::collection::vec(1i32..=5, 1..=3), k in small_rat()) {
        let c = central_charge(&t).unwrap();
        let u = AlgebraElement::word(&c, &w).scale(&k);
        let (u1, u2) = decompose_against_l1l2(&u).unwrap();
        let back = u1.mul(&AlgebraElement::mode(&c, 1)).unwrap()
            .add(&u2.mul(&AlgebraElement::mode(&c, 2)).unwrap()).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn rational_function_field_laws(
        a in prop::collection::vec(-5i64..=5, 1..=3),
        b in prop::collection::vec(-5i64..=5, 1..=3),
        x in -7i64..=7,
    ) {
        let poly = |v: &[i64]| Poly::from_coeffs(v.iter().map(|&n| rat(n, 1)).collect());
        let (pa, pb) = (poly(&a), poly(&b));
        prop_assume!(!pb.is_zero());
        let as_scalar = |p: &Poly| Scalar::from(RatFunc::from_poly(p.clone()));
        let q = Scalar::from(RatFunc::new(pa.clone(), pb.clone()));
        prop_assert_eq!(&q * &as_scalar(&pb), as_scalar(&pa));
        let x = rat(x, 1);
        if !pb.eval(&x).is_zero() {
            let at = q.specialise(&x).unwrap();
            prop_assert_eq!(at, Scalar::from(pa.eval(&x) / pb.eval(&x)));
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn kac_ratio_is_independent_of_h(
        t in prop::sample::select(vec![Scalar::int(2), Scalar::ratio(3, 2), Scalar::int(-2), Scalar::ratio(-5, 3)]),
        h1 in off_kac_weight(),
        h2 in off_kac_weight(),
        n in 1usize..=5,
    ) {
        let r1 = kac_determinant_ratio(&h1, &t, n).unwrap();
        let r2 = kac_determinant_ratio(&h2, &t, n).unwrap();
        prop_assert!(!r1.is_zero());
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn gram_of_l_minus_one_powers(t in nonzero_t(), h in small_rat(), n in 1usize..=5) {
        // <L_{-1}^n x, L_{-1}^n x> = prod_{k=1}^{n} k (2h + k - 1).
        let v = VermaModule::new(&h, &t).unwrap();
        let g = v.gram_matrix(n);
        // L_{-1}^n comes first in the partition order.
        let want = (1..=n as i64).fold(Scalar::one(), |acc, k| {
            acc * Scalar::int(k) * (Scalar::int(2) * &h + Scalar::int(k - 1))
        });
        prop_assert_eq!(&g[0][0], &want);
    }

    #[test]
    fn singular_vectors_are_singular(
        t in prop::sample::select(vec![Scalar::int(2), Scalar::ratio(3, 2), Scalar::ratio(-4, 3), Scalar::ratio(5, 2)]),
        rs in prop::sample::select(vec![(1i64, 1i64), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (1, 4), (4, 1), (2, 3), (3, 2), (1, 6), (6, 1)]),
    ) {
        let (r, s) = rs;
        let h = kac_weight(r, s, &t).unwrap();
        let grade = (r * s) as usize;
        let sv = find_singular(&h, &t, grade).unwrap().expect("singular vector at rs");
        let v = VermaModule::new(&h, &t).unwrap();
        let w = GradedVector { grade: grade as i64, coords: sv.coords.clone() };
        prop_assert!(v.apply_mode(1, &w).is_zero());
        prop_assert!(v.apply_mode(2, &w).is_zero());
        // Normalised so the L_{-1}^n coefficient is one.
        prop_assert!(sv.coords[0].is_one());
    }
}

#[test]
fn intersection_relations_vanish() {
    let c = central_charge(&Scalar::ratio(3, 2)).unwrap();
    let l1 = AlgebraElement::mode(&c, 1);
    let l2 = AlgebraElement::mode(&c, 2);
    for m in 1..=9 {
        let basis = intersection_basis(m, &c);
        assert_eq!(basis.len(), intersection_dim(m), "m = {m}");
        for (u1, u2) in &basis {
            let s = u1.mul(&l1).unwrap().add(&u2.mul(&l2).unwrap()).unwrap();
            assert!(s.is_zero(), "m = {m}");
            assert!(!(u1.is_zero() && u2.is_zero()));
        }
    }
}

fn problem(t: Scalar, hr: i64) -> StaggeredProblem {
    StaggeredProblem::from_weights(&t, &Scalar::zero(), &[], &Scalar::int(hr), &[]).unwrap()
}

fn gauge_strategy(dim: usize, grade: i64) -> impl Strategy<Value = GradedVector> {
    prop::collection::vec(small_rat(), dim).prop_map(move |coords| GradedVector { grade, coords })
}

macro_rules! gauge_case {
    ($name:ident, $t:expr, $hr:expr, $tag:expr) => {
        #[test]
        fn $name() {
            let p = problem($t, $hr);
            assert_eq!(p.case(), $tag);
            let b = p.b();
            let dim = p.left().dim(p.ell() as i64);
            let grade = p.ell() as i64;
            let strategy = (prop::collection::vec(small_rat(), b), gauge_strategy(dim, grade));
            let mut runner = proptest::test_runner::TestRunner::new(config(8));
            runner
                .run(&strategy, |(vals, u)| {
                    let target = BetaValue::from_values(&vals).unwrap();
                    let d = data_from_beta(&p, &target).unwrap();
                    prop_assert_eq!(beta_invariants(&p, &d).unwrap(), target.clone());
                    let moved = gauge_apply(&p, &u, &d).unwrap();
                    prop_assert_eq!(beta_invariants(&p, &moved).unwrap(), target);
                    Ok(())
                })
                .unwrap();
        }
    };
}

gauge_case!(gauge_and_round_trip_case_one, Scalar::int(2), 3, CaseTag::One);
gauge_case!(gauge_and_round_trip_case_one_prime, Scalar::ratio(3, 2), 2, CaseTag::OnePrime);
gauge_case!(gauge_and_round_trip_case_two, Scalar::ratio(3, 2), 5, CaseTag::Two);
gauge_case!(gauge_and_round_trip_case_two_prime, Scalar::ratio(3, 2), 7, CaseTag::TwoPrime);
