//! Behaviour of the staggered-module layer on small, fully understood
//! configurations.

use virstag_core::algebra::AlgebraElement;
use virstag_core::intersection::intersection_basis;
use virstag_core::linalg::Subspace;
use virstag_core::staggered::existence::beta_bar_at_t;
use virstag_core::staggered::invariants::{chi_decomposition, psi_value, target_submodule};
use virstag_core::staggered::*;
use virstag_core::structure::left_right_compatible;
use virstag_core::verma::{act_element, GradedVector, HwModule, ModeAction};
use virstag_core::{Scalar, VirError};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn problem(t: Scalar, hl: i64, lg: &[usize], hr: i64, rg: &[usize]) -> StaggeredProblem {
    StaggeredProblem::from_weights(&t, &Scalar::int(hl), lg, &Scalar::int(hr), rg).unwrap()
}

fn gauge(p: &StaggeredProblem, seed: i64) -> GradedVector {
    let n = p.left().dim(p.ell() as i64);
    let coords = (0..n as i64).map(|j| q((seed * 7 + j * 13) % 11 - 5, 1 + (seed + j) % 4)).collect();
    GradedVector { grade: p.ell() as i64, coords }
}

fn span_of(ds: &[Data]) -> Subspace {
    let n = ds.first().map(|d| d.coords().len()).unwrap_or(0);
    let vs: Vec<_> = ds.iter().map(Data::coords).collect();
    Subspace::spanned_by(n, vs.iter())
}

#[test]
fn case_tags() {
    let t32 = q(3, 2);
    assert_eq!(problem(q(2, 1), 0, &[], 0, &[]).case(), CaseTag::Zero);
    assert_eq!(problem(q(2, 1), 0, &[], 3, &[]).case(), CaseTag::One);
    assert_eq!(problem(t32.clone(), 0, &[], 1, &[]).case(), CaseTag::One);
    assert_eq!(problem(t32.clone(), 0, &[], 2, &[]).case(), CaseTag::OnePrime);
    assert_eq!(problem(t32.clone(), 0, &[], 5, &[]).case(), CaseTag::Two);
    assert_eq!(problem(t32.clone(), 0, &[], 7, &[]).case(), CaseTag::TwoPrime);
    // Quotienting the minus vector removes the prime.
    assert_eq!(problem(t32, 0, &[1], 2, &[]).case(), CaseTag::One);
}

#[test]
fn compatibility_examples() {
    let t2 = q(2, 1);
    let l = HwModule::new(&Scalar::int(0), &t2, &[3]).unwrap();
    let r = HwModule::new(&Scalar::int(1), &t2, &[5]).unwrap();
    let c = left_right_compatible(&l, &r).unwrap();
    assert!(c.compatible);
    assert_eq!((c.ell, c.rho, c.rho_bar, c.b, c.g, c.n), (Some(1), 1, Some(2), 1, Some(0), 1));

    let t32 = q(3, 2);
    let l = HwModule::new(&Scalar::int(0), &t32, &[2]).unwrap();
    let r = HwModule::new(&Scalar::int(1), &t32, &[4]).unwrap();
    let c = left_right_compatible(&l, &r).unwrap();
    assert_eq!((c.ell, c.rho, c.rho_bar, c.g, c.n), (Some(1), 1, Some(1), Some(1), 1));

    // A Verma left module forces a Verma right module.
    let l = HwModule::verma_of(&Scalar::int(0), &t32).unwrap();
    let a = exists(&l, &r).unwrap();
    assert!(!a.exists());
    // Weights differing by a non-integer.
    let r = HwModule::verma_of(&q(1, 3), &t32).unwrap();
    assert!(!exists(&l, &r).unwrap().exists());
}

#[test]
fn varpi_requires_compatibility() {
    // Xbar = L_-1 on the right does not annihilate omega_0 = L_-1 x.
    let t = q(2, 1);
    let l = HwModule::verma_of(&Scalar::int(0), &t).unwrap();
    let r = HwModule::new(&Scalar::int(0), &t, &[1]).unwrap();
    assert!(matches!(StaggeredProblem::new(l.clone(), r.clone()), Err(VirError::Incompatible(_))));
    assert!(!exists(&l, &r).unwrap().exists());
}

#[test]
fn ell_zero_has_no_invariants() {
    let p = problem(q(2, 1), 0, &[], 0, &[]);
    assert_eq!(moduli_dimension(&p), (0, CaseTag::Zero));
    assert!(matches!(beta_invariants(&p, &p.zero_data()), Err(VirError::UndefinedInvariant(_))));
    assert_eq!(data_from_beta(&p, &BetaValue::None).unwrap(), p.zero_data());
    assert!(matches!(
        data_from_beta(&p, &BetaValue::Single(Scalar::one())),
        Err(VirError::NoSolution(_))
    ));
}

#[test]
fn projection_operator_single_step() {
    let p = problem(q(2, 1), 0, &[], 3, &[]);
    let (steps, op) = projection_operator(&p).unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].norms, vec![Scalar::int(-4)]);
    let c = p.c().clone();
    let want = AlgebraElement::one(&c)
        .add(&AlgebraElement::word(&c, &[-3, 3]).scale(&q(1, 4)))
        .unwrap();
    assert_eq!(op.unwrap(), want);
}

#[test]
fn fusion_data_beta() {
    // omega_1 = beta x, omega_2 = 0 with omega_0 = L_-1 x.
    for (t, lg) in [(q(2, 1), vec![3]), (q(2, 1), vec![]), (q(3, 2), vec![2])] {
        let p = problem(t, 0, &lg, 1, &[]);
        for b in [q(-1, 1), q(1, 2), q(7, 3)] {
            let d = Data {
                omega1: GradedVector { grade: 0, coords: vec![b.clone()] },
                omega2: GradedVector { grade: -1, coords: vec![] },
            };
            assert!(is_admissible_right_verma(&p, &d).unwrap());
            assert_eq!(beta_invariants(&p, &d).unwrap(), BetaValue::Single(b.clone()));
            assert_eq!(naive_beta(&p, &d).unwrap(), b);
        }
    }
}

#[test]
fn naive_pairing_vanishes_for_composite_omega0() {
    for (t, hr) in [(q(2, 1), 3), (q(3, 2), 5), (q(3, 2), 7)] {
        let p = problem(t, 0, &[], hr, &[]);
        let sp = DataSpace::new(&p).unwrap();
        for d in &sp.basis {
            assert!(naive_beta(&p, d).unwrap().is_zero());
        }
    }
}

#[test]
fn round_trip_and_gauge_in_every_case() {
    let t32 = q(3, 2);
    let cases = [
        problem(q(2, 1), 0, &[], 3, &[]),
        problem(q(2, 1), 0, &[], 1, &[]),
        problem(t32.clone(), 0, &[], 2, &[]),
        problem(t32.clone(), 0, &[], 5, &[]),
        problem(t32.clone(), 0, &[], 7, &[]),
        problem(t32, 1, &[4], 7, &[]),
    ];
    for p in &cases {
        let sp = DataSpace::new(p).unwrap();
        let b = p.b();
        for k in 0..4i64 {
            let vals: Vec<Scalar> = (0..b as i64).map(|i| q(k * 3 - i * 5 + 1, 1 + i + k)).collect();
            let target = BetaValue::from_values(&vals).unwrap();
            let d = sp.data_for(&target).unwrap();
            assert!(is_admissible_right_verma(p, &d).unwrap());
            assert_eq!(beta_invariants(p, &d).unwrap(), target, "case {}", p.case());
            let moved = gauge_apply(p, &gauge(p, k), &d).unwrap();
            assert_eq!(beta_invariants(p, &moved).unwrap(), target, "case {}", p.case());
        }
    }
}

#[test]
fn braid_coordinates_are_independent() {
    let p = problem(q(3, 2), 0, &[], 5, &[]);
    for target in [(1, 0), (0, 1)] {
        let t = BetaValue::Pair(Scalar::int(target.0), Scalar::int(target.1));
        let d = data_from_beta(&p, &t).unwrap();
        assert_eq!(beta_invariants(&p, &d).unwrap(), t);
    }
}

#[test]
fn psi_kernel_equals_admissible_subspace() {
    let t32 = q(3, 2);
    for p in [
        problem(q(2, 1), 0, &[], 3, &[]),
        problem(t32.clone(), 0, &[], 2, &[]),
        problem(t32.clone(), 0, &[], 5, &[]),
        problem(t32.clone(), 0, &[], 7, &[]),
        problem(t32, 1, &[4], 7, &[]),
    ] {
        let a = admissible_subspace(&p).unwrap();
        let k = psi_kernel(&p).unwrap();
        assert_eq!(a.len(), k.len(), "case {}", p.case());
        let sa = span_of(&a);
        assert!(k.iter().all(|d| sa.contains(&d.coords())));
    }
}

#[test]
fn decomposition_formula_matches_projection() {
    for p in [problem(q(2, 1), 0, &[], 3, &[]), problem(q(3, 2), 0, &[], 5, &[])] {
        for d in DataSpace::new(&p).unwrap().basis {
            assert_eq!(beta_from_decomposition(&p, &d).unwrap(), beta_invariants(&p, &d).unwrap());
        }
    }
}

#[test]
fn project_data_lands_in_target() {
    let p = problem(q(3, 2), 0, &[], 5, &[]);
    let sp = DataSpace::new(&p).unwrap();
    let sub = target_submodule(&p).unwrap();
    for (i, d0) in sp.basis.iter().enumerate() {
        let d = gauge_apply(&p, &gauge(&p, i as i64), d0).unwrap();
        let (u, out) = project_data(&p, &d).unwrap();
        assert_eq!(out, gauge_apply(&p, &u, &d).unwrap());
        assert!(sub.contains(&out.omega1) && sub.contains(&out.omega2));
        // Data already in the target is left alone.
        let (u0, same) = project_data(&p, &out).unwrap();
        assert!(u0.is_zero());
        assert_eq!(same, out);
    }
}

#[test]
fn admissibility_detects_intersection_relation() {
    // Left V_1/V_5 at t = 3/2 with omega_0 at grade 6: the grade 5 relation
    // constrains omega_2 = (a L_-4 + b L_-2^2) x when omega_1 = 0.
    let p = problem(q(3, 2), 1, &[4], 7, &[]);
    assert_eq!(p.ell(), 6);
    let left = p.left();
    let c = p.c().clone();
    let rel = &intersection_basis(5, &c)[0];
    let lift = AlgebraElement::mode(&c, 1);
    let mut admissible = 0;
    for (a, b) in [(1, 0), (0, 1), (1, 1), (2, -3)] {
        let e = AlgebraElement::word(&c, &[-4])
            .scale(&Scalar::int(a))
            .add(&AlgebraElement::word(&c, &[-2, -2]).scale(&Scalar::int(b)))
            .unwrap();
        let omega2 = left.from_element(&e).unwrap();
        let d = Data { omega1: GradedVector::zero(5, left.dim(5)), omega2 };
        let lhs = act_element(left.as_ref(), &lift.mul(&rel.0).unwrap(), &d.omega1).unwrap();
        let rhs = act_element(left.as_ref(), &lift.mul(&rel.1).unwrap(), &d.omega2).unwrap();
        let by_relation = lhs.add(&rhs).is_zero();
        assert_eq!(is_admissible_right_verma(&p, &d).unwrap(), by_relation);
        admissible += usize::from(by_relation);
    }
    assert!(admissible < 4);
}

#[test]
fn psi_is_independent_of_decomposition() {
    // ell = 12 over V_0 at t = 3/2: beta entries at grades 5 and 7, so the
    // relevant relations live at grades -7 and -5.
    let p = problem(q(3, 2), 0, &[], 12, &[]);
    let c = p.c().clone();
    let data = admissible_subspace(&p).unwrap();
    for e in p.beta_entries().unwrap() {
        let (y1, y2) = chi_decomposition(&p, &e).unwrap();
        let m = p.ell() - e.grade;
        let mut perturbations = intersection_basis(m, &c);
        for (u1, u2) in intersection_basis(m + 1, &c) {
            let l = AlgebraElement::mode(&c, -1);
            perturbations.push((l.mul(&u1).unwrap(), l.mul(&u2).unwrap()));
        }
        assert!(!perturbations.is_empty());
        for d in data.iter().take(6) {
            let base = psi_value(&p, d, &e, &(y1.clone(), y2.clone())).unwrap();
            for (k, (u1, u2)) in perturbations.iter().enumerate() {
                let s = Scalar::int(k as i64 + 2);
                let rel = (y1.add(&u1.scale(&s)).unwrap(), y2.add(&u2.scale(&s)).unwrap());
                assert_eq!(psi_value(&p, d, &e, &rel).unwrap(), base);
            }
        }
    }
}

#[test]
fn varpi_singular_and_inconsistent_data() {
    let p = problem(q(3, 2), 0, &[2], 1, &[4]);
    let d = data_from_beta(&p.with_right_verma().unwrap(), &BetaValue::Single(q(-1, 2))).unwrap();
    let w = varpi(&p, &d, 0).unwrap();
    // Xbar y - varpi is singular.
    let m = p.module(&d).unwrap();
    let xbar = p.singular_element(1, 4).unwrap();
    let ybar = act_element(&m, &xbar, &m.y()).unwrap();
    let mut v = ybar.clone();
    v.axpy(&Scalar::int(-1), &m.from_left(&w));
    assert!(m.apply_mode(1, &v).is_zero() && m.apply_mode(2, &v).is_zero());
    // Other values of beta admit no witness.
    let d = data_from_beta(&p.with_right_verma().unwrap(), &BetaValue::Single(q(1, 1))).unwrap();
    assert!(matches!(varpi(&p, &d, 0), Err(VirError::InconsistentSystem(_))));
}

#[test]
fn quotient_right_module_answers() {
    let t2 = q(2, 1);
    let t32 = q(3, 2);
    let m = |h: i64, g: &[usize], t: &Scalar| HwModule::new(&Scalar::int(h), t, g).unwrap();
    // Every beta, and beta = -1 in particular.
    let a = exists(&m(0, &[3], &t2), &m(1, &[5], &t2)).unwrap();
    assert_eq!(a.dimension(), Some(1));
    assert!(a.contains(&[q(-1, 1)]));
    // Two generators with clashing requirements.
    let a = exists(&m(0, &[2], &t32), &m(1, &[4, 6], &t32)).unwrap();
    assert!(!a.exists());
    // Monotonicity: dropping the right quotient keeps the answer.
    let a = exists(&m(0, &[2], &t32), &m(1, &[4], &t32)).unwrap();
    let v = exists(&m(0, &[2], &t32), &m(1, &[], &t32)).unwrap();
    assert!(a.contains(&[q(-1, 2)]) && v.contains(&[q(-1, 2)]));
    assert_eq!(v.dimension(), Some(1));
}

#[test]
fn answer_json_shape() {
    let t32 = q(3, 2);
    let l = HwModule::new(&Scalar::int(0), &t32, &[2]).unwrap();
    let r = HwModule::new(&Scalar::int(1), &t32, &[4]).unwrap();
    let j = exists(&l, &r).unwrap().to_json();
    assert_eq!(j["status"], "affine");
    assert_eq!(j["beta_dim"], 1);
    assert_eq!(j["constraints"][0]["coeffs"][0], "-2240/3");
    assert_eq!(j["constraints"][0]["offset"], "-1120/3");
    assert_eq!(j["solutions"]["point"][0], "-1/2");
    let r = HwModule::new(&Scalar::int(1), &t32, &[4, 6]).unwrap();
    let j = exists(&l, &r).unwrap().to_json();
    assert_eq!(j["status"], "empty");
    assert!(j["reason"].is_string());
}

#[test]
fn rohsiepe_criterion() {
    let at = |r: i64, s: i64, t: Scalar| {
        let h = virstag_core::scalars::kac_weight(r, s, &t).unwrap();
        rohsiepe_exists(&h, &t).unwrap()
    };
    assert!(at(2, 1, q(1, 1)) && at(2, 1, q(-1, 1)));
    assert!(!at(1, 1, q(1, 1)) && !at(1, 1, q(2, 1)));
    assert!(at(4, 1, q(1, 2)) && !at(4, 1, q(1, 3)) && !at(4, 1, q(-1, 3)));
    assert!(at(6, 1, q(1, 3)));
    assert!(matches!(rohsiepe_exists(&Scalar::zero(), &Scalar::t()), Err(VirError::NonRationalT)));
}

#[test]
fn generic_rows_specialise() {
    for (r, s) in [(2, 1), (3, 1), (2, 2)] {
        let row = generic_row(r, s).unwrap();
        for t in [q(2, 1), q(3, 2), q(-5, 3)] {
            let spec = row.beta_bar.specialise(t.as_rational().unwrap()).unwrap();
            assert_eq!(spec, beta_bar_at_t(r, s, &t).unwrap());
        }
    }
}
