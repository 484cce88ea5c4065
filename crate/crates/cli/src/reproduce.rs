//! Worked examples run end to end and compared with their published values.

use std::fmt::Write as _;

use serde_json::{json, Value};
use virstag_core::algebra::AlgebraElement;
use virstag_core::scalars::kac_weight;
use virstag_core::staggered::{
    beta_invariants, gauge_apply, generic_row, oracle_answer, oracle_singular, rohsiepe_exists,
    same_region, BetaValue, DataSpace, StaggeredAnswer, StaggeredProblem, GENERIC_ROWS,
};
use virstag_core::verma::{act_element, GradedVector};
use virstag_core::{Rational, Result, Scalar, VirError};

use crate::commands::{answer_for, Report};
use crate::modspec::parse_module;

pub const IDS: [&str; 10] = [
    "ex-4.4", "ex-5.15", "ex-5.16", "ex-6.3a", "ex-6.3b", "ex-6.6", "ex-6.9b", "ex-6.10", "ex-6.11",
    "ex-6.12",
];

/// One verified statement about a worked example.
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

fn check(label: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { label: label.to_string(), pass, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn parse_t(t: &str) -> Scalar {
    Scalar::parse(t).expect("literal parameter")
}

/// `sum k_i L_{w_i}` over central charge `c`.
fn element(c: &Scalar, terms: &[(Scalar, &[i32])]) -> Result<AlgebraElement> {
    let mut e = AlgebraElement::zero(c);
    for (k, w) in terms {
        e = e.add(&AlgebraElement::word(c, w).scale(k))?;
    }
    Ok(e)
}

fn unique_point(a: &StaggeredAnswer) -> Option<Vec<Scalar>> {
    match a {
        StaggeredAnswer::Affine { offset, directions, .. } if directions.is_empty() => {
            Some(offset.clone())
        }
        _ => None,
    }
}

/// Short description of a region for check details.
fn brief(a: &StaggeredAnswer) -> String {
    match (a, a.dimension()) {
        (StaggeredAnswer::Affine { offset, .. }, Some(0)) if offset.is_empty() => "exists".into(),
        (StaggeredAnswer::Affine { offset, .. }, Some(0)) => format!("point ({})", show(offset)),
        (_, Some(k)) => format!("{k}-dimensional"),
        _ => "empty".into(),
    }
}

fn show(v: &[Scalar]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Checks that the answer is the single point `expected`, and that the
/// singular vector search finds the same region.
fn unique_checks(p: &StaggeredProblem, a: &StaggeredAnswer, expected: &[Scalar], what: &str) -> Result<Vec<Check>> {
    let got = unique_point(a);
    let mut out = vec![check(
        &format!("{what}: unique beta = ({})", show(expected)),
        got.as_deref() == Some(expected),
        match &got {
            Some(g) => format!("got ({})", show(g)),
            None => format!("got {}", brief(a)),
        },
    )];
    let o = oracle_answer(p)?;
    out.push(check(&format!("{what}: singular vector search agrees"), same_region(a, &o), brief(&o)));
    Ok(out)
}

/// The single constraint of `a` equals `coeffs . beta + offset` exactly.
fn constraint_check(a: &StaggeredAnswer, coeffs: &[Scalar], offset: &Scalar, label: &str) -> Check {
    let found = match a {
        StaggeredAnswer::Affine { constraints, .. } => constraints.clone(),
        _ => Vec::new(),
    };
    let pass = found.len() == 1 && found[0].coeffs == coeffs && &found[0].offset == offset;
    let detail = found.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ");
    check(label, pass, detail)
}

fn ex_4_4() -> Result<Vec<Check>> {
    let t = parse_t("3/2");
    let (p, a) = answer_for(&t, "1/5", "7/15")?;
    unique_checks(&p, &a, &[q(-10780000, 243)], "left V1/V5, right V7/V15")
}

fn ex_5_15() -> Result<Vec<Check>> {
    let t = parse_t("3/2");
    let p = StaggeredProblem::new(parse_module("0", &t)?, parse_module("5", &t)?)?;
    let mut out = vec![check("case 2 with two invariants", p.b() == 2 && p.case().to_string() == "2", format!("case {}, b = {}", p.case(), p.b()))];
    let space = DataSpace::new(&p)?;
    out.push(check("admissible data has dimension 8", space.dim() == 8, format!("dim {}", space.dim())));
    let c = p.c().clone();
    let beta_minus = element(
        &c,
        &[
            (q(1, 1), &[1, 1, 1, 1]),
            (q(-20, 3), &[1, 1, 2]),
            (q(4, 1), &[2, 2]),
            (q(4, 1), &[1, 3]),
            (q(-4, 1), &[4]),
        ],
    )?;
    let beta_plus = element(&c, &[(q(1, 1), &[1, 1, 1]), (q(-6, 1), &[1, 2]), (q(6, 1), &[3])])?;
    let l1 = element(&c, &[(q(1, 1), &[-1])])?;
    let x2 = element(&c, &[(q(1, 1), &[-1, -1]), (q(-2, 3), &[-2])])?;
    let l11 = element(&c, &[(q(1, 1), &[-1, -1])])?;
    let left = p.left();
    let (l1v, x2v) = (left.from_element(&l1)?, left.from_element(&x2)?);
    let mut ok = true;
    for (bm, bp) in [(1, 0), (0, 1), (3, -2), (-5, 7)] {
        let target = BetaValue::Pair(Scalar::int(bm), Scalar::int(bp));
        let d = space.data_for(&target)?;
        ok &= beta_invariants(&p, &d)? == target;
        let m = p.module(&d)?;
        let y = m.y();
        let vm = act_element(&m, &beta_minus, &y)?;
        ok &= vm.is_left() && vm.left_part() == l1v.scale(&Scalar::int(bm));
        let vp = act_element(&m, &beta_plus, &y)?;
        let rest = vp.left_part().sub(&x2v.scale(&Scalar::int(bp)));
        let l11v = left.from_element(&l11)?;
        let k = rest.coords.iter().zip(&l11v.coords).find(|(_, b)| !b.is_zero()).map(|(a, b)| a / b);
        ok &= vp.is_left() && k.is_some_and(|k| rest == l11v.scale(&k));
    }
    out.push(check("both defining expressions evaluate to the computed invariants", ok, "4 sample points"));
    Ok(out)
}

fn ex_5_16() -> Result<Vec<Check>> {
    let t = parse_t("2");
    let p = StaggeredProblem::new(parse_module("0", &t)?, parse_module("3", &t)?)?;
    let mut out = vec![check("one invariant", p.b() == 1, format!("b = {}", p.b()))];
    let c = p.c().clone();
    let proj = element(&c, &[(q(1, 1), &[]), (q(1, 4), &[-3, 3])])?;
    let outer = element(&c, &[(q(1, 1), &[1, 1]), (q(-2, 1), &[2])])?;
    let l1x = p.left().from_element(&element(&c, &[(q(1, 1), &[-1])])?)?;
    let space = DataSpace::new(&p)?;
    let n = p.left().dim(p.ell() as i64);
    let mut ok = true;
    for (i, b) in [q(1, 2), q(-3, 1), q(0, 1)].into_iter().enumerate() {
        let d0 = space.data_for(&BetaValue::Single(b.clone()))?;
        let coords = (0..n).map(|j| Scalar::int((i * 3 + j * 5) as i64 % 7 - 3)).collect();
        let u = GradedVector { grade: p.ell() as i64, coords };
        let d = gauge_apply(&p, &u, &d0)?;
        let m = p.module(&d)?;
        let v = act_element(&m, &outer, &act_element(&m, &proj, &m.y())?)?;
        ok &= v.is_left() && v.left_part() == l1x.scale(&b);
    }
    out.push(check("projected formula gives beta for gauge-transformed data", ok, "3 sample points"));
    Ok(out)
}

fn varpi_matches(p: &StaggeredProblem, target: BetaValue, expected: &AlgebraElement) -> Result<(bool, String)> {
    match oracle_singular(p, &target)? {
        Some(ws) if ws.len() == 1 => {
            let want = p.left().from_element(expected)?;
            Ok((ws[0] == want, p.left().vector_string(&ws[0])))
        }
        Some(_) => Ok((false, "wrong number of witnesses".into())),
        None => Ok((false, "no singular vector".into())),
    }
}

fn ex_6_3a() -> Result<Vec<Check>> {
    let t = parse_t("2");
    let (p, a) = answer_for(&t, "0/3", "1/6")?;
    let mut out = vec![check(
        "left V0/V3, right V1/V6: exists for every beta",
        a.dimension() == Some(1),
        brief(&a),
    )];
    out.push(check("beta = -1 = 1 - t allowed", a.contains(&[&q(1, 1) - &t]), ""));
    let o = oracle_answer(&p)?;
    out.push(check("singular vector search agrees", same_region(&a, &o), brief(&o)));
    let c = p.c().clone();
    for b in [q(0, 1), q(-1, 1), q(2, 3)] {
        let expected = element(
            &c,
            &[
                (q(-16, 3) * &(&b + &q(1, 1)), &[-2, -2, -1, -1]),
                (q(4, 3) * &(q(14, 1) * &b + q(5, 1)), &[-3, -2, -1]),
                (q(-6, 1) * &b, &[-3, -3]),
                (q(-6, 1) * &(&b - &q(2, 1)), &[-4, -1, -1]),
                (q(8, 1) * &b, &[-4, -2]),
                (q(-2, 3) * &(q(5, 1) * &b + q(2, 1)), &[-5, -1]),
                (q(4, 1) * &b, &[-6]),
            ],
        )?;
        let (pass, got) = varpi_matches(&p, BetaValue::Single(b.clone()), &expected)?;
        out.push(check(&format!("witness at beta = {b} matches termwise"), pass, got));
    }
    Ok(out)
}

fn ex_6_3b() -> Result<Vec<Check>> {
    let t = parse_t("3/2");
    let (p, a) = answer_for(&t, "0/2", "1/5")?;
    let mut out = unique_checks(&p, &a, &[q(-1, 2)], "left V0/V2, right V1/V5")?;
    out.push(constraint_check(&a, &[q(-2240, 3)], &q(-1120, 3), "constraint -(1120/3)(2 beta + 1)"));
    let c = p.c().clone();
    let expected = element(&c, &[(q(-32, 9), &[-3, -2]), (q(16, 3), &[-4, -1]), (q(2, 1), &[-5])])?;
    let (pass, got) = varpi_matches(&p, BetaValue::Single(q(-1, 2)), &expected)?;
    out.push(check("witness matches", pass, got));
    out.push(check("beta = 1 - t", a.contains(&[&q(1, 1) - &t]), ""));
    Ok(out)
}

fn ex_6_6() -> Result<Vec<Check>> {
    let t = parse_t("2");
    let (p, a) = answer_for(&t, "0/3", "1/3")?;
    let mut out = unique_checks(&p, &a, &[q(4, 5)], "left V0/V3, right V1/V3")?;
    out.push(constraint_check(&a, &[q(-15, 1)], &q(12, 1), "constraint 12 - 15 beta"));
    Ok(out)
}

fn ex_6_9b() -> Result<Vec<Check>> {
    let t = parse_t("3/2");
    let (p, a) = answer_for(&t, "0/2", "1/7")?;
    let mut out = unique_checks(&p, &a, &[q(1, 3)], "left V0/V2, right V1/V7")?;
    out.push(constraint_check(
        &a,
        &[q(-17248000, 81)],
        &q(17248000, 243),
        "constraint -(17248000/243)(3 beta - 1)",
    ));
    let (_, both) = answer_for(&t, "0/2", "1/5,7")?;
    out.push(check("right V1/(V5+V7): empty", !both.exists(), brief(&both)));
    Ok(out)
}

fn ex_6_10() -> Result<Vec<Check>> {
    let t = parse_t("3/2");
    let mut out = Vec::new();
    let (p, a) = answer_for(&t, "0/12,15", "5/12")?;
    out.extend(unique_checks(&p, &a, &[q(-11200, 51), q(1680, 17)], "right V5/V12")?);
    let (p, a) = answer_for(&t, "0/12,15", "5/15")?;
    out.extend(unique_checks(&p, &a, &[q(-5600, 57), q(3360, 19)], "right V5/V15")?);
    let (p, a) = answer_for(&t, "0/12,15", "5/12,15")?;
    let o = oracle_answer(&p)?;
    out.push(check("right V5/(V12 + V15): empty", !a.exists(), brief(&a)));
    out.push(check("right V5/(V12 + V15): singular vector search agrees", same_region(&a, &o), brief(&o)));
    let (p, a) = answer_for(&t, "0/7", "5/12")?;
    out.push(check("left V0/V7, right V5/V12: one-parameter family", a.dimension() == Some(1), brief(&a)));
    let o = oracle_answer(&p)?;
    out.push(check("left V0/V7: singular vector search agrees", same_region(&a, &o), brief(&o)));
    // The printed offset; see the notes in the README.
    out.push(constraint_check_scaled(&a, &[q(189, 1), q(80, 1)], &q(3360, 1), "189 beta- + 80 beta+ = -3360"));
    Ok(out)
}

/// As [`constraint_check`] but up to an overall nonzero factor.
fn constraint_check_scaled(a: &StaggeredAnswer, coeffs: &[Scalar], offset: &Scalar, label: &str) -> Check {
    let found = match a {
        StaggeredAnswer::Affine { constraints, .. } => constraints.clone(),
        _ => Vec::new(),
    };
    let pass = found.len() == 1 && {
        let c = &found[0];
        let k = &c.coeffs[0] / &coeffs[0];
        !k.is_zero()
            && c.coeffs.iter().zip(coeffs).all(|(x, y)| x == &(&k * y))
            && c.offset == &k * offset
    };
    let detail = found
        .first()
        .map(|c| {
            let k = &c.coeffs[0] / &coeffs[0];
            let scaled: Vec<String> = c.coeffs.iter().map(|x| (x / &k).to_string()).collect();
            format!("got ({}) . beta + ({}) = 0", scaled.join(", "), &c.offset / &k)
        })
        .unwrap_or_default();
    check(label, pass, detail)
}

fn ex_6_11() -> Result<Vec<Check>> {
    let t = parse_t("1");
    let (p, a) = answer_for(&t, "(1/4)/(9/4)", "(1/4)/(9/4)")?;
    let mut out = vec![check("left = right = V_1/4 / V_9/4: exists", a.exists(), brief(&a))];
    let o = oracle_answer(&p)?;
    out.push(check("singular vector search agrees", same_region(&a, &o), brief(&o)));
    let c = p.c().clone();
    let xbar = virstag_core::staggered::StaggeredProblem::singular_element(&p, 0, 2)?;
    let want_xbar = element(&c, &[(q(1, 1), &[-1, -1]), (q(-1, 1), &[-2])])?;
    let expected = element(&c, &[(q(4, 3), &[-2])])?;
    let (pass, got) = varpi_matches(&p, BetaValue::None, &expected)?;
    out.push(check("witness (L_-1^2 - L_-2) y - (4/3) L_-2 x", pass && xbar == want_xbar, got));
    Ok(out)
}

/// The published rows as elements of Q(t).
pub fn table_row_expected(r: i64, s: i64) -> (Scalar, Vec<Rational>) {
    let t = Scalar::t();
    let one = Scalar::one();
    let f = |k: i64| &(&Scalar::int(k * k) * &(&t * &t)) - &one;
    let g = |k: i64| &(&t * &t) - &Scalar::int(k * k);
    let prod = |ks: &[i64]| ks.iter().fold(Scalar::one(), |acc, &k| &acc * &f(k));
    let r_ = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let pm = |xs: &[(i64, i64)]| {
        let mut v: Vec<Rational> = xs.iter().flat_map(|&(n, d)| [r_(n, d), r_(-n, d)]).collect();
        v.sort();
        v
    };
    match (r, s) {
        (1, 1) => (Scalar::int(2), vec![]),
        (2, 1) => (&Scalar::int(4) * &prod(&[1]), pm(&[(1, 1)])),
        (3, 1) => (&Scalar::int(24) * &prod(&[1, 2]), pm(&[(1, 1)])),
        (4, 1) => (&Scalar::int(288) * &prod(&[1, 2, 3]), pm(&[(1, 1), (1, 2)])),
        (5, 1) => (&Scalar::int(5760) * &prod(&[1, 2, 3, 4]), pm(&[(1, 1)])),
        (6, 1) => (&Scalar::int(172800) * &prod(&[1, 2, 3, 4, 5]), pm(&[(1, 1), (1, 2), (1, 3)])),
        (2, 2) => {
            let v = &(&(&Scalar::int(-8) * &t.pow(4).recip()) * &f(1).pow(2)) * &(&g(2) * &f(2));
            (v, pm(&[(1, 2), (2, 1)]))
        }
        (3, 2) => {
            let v = &(&(&Scalar::int(-192) * &t.pow(6).recip()) * &f(1).pow(3))
                * &(&(&g(2) * &f(2).pow(2)) * &f(3));
            (v, pm(&[(1, 3), (2, 1)]))
        }
        _ => (Scalar::zero(), vec![]),
    }
}

fn ex_6_12() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (r, s) in GENERIC_ROWS {
        let row = generic_row(r, s)?;
        let (want, set) = table_row_expected(r, s);
        out.push(check(&format!("({r},{s}) beta_bar'"), row.beta_bar == want, row.beta_bar.factored()));
        let mut agree = row.existence == set;
        for t0 in &row.existence {
            let t = Scalar::from(t0.clone());
            agree &= rohsiepe_exists(&kac_weight(r, s, &t)?, &t)?;
        }
        let shown: Vec<String> = row.existence.iter().map(|x| x.to_string()).collect();
        out.push(check(&format!("({r},{s}) existence set"), agree, format!("{{{}}}", shown.join(", "))));
    }
    Ok(out)
}

/// Runs the checks for one example id.
pub fn checks(id: &str) -> Result<Vec<Check>> {
    match id {
        "ex-4.4" => ex_4_4(),
        "ex-5.15" => ex_5_15(),
        "ex-5.16" => ex_5_16(),
        "ex-6.3a" => ex_6_3a(),
        "ex-6.3b" => ex_6_3b(),
        "ex-6.6" => ex_6_6(),
        "ex-6.9b" => ex_6_9b(),
        "ex-6.10" => ex_6_10(),
        "ex-6.11" => ex_6_11(),
        "ex-6.12" => ex_6_12(),
        _ => Err(VirError::Parse(format!("unknown example `{id}`; known: all, {}", IDS.join(", ")))),
    }
}

pub fn run(id: &str) -> Result<Report> {
    let ids: Vec<&str> = if id == "all" { IDS.to_vec() } else { vec![id] };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut failed = 0;
    for id in ids {
        let checks = checks(id)?;
        let mut list = Vec::new();
        for c in checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            failed += usize::from(!c.pass);
            if c.detail.is_empty() {
                writeln!(text, "{status} {id}: {}", c.label).unwrap();
            } else {
                writeln!(text, "{status} {id}: {} [{}]", c.label, c.detail).unwrap();
            }
            list.push(json!({"check": c.label, "pass": c.pass, "detail": c.detail}));
        }
        results.push(json!({"id": id, "checks": list}));
    }
    writeln!(text, "{failed} check(s) failed").unwrap();
    let json = json!({"examples": Value::Array(results), "failed": failed});
    Ok(Report { json, text, code: u8::from(failed > 0) })
}
