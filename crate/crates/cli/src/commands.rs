//! Subcommand implementations. Each returns a [`Report`] holding both the
//! JSON and the text rendering; `main` prints whichever was requested.

use std::fmt::Write as _;
use std::io::Write as _;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use virstag_core::algebra::{partitions, AlgebraElement};
use virstag_core::intersection::{intersection_basis, intersection_dim};
use virstag_core::linalg;
use virstag_core::staggered::{
    exists, generic_row, oracle_answer, oracle_singular, rohsiepe_exists, BetaValue, Data,
    DataSpace, StagVec, StaggeredAnswer, StaggeredModule, StaggeredProblem, GENERIC_ROWS,
};
use virstag_core::staggered::{beta_invariants, gauge_apply, is_admissible_right_verma, naive_beta};
use virstag_core::structure::{classify, left_right_compatible};
use virstag_core::verma::{find_singular, kac_determinant_ratio, GradedVector, HwModule, ModeAction, VermaModule};
use virstag_core::{Result, Scalar, VirError};

use crate::modspec::{module_name, parse_module, parse_scalar, resolve_t};
use crate::{reproduce, Cli, Command, Pair, Param, EXIT_INCOMPATIBLE};

pub struct Report {
    pub json: Value,
    pub text: String,
    pub code: u8,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, code: 0 }
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    let report = dispatch(&cli.command)?;
    let mut out = if cli.json {
        serde_json::to_string_pretty(&report.json).map_err(|e| VirError::Internal(e.to_string()))?
    } else {
        report.text
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    Ok(report.code)
}

fn t_of(p: &Param) -> Result<Scalar> {
    resolve_t(p.t.as_deref(), p.c.as_deref())
}

fn modules(pair: &Pair) -> Result<(Scalar, Arc<HwModule>, Arc<HwModule>)> {
    let t = t_of(&pair.param)?;
    let left = parse_module(&pair.left, &t)?;
    let right = parse_module(&pair.right, &t)?;
    Ok((t, left, right))
}

fn parse_beta(s: &str) -> Result<BetaValue> {
    let vals = s.split(',').map(parse_scalar).collect::<Result<Vec<_>>>()?;
    BetaValue::from_values(&vals)
}

fn scalars_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Classify { param, h, max_grade } => cmd_classify(param, h, *max_grade),
        Command::Singular { param, h, grade } => cmd_singular(param, h, *grade),
        Command::Gram { param, h, grade } => cmd_gram(param, h, *grade),
        Command::KacdetCheck { param, h, max_grade, seed } => {
            cmd_kacdet(param, h.as_deref(), *max_grade, *seed)
        }
        Command::Intersection { m } => Ok(cmd_intersection(*m)),
        Command::Exists { pair } => cmd_exists(pair),
        Command::Beta { pair, beta, data, seed } => {
            cmd_beta(pair, beta.as_deref(), data.as_deref(), *seed)
        }
        Command::Oracle { pair, beta, max_grade } => cmd_oracle(pair, beta.as_deref(), *max_grade),
        Command::Table { r, s } => cmd_table(*r, *s),
        Command::Reproduce { id } => reproduce::run(id),
    }
}

fn cmd_classify(param: &Param, h: &str, max_grade: usize) -> Result<Report> {
    let t = t_of(param)?;
    let h = parse_scalar(h)?;
    let s = classify(&h, &t, max_grade)?;
    let mut text = format!("V_{h} at t = {t}, c = {}: {s}\n", virstag_core::scalars::central_charge(&t)?);
    for e in &s.entries {
        let branch = e.branch.map(|b| b.symbol()).unwrap_or("");
        writeln!(text, "  grade {:>3}  weight {}  rank {}{branch}", e.grade, &h + &Scalar::int(e.grade as i64), e.rank).unwrap();
    }
    Ok(Report::ok(s.to_json(), text))
}

fn cmd_singular(param: &Param, h: &str, grade: usize) -> Result<Report> {
    let t = t_of(param)?;
    let h = parse_scalar(h)?;
    match find_singular(&h, &t, grade)? {
        None => Ok(Report::ok(
            json!({"h": h.to_json(), "grade": grade, "singular": null}),
            format!("V_{h} has no singular vector at grade {grade}\n"),
        )),
        Some(sv) => {
            let mut text = format!("grade {grade}, rank {}\n  ({}) x\n", sv.rank, sv.element);
            if sv.factors.len() > 1 {
                text.push_str("  prime factors (leftmost acts last):\n");
                for f in &sv.factors {
                    writeln!(text, "    {f}").unwrap();
                }
            }
            Ok(Report::ok(sv.to_json(), text))
        }
    }
}

fn cmd_gram(param: &Param, h: &str, grade: usize) -> Result<Report> {
    let t = t_of(param)?;
    let h = parse_scalar(h)?;
    let v = VermaModule::new(&h, &t)?;
    let g = v.gram_matrix(grade);
    let det = linalg::determinant(&g);
    let parts = partitions(grade);
    let mut text = format!("Gram matrix of V_{h} at grade {grade}, basis {:?}\n", parts.list);
    for row in &g {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(text, "  [{}]", cells.join(", ")).unwrap();
    }
    writeln!(text, "determinant {det}").unwrap();
    let json = json!({
        "h": h.to_json(),
        "t": t.to_json(),
        "grade": grade,
        "basis": parts.list,
        "matrix": g.iter().map(|r| scalars_json(r)).collect::<Vec<_>>(),
        "determinant": det.to_json(),
    });
    Ok(Report::ok(json, text))
}

fn random_weight(rng: &mut StdRng) -> Scalar {
    Scalar::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=9))
}

fn cmd_kacdet(param: &Param, hs: Option<&str>, max_grade: usize, seed: u64) -> Result<Report> {
    let t = t_of(param)?;
    let weights: Vec<Scalar> = match hs {
        Some(s) => s.split(',').map(parse_scalar).collect::<Result<_>>()?,
        None => {
            let mut rng = StdRng::seed_from_u64(seed);
            (0..5).map(|_| random_weight(&mut rng)).collect()
        }
    };
    let mut ok = true;
    let mut rows = Vec::new();
    let mut text = format!("det(Gram_n) / Kac product at t = {t}\n");
    for n in 1..=max_grade {
        let mut ratios = Vec::new();
        for h in &weights {
            match kac_determinant_ratio(h, &t, n) {
                Ok(r) => ratios.push(Some(r)),
                Err(VirError::NormDegenerate(_)) => ratios.push(None),
                Err(e) => return Err(e),
            }
        }
        let known: Vec<&Scalar> = ratios.iter().flatten().collect();
        let constant = known.windows(2).all(|w| w[0] == w[1]) && known.iter().all(|r| !r.is_zero());
        ok &= constant;
        let shown = known.first().map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        writeln!(text, "  n = {n}: {shown} {}", if constant { "constant" } else { "NOT constant" }).unwrap();
        rows.push(json!({
            "n": n,
            "ratios": ratios.iter().map(|r| r.as_ref().map(Scalar::to_json)).collect::<Vec<_>>(),
            "constant": constant,
        }));
    }
    let json = json!({
        "t": t.to_json(),
        "h": scalars_json(&weights),
        "grades": rows,
        "ok": ok,
    });
    Ok(Report { json, text, code: if ok { 0 } else { 1 } })
}

fn cmd_intersection(m: usize) -> Report {
    let d = intersection_dim(m);
    let basis = intersection_basis(m, &Scalar::zero());
    let mut text = format!("d({m}) = {d}\n");
    let mut pairs = Vec::new();
    for (u1, u2) in &basis {
        let neg = u2.scale(&Scalar::int(-1));
        writeln!(text, "  ({u1}) L_1 = ({neg}) L_2").unwrap();
        pairs.push(json!({"u1": u1.to_string(), "u2": u2.to_string()}));
    }
    Report::ok(json!({"m": m, "dimension": d, "basis": pairs}), text)
}

fn cmd_exists(pair: &Pair) -> Result<Report> {
    let (_, left, right) = modules(pair)?;
    let compat = left_right_compatible(&left, &right)?;
    let answer = exists(&left, &right)?;
    let mut json = answer.to_json();
    json["left"] = Value::String(module_name(&left));
    json["right"] = Value::String(module_name(&right));
    json["derived"] = compat.to_json();
    let mut text = format!("left {}, right {}\n", module_name(&left), module_name(&right));
    if compat.compatible {
        writeln!(
            text,
            "ell = {}, rho = {}, b = {}, g = {}, n = {}",
            compat.ell.unwrap_or(0),
            compat.rho,
            compat.b,
            compat.g.map(|g| g.to_string()).unwrap_or_else(|| "-".into()),
            compat.n
        )
        .unwrap();
    }
    writeln!(text, "{answer}").unwrap();
    let code = if compat.compatible { 0 } else { EXIT_INCOMPATIBLE };
    Ok(Report { json, text, code })
}

fn read_data(p: &StaggeredProblem, arg: &str) -> Result<Data> {
    let raw = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| VirError::Parse(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    let v: Value = serde_json::from_str(&raw).map_err(|e| VirError::Parse(format!("data: {e}")))?;
    let vec_of = |key: &str, grade: i64| -> Result<GradedVector> {
        let arr = v
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| VirError::Parse(format!("data: missing array `{key}`")))?;
        let coords = arr.iter().map(Scalar::from_json).collect::<Result<Vec<_>>>()?;
        Ok(GradedVector { grade, coords })
    };
    let l = p.ell() as i64;
    let d = Data { omega1: vec_of("omega1", l - 1)?, omega2: vec_of("omega2", l - 2)? };
    p.check_data_shape(&d).map_err(|_| {
        VirError::Parse(format!(
            "data needs {} entries in omega1 and {} in omega2",
            p.left().dim(l - 1),
            p.left().dim(l - 2)
        ))
    })?;
    Ok(d)
}

fn data_json(p: &StaggeredProblem, d: &Data) -> Value {
    json!({
        "omega1": scalars_json(&d.omega1.coords),
        "omega2": scalars_json(&d.omega2.coords),
        "omega1_display": p.left().vector_string(&d.omega1),
        "omega2_display": p.left().vector_string(&d.omega2),
    })
}

fn cmd_beta(pair: &Pair, beta: Option<&str>, data: Option<&str>, seed: Option<u64>) -> Result<Report> {
    let (_, left, right) = modules(pair)?;
    let p = StaggeredProblem::new(left, right)?.with_right_verma()?;
    let d = match (beta, data) {
        (Some(b), None) => DataSpace::new(&p)?.data_for(&parse_beta(b)?)?,
        (None, Some(s)) => read_data(&p, s)?,
        _ => return Err(VirError::Parse("give exactly one of --beta and --data".into())),
    };
    let admissible = is_admissible_right_verma(&p, &d)?;
    if !admissible {
        return Err(VirError::InvalidModule("data does not define a staggered module".into()));
    }
    let value = beta_invariants(&p, &d)?;
    let naive = naive_beta(&p, &d)?;
    let mut text = format!(
        "case {}, ell = {}, rho = {}\nomega_1 = {}\nomega_2 = {}\n{value}\n",
        p.case(),
        p.ell(),
        p.rho(),
        p.left().vector_string(&d.omega1),
        p.left().vector_string(&d.omega2)
    );
    let mut json = json!({
        "problem": p.summary_json(),
        "data": data_json(&p, &d),
        "beta": value.to_json(),
        "naive_pairing": naive.to_json(),
    });
    let mut code = 0;
    if let Some(seed) = seed {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = p.left().dim(p.ell() as i64);
        let mut stable = true;
        for _ in 0..20 {
            let coords = (0..n).map(|_| random_weight(&mut rng)).collect();
            let u = GradedVector { grade: p.ell() as i64, coords };
            stable &= beta_invariants(&p, &gauge_apply(&p, &u, &d)?)? == value;
        }
        writeln!(text, "gauge invariance over 20 random gauges: {}", if stable { "ok" } else { "FAILED" }).unwrap();
        json["gauge_invariant"] = Value::Bool(stable);
        if !stable {
            code = 1;
        }
    }
    Ok(Report { json, text, code })
}

fn stag_vec_string(m: &StaggeredModule, v: &StagVec) -> String {
    let mut parts = Vec::new();
    let lv = v.left_part();
    if !lv.is_zero() {
        parts.push(m.left().vector_string(&lv));
    }
    if !linalg::is_zero_vec(&v.right) {
        let k = (v.grade - m.ell() as i64) as usize;
        let e = AlgebraElement::from_partition_coords(m.left().c(), k, &v.right);
        parts.push(format!("({e}) y"));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Action of `L_-2 .. L_2` on the basis of the module with Verma right
/// module, up to `max` grades above `x`.
fn action_table(m: &StaggeredModule, max: usize) -> (Value, String) {
    let mut rows = Vec::new();
    let mut text = String::from("action table:\n");
    for g in 0..=max as i64 {
        let mut basis = Vec::new();
        for i in 0..m.left().dim(g) {
            let mut v = m.zero(g);
            v.left[i] = Scalar::one();
            basis.push(v);
        }
        let k = g - m.ell() as i64;
        if k >= 0 {
            for i in 0..partitions(k as usize).len() {
                let mut v = m.zero(g);
                v.right[i] = Scalar::one();
                basis.push(v);
            }
        }
        for v in &basis {
            let name = stag_vec_string(m, v);
            for n in -2..=2 {
                let w = m.apply_mode(n, v);
                let s = stag_vec_string(m, &w);
                writeln!(text, "  L_{n} [{name}] = {s}").unwrap();
                rows.push(json!({"grade": g, "vector": name, "mode": n, "image": s}));
            }
        }
    }
    (Value::Array(rows), text)
}

fn cmd_oracle(pair: &Pair, beta: Option<&str>, max_grade: Option<usize>) -> Result<Report> {
    let (_, left, right) = modules(pair)?;
    let p = StaggeredProblem::new(left, right)?;
    let target = match beta {
        Some(b) => parse_beta(b)?,
        None => BetaValue::None,
    };
    let region = oracle_answer(&p)?;
    let mut text = format!("singular vector search, {target}\n");
    let mut json = json!({"beta": target.to_json(), "region": region.to_json()});
    match oracle_singular(&p, &target)? {
        None => {
            text.push_str("no singular vector Xbar y - varpi exists\n");
            json["varpi"] = Value::Null;
        }
        Some(ws) => {
            let mut list = Vec::new();
            for (g, w) in p.right().generator_grades().iter().zip(&ws) {
                writeln!(text, "  grade {g}: varpi = {}", p.left().vector_string(w)).unwrap();
                list.push(json!({"grade": g, "varpi": p.left().vector_json(w)}));
            }
            json["varpi"] = Value::Array(list);
        }
    }
    writeln!(text, "region from the search: {region}").unwrap();
    if let Some(max) = max_grade {
        let s = p.with_right_verma()?;
        let d = DataSpace::new(&s)?.data_for(&target)?;
        let module = s.module(&d)?;
        let (tj, tt) = action_table(&module, max);
        text.push_str(&tt);
        json["action"] = tj;
    }
    Ok(Report::ok(json, text))
}

fn cmd_table(r: Option<i64>, s: Option<i64>) -> Result<Report> {
    let labels: Vec<(i64, i64)> = match (r, s) {
        (Some(r), Some(s)) if r > 0 && s > 0 => vec![(r, s)],
        (None, None) => GENERIC_ROWS.to_vec(),
        _ => return Err(VirError::Parse("give both --r and --s (positive) or neither".into())),
    };
    let mut rows = Vec::new();
    let mut text = String::from("(r,s)  beta_bar'  |  t where a module exists\n");
    for (r, s) in labels {
        let row = generic_row(r, s)?;
        let mut agree = true;
        for t0 in &row.existence {
            let t = Scalar::from(t0.clone());
            let h = virstag_core::scalars::kac_weight(r, s, &t)?;
            agree &= rohsiepe_exists(&h, &t)?;
        }
        let set: Vec<String> = row.existence.iter().map(|x| x.to_string()).collect();
        writeln!(text, "({r},{s})  {}  |  {{{}}}", row.beta_bar.factored(), set.join(", ")).unwrap();
        let mut j = row.to_json();
        j["criterion_agrees"] = Value::Bool(agree);
        rows.push(j);
    }
    Ok(Report::ok(Value::Array(rows), text))
}

/// Convenience for `reproduce`: the answer for weights and absolute
/// quotient weights.
pub fn answer_for(t: &Scalar, left: &str, right: &str) -> Result<(StaggeredProblem, StaggeredAnswer)> {
    let l = parse_module(left, t)?;
    let r = parse_module(right, t)?;
    let a = exists(&l, &r)?;
    Ok((StaggeredProblem::new(l, r)?, a))
}
