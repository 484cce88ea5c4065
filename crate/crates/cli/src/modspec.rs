//! Parsing of parameters and module notation on the command line.
//!
//! A module is written `h` (the Verma module `V_h`), `h/H1[,H2]` (the
//! quotient of `V_h` by the submodules `V_{H1}`, `V_{H2}`, with absolute
//! weights) or `h:g1[,g2]` (the same with grades relative to `h`).
//! Fractional weights in the `/` form must be parenthesised, as in
//! `(1/4)/(9/4)`; `1/4:2` is the same module.

use std::sync::Arc;

use virstag_core::scalars::{t_candidates_from_c, Rational};
use virstag_core::structure::classify;
use virstag_core::verma::HwModule;
use virstag_core::{Scalar, VirError};

pub fn parse_scalar(s: &str) -> Result<Scalar, VirError> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(s);
    Scalar::parse(s.trim())
}

/// `t` from either flag; `c` picks the larger of its two parameters.
pub fn resolve_t(t: Option<&str>, c: Option<&str>) -> Result<Scalar, VirError> {
    match (t, c) {
        (Some(t), None) => {
            let t = parse_scalar(t)?;
            if t.is_zero() {
                return Err(VirError::ZeroParameter);
            }
            Ok(t)
        }
        (None, Some(c)) => {
            let c = parse_scalar(c)?;
            let cr: &Rational = c
                .as_rational()
                .ok_or_else(|| VirError::Parse("central charge must be rational".into()))?;
            Ok(Scalar::from(t_candidates_from_c(cr)?.0))
        }
        _ => Err(VirError::Parse("give exactly one of --t and --c".into())),
    }
}

/// Splits at `/` outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// The weight and relative quotient grades of a module spec.
pub fn parse_module_spec(spec: &str) -> Result<(Scalar, Vec<usize>), VirError> {
    let bad = |m: &str| VirError::Parse(format!("module `{spec}`: {m}"));
    if let Some((h, gs)) = spec.split_once(':') {
        let h = parse_scalar(h)?;
        let grades = gs
            .split(',')
            .map(|g| g.trim().parse::<usize>().map_err(|_| bad("grades must be positive integers")))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((h, grades));
    }
    let parts = split_top(spec);
    match parts.as_slice() {
        [h] => Ok((parse_scalar(h)?, Vec::new())),
        [h, tops] => {
            let h = parse_scalar(h)?;
            let mut grades = Vec::new();
            for w in tops.split(',') {
                let g = (parse_scalar(w)? - &h)
                    .as_i64()
                    .filter(|&g| g > 0)
                    .ok_or_else(|| bad("quotient weights must exceed h by a positive integer"))?;
                grades.push(g as usize);
            }
            Ok((h, grades))
        }
        _ => Err(bad("ambiguous; parenthesise fractional weights, e.g. (1/4)/(9/4)")),
    }
}

/// Builds the module after checking the quotient grades against the
/// singular vectors of `V_h`.
pub fn parse_module(spec: &str, t: &Scalar) -> Result<Arc<HwModule>, VirError> {
    let (h, grades) = parse_module_spec(spec)?;
    if let Some(&top) = grades.iter().max() {
        let lattice = classify(&h, t, top)?;
        for &g in &grades {
            if lattice.entry_at(g).is_none() {
                let have: Vec<String> =
                    lattice.entries.iter().map(|e| (&h + &Scalar::int(e.grade as i64)).to_string()).collect();
                return Err(VirError::Parse(format!(
                    "V_{h} has no singular vector of weight {} (weights up to {}: {})",
                    &h + &Scalar::int(g as i64),
                    &h + &Scalar::int(top as i64),
                    if have.is_empty() { "none".to_string() } else { have.join(", ") }
                )));
            }
        }
    }
    HwModule::new(&h, t, &grades)
}

/// Notation for a module, with absolute weights.
pub fn module_name(m: &HwModule) -> String {
    let h = m.h();
    if m.generator_grades().is_empty() {
        return format!("V_{h}");
    }
    let tops: Vec<String> =
        m.generator_grades().iter().map(|&g| format!("V_{}", h + &Scalar::int(g as i64))).collect();
    format!("V_{h}/({})", tops.join(" + "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notation() {
        assert_eq!(parse_module_spec("0").unwrap(), (Scalar::int(0), vec![]));
        assert_eq!(parse_module_spec("1/5").unwrap(), (Scalar::int(1), vec![4]));
        assert_eq!(parse_module_spec("0/12,15").unwrap(), (Scalar::int(0), vec![12, 15]));
        assert_eq!(parse_module_spec("(1/4)/(9/4)").unwrap(), (Scalar::ratio(1, 4), vec![2]));
        assert_eq!(parse_module_spec("1/4:2").unwrap(), (Scalar::ratio(1, 4), vec![2]));
        assert!(parse_module_spec("1/4/9/4").is_err());
        assert!(parse_module_spec("3/2").is_err());
    }

    #[test]
    fn t_from_c() {
        assert_eq!(resolve_t(None, Some("0")).unwrap(), Scalar::ratio(3, 2));
        assert_eq!(resolve_t(None, Some("-2")).unwrap(), Scalar::int(2));
        assert!(resolve_t(Some("1"), Some("1")).is_err());
    }
}
