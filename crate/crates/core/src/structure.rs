//! Submodule lattices of Verma modules and left/right compatibility.
//!
//! For rational `t = q/p` the weight `h` is degenerate exactly when
//! `D = 4pq h + (p - q)^2` is the square of an integer `k`, and the Kac
//! labels of `h` are the positive solutions of `p s - q r = +-k`. Whether
//! `p | k` or `q | k` decides between a chain and a braid; successive
//! singular grades are found by repeating the search over the weights of
//! the singular vectors already located.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Result, VirError};
use crate::scalars::{kac_weight, t_fraction, Rational, Scalar};
use crate::verma::{act_element, GradedVector, HwModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeType {
    Point,
    Link,
    Chain,
    Braid,
}

impl fmt::Display for LatticeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeType::Point => "point",
            LatticeType::Link => "link",
            LatticeType::Chain => "chain",
            LatticeType::Braid => "braid",
        };
        write!(f, "{s}")
    }
}

/// Which of the two singular vectors of a braid level an entry is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Minus => "-",
            Branch::Plus => "+",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeEntry {
    pub grade: usize,
    pub rank: usize,
    /// `None` for chains and links.
    pub branch: Option<Branch>,
}

/// The singular vectors of `V_h` up to a grade bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleStructure {
    pub h: Scalar,
    pub t: Scalar,
    pub kind: LatticeType,
    pub max_grade: usize,
    /// Sorted by grade.
    pub entries: Vec<LatticeEntry>,
    /// A braid whose last level has only one singular vector.
    pub degenerate: bool,
}

impl ModuleStructure {
    pub fn entry_at(&self, g: usize) -> Option<&LatticeEntry> {
        self.entries.iter().find(|e| e.grade == g)
    }

    /// Rank of the singular vector at grade `g`; grade zero has rank zero.
    pub fn rank_at(&self, g: usize) -> Option<usize> {
        if g == 0 {
            Some(0)
        } else {
            self.entry_at(g).map(|e| e.rank)
        }
    }

    /// Entries of rank `k`, minus branch first. Rank zero is `x` itself.
    pub fn of_rank(&self, k: usize) -> Vec<LatticeEntry> {
        if k == 0 {
            return vec![LatticeEntry { grade: 0, rank: 0, branch: None }];
        }
        self.entries.iter().filter(|e| e.rank == k).cloned().collect()
    }

    /// Grades of a maximal chain of singular vectors ending at `n`, one per
    /// rank, excluding zero.
    pub fn path_to(&self, n: usize) -> Vec<usize> {
        let Some(e) = self.entry_at(n) else {
            return Vec::new();
        };
        let mut path: Vec<usize> =
            (1..e.rank).filter_map(|k| self.of_rank(k).first().map(|x| x.grade)).collect();
        path.push(n);
        path
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h": self.h.to_json(),
            "t": self.t.to_json(),
            "type": self.kind.to_string(),
            "max_grade": self.max_grade,
            "degenerate": self.degenerate,
            "entries": self.entries.iter().map(|e| json!({
                "grade": e.grade,
                "rank": e.rank,
                "branch": e.branch.map(|b| b.symbol()),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ModuleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.degenerate {
            write!(f, " (degenerate)")?;
        }
        let list: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}{}", e.grade, e.branch.map_or("", |b| b.symbol())))
            .collect();
        write!(f, ": [{}]", list.join(", "))
    }
}

/// Kac labels `(r, s)` of a rational weight at rational `t`.
#[derive(Clone, Debug)]
struct KacData {
    p: i128,
    q: i128,
    k: i128,
}

impl KacData {
    fn new(h: &Rational, t: &Rational) -> Result<Option<Self>> {
        let (p, q) = t_fraction(t)?;
        let (p, q) = (p as i128, q as i128);
        let d = Rational::from_integer((4 * p * q).into()) * h
            + Rational::from_integer(((p - q) * (p - q)).into());
        if !d.is_integer() || d.is_negative() {
            return Ok(None);
        }
        let d = d.to_integer();
        let k = d.sqrt();
        if &k * &k != d {
            return Ok(None);
        }
        let k = k.to_i128().ok_or_else(|| VirError::Unsupported("weight too large".into()))?;
        Ok(Some(KacData { p, q, k }))
    }

    fn is_chain(&self) -> bool {
        self.k.is_multiple_of(&self.p) || self.k.is_multiple_of(&self.q.abs())
    }

    /// All solutions with `r s <= bound`, sorted by product.
    fn solutions(&self, bound: i128) -> Vec<(i128, i128)> {
        let mut out = Vec::new();
        let signs: &[i128] = if self.k == 0 { &[1] } else { &[1, -1] };
        for &sg in signs {
            for r in 1..=bound {
                let num = self.q * r + sg * self.k;
                if num % self.p != 0 {
                    continue;
                }
                let s = num / self.p;
                if s >= 1 && r * s <= bound && !out.contains(&(r, s)) {
                    out.push((r, s));
                }
            }
        }
        out.sort_by_key(|&(r, s)| (r * s, r));
        out
    }

    /// Distinct grades `r s` of the (at most) two smallest solutions.
    fn minimal_products(&self) -> Vec<i128> {
        let (p, q, k) = (self.p, self.q.abs(), self.k);
        // Beyond this bound no new minimal solution can appear.
        let limit = if self.q > 0 {
            let r0 = 2 * p + (p + k) / q + 2;
            r0 * ((q * r0 + k) / p + 1)
        } else {
            (k / q + 1) * (k / p + 1)
        };
        let mut bound = 4;
        loop {
            let mut prods: Vec<i128> = self.solutions(bound).iter().map(|&(r, s)| r * s).collect();
            prods.dedup();
            if prods.len() >= 2 || bound >= limit {
                prods.truncate(2);
                return prods;
            }
            bound = (bound * 2).min(limit.max(4));
        }
    }
}

/// Kac labels `(r, s)` with `r s <= bound` and `h_{r,s}(t) = h`.
pub fn kac_labels(h: &Scalar, t: &Scalar, bound: usize) -> Result<Vec<(i64, i64)>> {
    match (h, t) {
        (Scalar::Rat(h), Scalar::Rat(t)) => Ok(KacData::new(h, t)?
            .map(|d| d.solutions(bound as i128))
            .unwrap_or_default()
            .into_iter()
            .map(|(r, s)| (r as i64, s as i64))
            .collect()),
        _ => {
            let mut out = Vec::new();
            for r in 1..=bound as i64 {
                for s in 1..=(bound as i64 / r) {
                    if &kac_weight(r, s, t)? == h {
                        out.push((r, s));
                    }
                }
            }
            out.sort_by_key(|&(r, s)| (r * s, r));
            Ok(out)
        }
    }
}

fn minimal_products(h: &Rational, t: &Rational) -> Result<Vec<i128>> {
    Ok(KacData::new(h, t)?.map(|d| d.minimal_products()).unwrap_or_default())
}

/// Submodule lattice of `V_h` up to grade `max_grade`.
pub fn classify(h: &Scalar, t: &Scalar, max_grade: usize) -> Result<ModuleStructure> {
    if t.is_zero() {
        return Err(VirError::ZeroParameter);
    }
    let (hr, tr) = match (h, t) {
        (Scalar::Rat(hr), Scalar::Rat(tr)) => (hr.clone(), tr.clone()),
        (_, Scalar::Rat(_)) => {
            return Err(VirError::Unsupported("symbolic weight at a rational t".into()))
        }
        _ => return classify_generic(h, t, max_grade),
    };
    let base = ModuleStructure {
        h: h.clone(),
        t: t.clone(),
        kind: LatticeType::Point,
        max_grade,
        entries: Vec::new(),
        degenerate: false,
    };
    let Some(data) = KacData::new(&hr, &tr)? else {
        return Ok(base);
    };
    let finite = data.q < 0;
    // For t < 0 the lattice is finite; compute it entirely so the type is
    // known, then truncate.
    let bound = if finite { i128::MAX } else { max_grade as i128 };
    let mut entries = Vec::new();
    let mut degenerate = false;
    let shift = |g: i128| hr.clone() + Rational::from_integer(g.into());
    if data.is_chain() {
        let mut grade: i128 = 0;
        let mut rank = 0;
        loop {
            let prods = minimal_products(&shift(grade), &tr)?;
            let Some(&m) = prods.first() else { break };
            grade += m;
            rank += 1;
            if grade > bound {
                break;
            }
            entries.push(LatticeEntry { grade: grade as usize, rank, branch: None });
        }
    } else {
        let mut base_grade: i128 = 0;
        let mut rank = 0;
        loop {
            let prods = minimal_products(&shift(base_grade), &tr)?;
            if prods.is_empty() || base_grade + prods[0] > bound {
                break;
            }
            rank += 1;
            entries.push(LatticeEntry {
                grade: (base_grade + prods[0]) as usize,
                rank,
                branch: Some(Branch::Minus),
            });
            if prods.len() == 1 {
                degenerate = true;
                break;
            }
            if base_grade + prods[1] <= bound {
                entries.push(LatticeEntry {
                    grade: (base_grade + prods[1]) as usize,
                    rank,
                    branch: Some(Branch::Plus),
                });
            }
            base_grade += prods[0];
        }
    }
    let kind = if data.is_chain() {
        if finite && entries.len() == 1 {
            LatticeType::Link
        } else {
            LatticeType::Chain
        }
    } else {
        LatticeType::Braid
    };
    entries.retain(|e| e.grade <= max_grade);
    entries.sort_by_key(|e| e.grade);
    Ok(ModuleStructure { kind, entries, degenerate, ..base })
}

fn classify_generic(h: &Scalar, t: &Scalar, max_grade: usize) -> Result<ModuleStructure> {
    let labels = kac_labels(h, t, max_grade)?;
    let entries: Vec<LatticeEntry> = labels
        .iter()
        .take(1)
        .map(|&(r, s)| LatticeEntry { grade: (r * s) as usize, rank: 1, branch: None })
        .collect();
    let kind = if entries.is_empty() { LatticeType::Point } else { LatticeType::Link };
    Ok(ModuleStructure {
        h: h.clone(),
        t: t.clone(),
        kind,
        max_grade,
        entries,
        degenerate: false,
    })
}

// ---------------------------------------------------------------------------
// Compatibility of a left and right module

/// Outcome of the compatibility test, with the derived integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub compatible: bool,
    pub reason: Option<String>,
    /// `h^R - h^L`.
    pub ell: Option<usize>,
    /// Rank of the singular vector at grade `ell` in the left Verma module.
    pub rho: usize,
    /// Rank of the right generators in the right Verma module.
    pub rho_bar: Option<usize>,
    /// Number of rank `rho - 1` singular vectors surviving in the left module.
    pub b: usize,
    /// Number of rank `rho + rho_bar - 1` singular vectors surviving in the
    /// left module.
    pub g: Option<usize>,
    /// Number of right generators.
    pub n: usize,
}

impl Compatibility {
    fn fail(reason: &str, ell: Option<usize>, n: usize) -> Self {
        Compatibility {
            compatible: false,
            reason: Some(reason.to_string()),
            ell,
            rho: 0,
            rho_bar: None,
            b: 0,
            g: None,
            n,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "compatible": self.compatible,
            "reason": self.reason,
            "ell": self.ell,
            "rho": self.rho,
            "rho_bar": self.rho_bar,
            "b": self.b,
            "g": self.g,
            "n": self.n,
        })
    }
}

/// Number of rank-`k` singular vectors of the left Verma module that are
/// nonzero in `left`.
pub fn surviving_of_rank(left: &HwModule, lattice: &ModuleStructure, k: usize) -> Result<usize> {
    let mut count = 0;
    for e in lattice.of_rank(k) {
        if let Some(v) = left.singular_image(e.grade)? {
            if !v.is_zero() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Whether some staggered module could have `left` as submodule and
/// `right` as quotient.
pub fn left_right_compatible(left: &HwModule, right: &HwModule) -> Result<Compatibility> {
    if left.t() != right.t() {
        return Err(VirError::ContextMismatch);
    }
    let t = left.t();
    let n = right.generator_grades().len();
    let diff = right.h() - left.h();
    let ell = match diff.as_i64() {
        Some(l) if l >= 0 => l as usize,
        _ => return Ok(Compatibility::fail("h^R - h^L is not a non-negative integer", None, n)),
    };
    let Some(w0) = left.verma().singular_coords(ell)? else {
        return Ok(Compatibility::fail("no singular vector of the left Verma module at grade ell", Some(ell), n));
    };
    let w0 = left.project(&GradedVector { grade: ell as i64, coords: (*w0).clone() });
    if w0.is_zero() {
        return Ok(Compatibility::fail("omega_0 vanishes in the left module", Some(ell), n));
    }
    let top = ell + right.generator_grades().iter().copied().max().unwrap_or(0);
    let left_lattice = classify(left.h(), t, top.max(1))?;
    let right_lattice = classify(right.h(), t, top.max(1))?;
    let rho = left_lattice
        .rank_at(ell)
        .ok_or_else(|| VirError::Internal(format!("grade {ell} missing from the lattice")))?;
    let mut rho_bar = None;
    for &g in right.generator_grades() {
        let xbar = right.verma().singular_coords(g)?.expect("generators are singular");
        let e = crate::algebra::AlgebraElement::from_partition_coords(right.c(), g, &xbar);
        if !act_element(left, &e, &w0)?.is_zero() {
            return Ok(Compatibility::fail(
                "a right generator does not annihilate omega_0 in the left module",
                Some(ell),
                n,
            ));
        }
        let r = right_lattice
            .rank_at(g)
            .ok_or_else(|| VirError::Internal(format!("grade {g} missing from the lattice")))?;
        match rho_bar {
            Some(x) if x != r => {
                return Err(VirError::InvalidModule("right generators of different ranks".into()))
            }
            _ => rho_bar = Some(r),
        }
    }
    let b = if rho == 0 { 0 } else { surviving_of_rank(left, &left_lattice, rho - 1)? };
    let g = match rho_bar {
        Some(rb) => Some(surviving_of_rank(left, &left_lattice, rho + rb - 1)?),
        None => None,
    };
    Ok(Compatibility { compatible: true, reason: None, ell: Some(ell), rho, rho_bar, b, g, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grades(s: &ModuleStructure) -> Vec<usize> {
        s.entries.iter().map(|e| e.grade).collect()
    }

    #[test]
    fn braid_at_c_zero() {
        let s = classify(&Scalar::zero(), &Scalar::ratio(3, 2), 15).unwrap();
        assert_eq!(s.kind, LatticeType::Braid);
        assert_eq!(grades(&s), vec![1, 2, 5, 7, 12, 15]);
        assert_eq!(s.to_string(), "braid: [1-, 2+, 5-, 7+, 12-, 15+]");
    }

    #[test]
    fn chain_at_t_two() {
        let s = classify(&Scalar::zero(), &Scalar::int(2), 10).unwrap();
        assert_eq!(s.kind, LatticeType::Chain);
        assert_eq!(grades(&s), vec![1, 3, 6, 10]);
    }

    #[test]
    fn chain_at_t_one() {
        let s = classify(&Scalar::ratio(1, 4), &Scalar::one(), 8).unwrap();
        assert_eq!(grades(&s), vec![2, 6]);
    }

    #[test]
    fn degenerate_braid_for_negative_t() {
        let s = classify(&Scalar::zero(), &Scalar::ratio(-2, 3), 20).unwrap();
        assert_eq!(s.kind, LatticeType::Braid);
        assert!(s.degenerate);
        assert_eq!(grades(&s), vec![1]);
    }

    #[test]
    fn generic_t_link() {
        let t = Scalar::t();
        let h = kac_weight(2, 1, &t).unwrap();
        let s = classify(&h, &t, 6).unwrap();
        assert_eq!(s.kind, LatticeType::Link);
        assert_eq!(grades(&s), vec![2]);
    }

    #[test]
    fn point_for_generic_weight() {
        let s = classify(&Scalar::ratio(1, 7), &Scalar::ratio(3, 2), 10).unwrap();
        assert_eq!(s.kind, LatticeType::Point);
    }
}
