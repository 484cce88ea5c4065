//! The universal enveloping algebra of the Virasoro algebra in PBW form.
//!
//! A [`Monomial`] is an ordered product `L_{n_1}^{e_1} ... L_{n_k}^{e_k}` with
//! strictly increasing modes, so creation operators sit on the left and
//! annihilators on the right. The central element is replaced by its value
//! `c`, which every [`AlgebraElement`] carries.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::{Arc, LazyLock, Mutex};

use serde_json::{json, Value};

use crate::error::{Result, VirError};
use crate::scalars::Scalar;

/// A partition with parts in non-increasing order.
pub type Partition = Vec<u32>;

// ---------------------------------------------------------------------------
// Partitions

/// All partitions of one integer, in basis order, with a reverse index.
#[derive(Debug)]
pub struct PartitionTable {
    pub list: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

impl PartitionTable {
    pub fn index_of(&self, p: &[u32]) -> usize {
        self.index[p]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

static PARTITIONS: LazyLock<Mutex<Vec<Arc<PartitionTable>>>> =
    LazyLock::new(|| Mutex::new(Vec::new()));

fn gen_partitions(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for k in (1..=max.min(n)).rev() {
        prefix.push(k);
        gen_partitions(n - k, k, prefix, out);
        prefix.pop();
    }
}

/// Partitions of `n` sorted lexicographically by their (non-increasing)
/// parts, so `1^n` comes first and `(n)` last.
pub fn partitions(n: usize) -> Arc<PartitionTable> {
    let mut cache = PARTITIONS.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len() as u32;
        let mut list = Vec::new();
        gen_partitions(m, m, &mut Vec::new(), &mut list);
        list.sort();
        let index = list.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        cache.push(Arc::new(PartitionTable { list, index }));
    }
    cache[n].clone()
}

/// Number of partitions of `n` (zero for negative `n`).
pub fn partition_count(n: i64) -> usize {
    if n < 0 {
        0
    } else {
        partitions(n as usize).len()
    }
}

// ---------------------------------------------------------------------------
// Monomials

/// PBW monomial: `(mode, exponent)` pairs with strictly increasing modes and
/// positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(i32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from a non-decreasing word of modes.
    pub fn from_sorted_word(word: &[i32]) -> Self {
        let mut out: Vec<(i32, u32)> = Vec::new();
        for &m in word {
            match out.last_mut() {
                Some((n, e)) if *n == m => *e += 1,
                Some((n, _)) => {
                    assert!(*n < m, "word is not sorted");
                    out.push((m, 1));
                }
                None => out.push((m, 1)),
            }
        }
        Monomial(out)
    }

    /// `L_{-lambda_1} ... L_{-lambda_k}`.
    pub fn from_partition(p: &[u32]) -> Self {
        let word: Vec<i32> = p.iter().map(|&x| -(x as i32)).collect();
        Monomial::from_sorted_word(&word)
    }

    pub fn factors(&self) -> &[(i32, u32)] {
        &self.0
    }

    /// Modes left to right, with repetition.
    pub fn word(&self) -> Vec<i32> {
        self.0
            .iter()
            .flat_map(|&(m, e)| std::iter::repeat_n(m, e as usize))
            .collect()
    }

    /// The amount by which the monomial raises `L_0` eigenvalues.
    pub fn grade(&self) -> i64 {
        self.0.iter().map(|&(m, e)| -(m as i64) * e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// The partition of a pure creation monomial.
    pub fn as_partition(&self) -> Option<Partition> {
        if self.0.iter().all(|&(m, _)| m < 0) {
            Some(self.word().iter().map(|&m| (-m) as u32).collect())
        } else {
            None
        }
    }

    fn negative_parts(&self) -> Vec<u32> {
        self.word().into_iter().filter(|&m| m < 0).map(|m| (-m) as u32).collect()
    }

    fn positive_parts(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.word().into_iter().filter(|&m| m > 0).map(|m| m as u32).collect();
        v.reverse();
        v
    }

    fn zero_exp(&self) -> u32 {
        self.0.iter().find(|&&(m, _)| m == 0).map_or(0, |&(_, e)| e)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|&(m, e)| json!([m, e])).collect())
    }
}

fn cmp_parts(a: &[u32], b: &[u32]) -> Ordering {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => a.cmp(b),
    }
}

impl Ord for Monomial {
    /// Creation part first (in basis order, empty last), then higher powers
    /// of `L_0` first, then the annihilation part read right to left.
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_parts(&self.negative_parts(), &o.negative_parts())
            .then_with(|| o.zero_exp().cmp(&self.zero_exp()))
            .then_with(|| cmp_parts(&self.positive_parts(), &o.positive_parts()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(m, e)| if e == 1 { format!("L{m}") } else { format!("L{m}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

// ---------------------------------------------------------------------------
// Elements

/// A finite linear combination of PBW monomials at a fixed central charge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    c: Scalar,
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero(c: &Scalar) -> Self {
        AlgebraElement { c: c.clone(), terms: BTreeMap::new() }
    }

    pub fn one(c: &Scalar) -> Self {
        Self::monomial(c, Monomial::one(), Scalar::one())
    }

    pub fn monomial(c: &Scalar, m: Monomial, k: Scalar) -> Self {
        let mut e = Self::zero(c);
        e.add_term(m, &k);
        e
    }

    /// The single mode `L_n`.
    pub fn mode(c: &Scalar, n: i32) -> Self {
        Self::monomial(c, Monomial(vec![(n, 1)]), Scalar::one())
    }

    /// The word `L_{w_1} ... L_{w_k}` in normal order.
    pub fn word(c: &Scalar, w: &[i32]) -> Self {
        normal_order(w, c)
    }

    /// Creation element from coordinates over `partitions(grade)`.
    pub fn from_partition_coords(c: &Scalar, grade: usize, coords: &[Scalar]) -> Self {
        let parts = partitions(grade);
        let mut e = Self::zero(c);
        for (p, k) in parts.list.iter().zip(coords) {
            e.add_term(Monomial::from_partition(p), k);
        }
        e
    }

    /// Coordinates over `partitions(grade)`; fails unless the element is a
    /// homogeneous creation element of that grade.
    pub fn partition_coords(&self, grade: usize) -> Result<Vec<Scalar>> {
        let parts = partitions(grade);
        let mut v = vec![Scalar::zero(); parts.len()];
        for (m, k) in &self.terms {
            let p = m
                .as_partition()
                .filter(|p| p.iter().sum::<u32>() as usize == grade)
                .ok_or_else(|| {
                    VirError::InvalidModule(format!("{m} is not a creation monomial of grade {grade}"))
                })?;
            v[parts.index_of(&p)] = k.clone();
        }
        Ok(v)
    }

    pub fn central_charge(&self) -> &Scalar {
        &self.c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Common grade of all terms, if homogeneous and nonzero.
    pub fn grade(&self) -> Option<i64> {
        let mut g = None;
        for m in self.terms.keys() {
            match g {
                None => g = Some(m.grade()),
                Some(x) if x != m.grade() => return None,
                _ => {}
            }
        }
        g
    }

    pub fn add_term(&mut self, m: Monomial, k: &Scalar) {
        if k.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(k.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += k;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_ctx(&self, o: &Self) -> Result<()> {
        if self.c == o.c {
            Ok(())
        } else {
            Err(VirError::ContextMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let mut r = self.clone();
        for (m, k) in &o.terms {
            r.add_term(m.clone(), k);
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut r = Self::zero(&self.c);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), &(v * k));
        }
        r
    }

    /// Product in normal order.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let mut r = Self::zero(&self.c);
        for (ma, ka) in &self.terms {
            for (mb, kb) in &o.terms {
                let mut w = ma.word();
                w.extend(mb.word());
                let k = ka * kb;
                for (m, v) in normal_order_terms(&w, &self.c).iter() {
                    r.add_term(m.clone(), &(v * &k));
                }
            }
        }
        Ok(r)
    }

    /// The anti-involution `L_n -> L_{-n}`.
    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero(&self.c);
        for (m, k) in &self.terms {
            // Reversing and negating a sorted word keeps it sorted.
            let w: Vec<i32> = m.word().iter().rev().map(|x| -x).collect();
            r.add_term(Monomial::from_sorted_word(&w), k);
        }
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c.to_json(),
            "terms": self.terms.iter().map(|(m, k)| json!({
                "monomial": m.to_json(),
                "coeff": k.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| VirError::Parse(format!("algebra element: {s}"));
        let c = Scalar::from_json(v.get("c").ok_or_else(|| bad("missing c"))?)?;
        let mut e = Self::zero(&c);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let k = Scalar::from_json(t.get("coeff").ok_or_else(|| bad("missing coeff"))?)?;
            let mut word = Vec::new();
            for f in t.get("monomial").and_then(Value::as_array).ok_or_else(|| bad("missing monomial"))? {
                let m = f.get(0).and_then(Value::as_i64).ok_or_else(|| bad("mode"))?;
                let x = f.get(1).and_then(Value::as_u64).ok_or_else(|| bad("exponent"))?;
                word.extend(std::iter::repeat_n(m as i32, x as usize));
            }
            let w = normal_order(&word, &c);
            e = e.add(&w.scale(&k))?;
        }
        Ok(e)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, k) in &self.terms {
            let neg = k.looks_negative();
            let a = if neg { -k } else { k.clone() };
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = if m.is_one() {
                a.to_string()
            } else if a.is_one() {
                m.to_string()
            } else {
                format!("{} {}", a.coeff_string(), m)
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Normal ordering

type Terms = BTreeMap<Monomial, Scalar>;

type MemoKey = (Scalar, Vec<i32>);

thread_local! {
    static NORMAL_ORDER_MEMO: RefCell<HashMap<MemoKey, Rc<Terms>>> =
        RefCell::new(HashMap::new());
}

fn normal_order_terms(word: &[i32], c: &Scalar) -> Rc<Terms> {
    let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| word[i] > word[i + 1]) else {
        let mut t = Terms::new();
        t.insert(Monomial::from_sorted_word(word), Scalar::one());
        return Rc::new(t);
    };
    let key = (c.clone(), word.to_vec());
    if let Some(r) = NORMAL_ORDER_MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return r;
    }
    let (a, b) = (word[i], word[i + 1]);
    let mut out = Terms::new();
    let mut acc = |w: &[i32], k: &Scalar| {
        for (m, v) in normal_order_terms(w, c).iter() {
            let e = out.entry(m.clone()).or_default();
            *e += &(v * k);
        }
    };
    // L_a L_b = L_b L_a + (a - b) L_{a+b} + delta_{a+b,0} (a^3 - a)/12 c
    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    acc(&swapped, &Scalar::one());
    let mut merged = word[..i].to_vec();
    merged.push(a + b);
    merged.extend_from_slice(&word[i + 2..]);
    acc(&merged, &Scalar::int((a - b) as i64));
    if a + b == 0 {
        let mut shorter = word[..i].to_vec();
        shorter.extend_from_slice(&word[i + 2..]);
        let a = a as i64;
        acc(&shorter, &(Scalar::ratio(a * a * a - a, 12) * c));
    }
    out.retain(|_, v| !v.is_zero());
    let r = Rc::new(out);
    NORMAL_ORDER_MEMO.with(|m| m.borrow_mut().insert(key, r.clone()));
    r
}

/// Rewrites a word of modes in PBW order using the Virasoro bracket.
pub fn normal_order(word: &[i32], c: &Scalar) -> AlgebraElement {
    let terms = (*normal_order_terms(word, c)).clone();
    AlgebraElement { c: c.clone(), terms }
}

/// `(a, b) -> a b` in normal order.
pub fn multiply(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.mul(b)
}

/// Basis of the creation subalgebra at grade `n`, in partition order.
pub fn negative_basis(n: usize) -> Vec<Monomial> {
    partitions(n).list.iter().map(|p| Monomial::from_partition(p)).collect()
}

/// Basis of the annihilation subalgebra at grade `-n`: the adjoints of
/// [`negative_basis`] in the same order.
pub fn positive_basis(n: usize) -> Vec<Monomial> {
    partitions(n)
        .list
        .iter()
        .map(|p| {
            let w: Vec<i32> = p.iter().rev().map(|&x| x as i32).collect();
            Monomial::from_sorted_word(&w)
        })
        .collect()
}

/// Writes an annihilation element `u` as `u1 L_1 + u2 L_2`.
///
/// Rightmost factors `L_n` with `n >= 3` are rewritten through
/// `(n-2) L_n = L_{n-1} L_1 - L_1 L_{n-1}` until only `L_1` and `L_2`
/// remain on the right.
pub fn decompose_against_l1l2(u: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    let c = u.central_charge().clone();
    let mut u1 = AlgebraElement::zero(&c);
    let mut u2 = AlgebraElement::zero(&c);
    for (m, k) in u.terms() {
        let w = m.word();
        let Some((&last, rest)) = w.split_last() else {
            return Err(VirError::NotDecomposable("constant term".into()));
        };
        if w.iter().any(|&x| x <= 0) {
            return Err(VirError::NotDecomposable(format!("monomial {m} is not an annihilator")));
        }
        let prefix = normal_order(rest, &c).scale(k);
        decompose_rec(prefix, last, &mut u1, &mut u2)?;
    }
    Ok((u1, u2))
}

fn decompose_rec(
    p: AlgebraElement,
    n: i32,
    u1: &mut AlgebraElement,
    u2: &mut AlgebraElement,
) -> Result<()> {
    let c = p.central_charge().clone();
    match n {
        1 => *u1 = u1.add(&p)?,
        2 => *u2 = u2.add(&p)?,
        _ => {
            let inv = Scalar::ratio(1, (n - 2) as i64);
            *u1 = u1.add(&p.mul(&AlgebraElement::mode(&c, n - 1))?.scale(&inv))?;
            let next = p.mul(&AlgebraElement::mode(&c, 1))?.scale(&-inv);
            decompose_rec(next, n - 1, u1, u2)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_order() {
        let p = partitions(4);
        assert_eq!(
            p.list,
            vec![vec![1, 1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]]
        );
        assert_eq!(partition_count(15), 176);
        assert_eq!(partition_count(-1), 0);
    }

    #[test]
    fn simple_commutators() {
        let c = Scalar::t(); // stands in for a formal central charge
        let e = normal_order(&[1, -1], &c);
        assert_eq!(e.to_string(), "L-1 L1 + 2 L0");
        let e = normal_order(&[2, -2], &c);
        let expect = AlgebraElement::word(&c, &[-2, 2])
            .add(&AlgebraElement::mode(&c, 0).scale(&Scalar::int(4)))
            .unwrap()
            .add(&AlgebraElement::one(&c).scale(&(Scalar::ratio(1, 2) * &c)))
            .unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn three_mode_word() {
        let c = Scalar::zero();
        let e = normal_order(&[1, 1, -1], &c);
        assert_eq!(e.to_string(), "L-1 L1^2 + 4 L0 L1 + 2 L1");
    }

    #[test]
    fn adjoint_of_basis() {
        let c = Scalar::zero();
        let e = AlgebraElement::word(&c, &[-3, -1]);
        assert_eq!(e.adjoint(), AlgebraElement::word(&c, &[1, 3]));
        assert_eq!(positive_basis(3).len(), 3);
    }

    #[test]
    fn decompose_l3() {
        let c = Scalar::zero();
        let (u1, u2) = decompose_against_l1l2(&AlgebraElement::mode(&c, 3)).unwrap();
        assert_eq!(u1, AlgebraElement::mode(&c, 2));
        assert_eq!(u2, AlgebraElement::mode(&c, 1).scale(&Scalar::int(-1)));
        assert!(decompose_against_l1l2(&AlgebraElement::one(&c)).is_err());
    }
}
