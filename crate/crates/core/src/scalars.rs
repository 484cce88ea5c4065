//! Exact scalars.
//!
//! A [`Scalar`] is either a rational number or a rational function of the
//! parameter `t` with rational coefficients. Mixed arithmetic promotes to the
//! function field. A function that happens to be constant is always stored
//! as a rational, so equality and hashing are structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Result, VirError};

pub type Rational = BigRational;

/// Builds the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, `p/q` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || VirError::Parse(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

// ---------------------------------------------------------------------------
// Polynomials over Q

/// Dense univariate polynomial in `t`, coefficients in ascending degree, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn t() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        let v = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
            .collect();
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Writes `self = factor * prim` with `prim` integral, primitive and with
    /// a positive leading coefficient.
    pub fn primitive(&self) -> (Rational, Vec<BigInt>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rational::new(g, l), prim)
    }

    /// Distinct rational roots in increasing order.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let (_, prim) = self.primitive();
        if prim.is_empty() {
            return Vec::new();
        }
        let shift = prim.iter().take_while(|c| c.is_zero()).count();
        let core = &prim[shift..];
        let mut roots = Vec::new();
        if shift > 0 {
            roots.push(Rational::zero());
        }
        if core.len() > 1 {
            let p = Poly::from_coeffs(
                core.iter().map(|c| Rational::from_integer(c.clone())).collect(),
            );
            for num in divisors(&core[0]) {
                for den in divisors(core.last().unwrap()) {
                    for sgn in [1i64, -1] {
                        let r = Rational::new(&num * BigInt::from(sgn), den.clone());
                        if p.eval(&r).is_zero() && !roots.contains(&r) {
                            roots.push(r);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Multiplicity of `root` as a zero.
    pub fn multiplicity(&self, root: &Rational) -> usize {
        let lin = Poly::from_coeffs(vec![-root.clone(), Rational::one()]);
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                break;
            }
            p = q;
            k += 1;
        }
        k
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

fn fmt_coeff_power(out: &mut String, c: &Rational, deg: usize, first: bool) {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let var = match deg {
        0 => String::new(),
        1 => "t".to_string(),
        d => format!("t^{d}"),
    };
    if a.is_one() && deg > 0 {
        out.push_str(&var);
    } else if a.is_integer() {
        out.push_str(&format!("{a}{var}"));
    } else if deg == 0 {
        out.push_str(&format!("{a}"));
    } else {
        out.push_str(&format!("({a}){var}"));
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut s = String::new();
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            fmt_coeff_power(&mut s, c, d, first);
            first = false;
        }
        write!(f, "{s}")
    }
}

// ---------------------------------------------------------------------------
// Rational functions

/// `num / den` in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::constant(Rational::one()) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let l = den.leading().unwrap().recip();
        RatFunc { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::constant(Rational::one()))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.degree() == Some(0) && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeffs().first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    fn recip(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Scalars

/// An exact scalar in Q or Q(t).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Fun(RatFunc),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::Rat(rat_int(n))
    }
}

impl From<RatFunc> for Scalar {
    fn from(f: RatFunc) -> Self {
        match f.constant_value() {
            Some(r) => Scalar::Rat(r),
            None => Scalar::Fun(f),
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rat(rat_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rat(rat(n, d))
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Scalar::Fun(RatFunc::from_poly(Poly::t()))
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(Scalar::Rat)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Fun(_) => None,
        }
    }

    /// Integer value, if this is an integer that fits in `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().to_i64())
    }

    fn as_func(&self) -> RatFunc {
        match self {
            Scalar::Rat(r) => RatFunc::from_poly(Poly::constant(r.clone())),
            Scalar::Fun(f) => f.clone(),
        }
    }

    /// Rough size used to prefer cheap pivots during elimination.
    pub fn complexity(&self) -> u64 {
        match self {
            Scalar::Rat(r) => r.numer().bits() + r.denom().bits(),
            Scalar::Fun(f) => {
                let deg = f.num.degree().unwrap_or(0) + f.den.degree().unwrap_or(0);
                let bits: u64 = f
                    .num
                    .coeffs()
                    .iter()
                    .chain(f.den.coeffs())
                    .map(|c| c.numer().bits() + c.denom().bits())
                    .sum();
                (deg as u64) * 1_000_000 + bits
            }
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => {
                assert!(!r.is_zero(), "division by zero scalar");
                Scalar::Rat(r.recip())
            }
            Scalar::Fun(f) => Scalar::from(f.recip()),
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Option<Scalar> {
        if o.is_zero() {
            None
        } else {
            Some(self * &o.recip())
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes a rational value for `t`.
    pub fn specialise(&self, t0: &Rational) -> Result<Scalar> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Fun(f) => f.eval(t0).map(Scalar::Rat).ok_or_else(|| {
                VirError::UndefinedInvariant(format!("pole at t = {t0}"))
            }),
        }
    }

    /// Canonical JSON: rationals as `"p/q"` strings, functions as integer
    /// coefficient arrays (ascending powers, stored as decimal strings).
    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rat(r) => Value::String(r.to_string()),
            Scalar::Fun(f) => {
                let (a, p) = f.num.primitive();
                let (b, q) = f.den.primitive();
                let k = a / b;
                let num: Vec<Value> = p
                    .iter()
                    .map(|c| Value::String((c * k.numer()).to_string()))
                    .collect();
                let den: Vec<Value> = q
                    .iter()
                    .map(|c| Value::String((c * k.denom()).to_string()))
                    .collect();
                json!({ "num": num, "den": den })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Scalar> {
        let coeffs = |v: &Value| -> Result<Poly> {
            let arr = v
                .as_array()
                .ok_or_else(|| VirError::Parse("expected coefficient array".into()))?;
            let mut cs = Vec::new();
            for c in arr {
                let s = match c {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(VirError::Parse("bad coefficient".into())),
                };
                cs.push(parse_rational(&s)?);
            }
            Ok(Poly::from_coeffs(cs))
        };
        match v {
            Value::String(s) => Scalar::parse(s),
            Value::Number(n) => Scalar::parse(&n.to_string()),
            Value::Object(o) => {
                let num = coeffs(o.get("num").unwrap_or(&Value::Null))?;
                let den = coeffs(o.get("den").unwrap_or(&Value::Null))?;
                if den.is_zero() {
                    return Err(VirError::Parse("zero denominator".into()));
                }
                Ok(Scalar::from(RatFunc::new(num, den)))
            }
            _ => Err(VirError::Parse(format!("not a scalar: {v}"))),
        }
    }

    /// Human-readable form with rational roots of numerator and denominator
    /// pulled out as factors, e.g. `-192 t^-6 (t^2 - 1)^3 (t^2 - 4)`.
    pub fn factored(&self) -> String {
        match self {
            Scalar::Rat(r) => r.to_string(),
            Scalar::Fun(f) => factored_ratfunc(f),
        }
    }

    /// Formats as a coefficient in front of a product: bare integers and
    /// fractions as-is, anything else parenthesised.
    pub fn coeff_string(&self) -> String {
        match self {
            Scalar::Rat(r) if r.is_integer() => r.to_string(),
            Scalar::Rat(r) => format!("({r})"),
            Scalar::Fun(_) => format!("({self})"),
        }
    }

    /// True if the value is "negative" for display purposes.
    pub fn looks_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Fun(f) => f.num.leading().is_some_and(|l| l.is_negative()),
        }
    }
}

struct Factored {
    unit: Rational,
    t_power: i64,
    factors: Vec<(String, usize)>,
}

fn factor_poly(p: &Poly) -> Factored {
    let (unit, prim) = p.primitive();
    let mut rest = Poly::from_coeffs(prim.iter().map(|c| Rational::from_integer(c.clone())).collect());
    let mut t_power = 0i64;
    while rest.coeffs().first().is_some_and(|c| c.is_zero()) {
        rest = rest.div_rem(&Poly::t()).0;
        t_power += 1;
    }
    let mut unit = unit;
    let mut factors = Vec::new();
    let roots: Vec<Rational> = rest.rational_roots().into_iter().filter(|r| r.is_positive()).collect();
    let mut handled: Vec<Rational> = Vec::new();
    for r in &roots {
        let mr = rest.multiplicity(r);
        let mn = rest.multiplicity(&-r.clone());
        let both = mr.min(mn);
        let (n, d) = (r.numer().clone(), r.denom().clone());
        if both > 0 {
            // (d^2 t^2 - n^2)
            let q = Poly::from_coeffs(vec![
                Rational::from_integer(-(&n * &n)),
                Rational::zero(),
                Rational::from_integer(&d * &d),
            ]);
            for _ in 0..both {
                rest = rest.div_rem(&q).0;
            }
            factors.push((format!("{}", q), both));
        }
        handled.push(r.clone());
    }
    let all_roots = rest.rational_roots();
    for r in all_roots {
        let m = rest.multiplicity(&r);
        if m == 0 {
            continue;
        }
        let (n, d) = (r.numer().clone(), r.denom().clone());
        let q = Poly::from_coeffs(vec![Rational::from_integer(-n), Rational::from_integer(d)]);
        for _ in 0..m {
            rest = rest.div_rem(&q).0;
        }
        factors.push((format!("{}", q), m));
    }
    if rest.degree().unwrap_or(0) > 0 {
        let (u, prim) = rest.primitive();
        unit *= u;
        let r = Poly::from_coeffs(prim.iter().map(|c| Rational::from_integer(c.clone())).collect());
        factors.push((format!("{r}"), 1));
    } else if let Some(c) = rest.coeffs().first() {
        unit *= c;
    }
    Factored { unit, t_power, factors }
}

fn factored_ratfunc(f: &RatFunc) -> String {
    let n = factor_poly(&f.num);
    let d = factor_poly(&f.den);
    let unit = n.unit / d.unit;
    let tp = n.t_power - d.t_power;
    let mut parts = vec![unit.to_string()];
    if tp != 0 {
        parts.push(if tp == 1 { "t".into() } else { format!("t^{tp}") });
    }
    for (s, m) in n.factors {
        parts.push(if m == 1 { format!("({s})") } else { format!("({s})^{m}") });
    }
    for (s, m) in d.factors {
        parts.push(format!("({s})^-{m}"));
    }
    parts.join(" ")
}

impl PartialOrd for Scalar {
    /// Rationals are ordered numerically; functions are unordered.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Some(a.cmp(b)),
            _ if self == other => Some(Ordering::Equal),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Fun(func) => write!(f, "{func}"),
        }
    }
}

fn add_s(a: &Scalar, b: &Scalar) -> Scalar {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
        _ => Scalar::from(a.as_func().add(&b.as_func())),
    }
}

fn mul_s(a: &Scalar, b: &Scalar) -> Scalar {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
        (Scalar::Rat(x), Scalar::Fun(_)) | (Scalar::Fun(_), Scalar::Rat(x)) if x.is_zero() => {
            Scalar::zero()
        }
        _ => Scalar::from(a.as_func().mul(&b.as_func())),
    }
}

fn neg_s(a: &Scalar) -> Scalar {
    match a {
        Scalar::Rat(x) => Scalar::Rat(-x),
        Scalar::Fun(f) => Scalar::Fun(f.neg()),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(&self, &o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(&self, o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, add_s);
binop!(Sub, sub, |a: &Scalar, b: &Scalar| add_s(a, &neg_s(b)));
binop!(Mul, mul, mul_s);
binop!(Div, div, |a: &Scalar, b: &Scalar| mul_s(a, &b.recip()));

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        neg_s(&self)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        neg_s(self)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        if let (Scalar::Rat(x), Scalar::Rat(y)) = (&mut *self, o) {
            *x += y;
        } else {
            *self = add_s(self, o);
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        if let (Scalar::Rat(x), Scalar::Rat(y)) = (&mut *self, o) {
            *x -= y;
        } else {
            *self = add_s(self, &neg_s(o));
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        if let (Scalar::Rat(x), Scalar::Rat(y)) = (&mut *self, o) {
            *x *= y;
        } else {
            *self = mul_s(self, o);
        }
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

// ---------------------------------------------------------------------------
// Parametrisation of the central charge and conformal weights

/// `c = 13 - 6 (t + 1/t)`.
pub fn central_charge(t: &Scalar) -> Result<Scalar> {
    if t.is_zero() {
        return Err(VirError::ZeroParameter);
    }
    Ok(Scalar::int(13) - Scalar::int(6) * (t + &t.recip()))
}

/// `h_{r,s} = (r^2-1) t/4 - (rs-1)/2 + (s^2-1)/(4t)`.
pub fn kac_weight(r: i64, s: i64, t: &Scalar) -> Result<Scalar> {
    if t.is_zero() {
        return Err(VirError::ZeroParameter);
    }
    let a = Scalar::ratio(r * r - 1, 4) * t;
    let b = Scalar::ratio(r * s - 1, 2);
    let c = Scalar::ratio(s * s - 1, 4) * t.recip();
    Ok(a - b + c)
}

/// The two values of `t` giving central charge `c`, larger first.
pub fn t_candidates_from_c(c: &Rational) -> Result<(Rational, Rational)> {
    // 6 t^2 + (c - 13) t + 6 = 0
    let b = c - rat_int(13);
    let disc = &b * &b - rat_int(144);
    let irr = || VirError::IrrationalRoots(c.to_string());
    if disc.is_negative() {
        return Err(irr());
    }
    let sn = disc.numer().sqrt();
    let sd = disc.denom().sqrt();
    if &sn * &sn != *disc.numer() || &sd * &sd != *disc.denom() {
        return Err(irr());
    }
    let root = Rational::new(sn, sd);
    let t1 = (-&b + &root) / rat_int(12);
    let t2 = (-&b - &root) / rat_int(12);
    Ok((t1, t2))
}

/// Writes a rational `t` as `q/p` with `p > 0` (so `q` carries the sign).
pub fn t_fraction(t: &Rational) -> Result<(i64, i64)> {
    if t.is_zero() {
        return Err(VirError::ZeroParameter);
    }
    let q = t.numer().to_i64().ok_or(VirError::Unsupported("huge t".into()))?;
    let p = t.denom().to_i64().ok_or(VirError::Unsupported("huge t".into()))?;
    Ok((p, q))
}

/// Sign of a big integer as -1, 0, 1.
pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kac_weights_at_three_halves() {
        let t = Scalar::ratio(3, 2);
        assert_eq!(kac_weight(1, 1, &t).unwrap(), Scalar::zero());
        assert_eq!(kac_weight(1, 2, &t).unwrap(), Scalar::zero());
        // The formula gives 5/8 here.
        assert_eq!(kac_weight(2, 1, &t).unwrap(), Scalar::ratio(5, 8));
        assert_eq!(kac_weight(1, 4, &t).unwrap(), Scalar::one());
        assert_eq!(kac_weight(3, 2, &t).unwrap(), Scalar::one());
        assert_eq!(central_charge(&t).unwrap(), Scalar::zero());
    }

    #[test]
    fn candidates_from_c() {
        assert_eq!(t_candidates_from_c(&rat(-2, 1)).unwrap(), (rat(2, 1), rat(1, 2)));
        assert_eq!(t_candidates_from_c(&rat(0, 1)).unwrap(), (rat(3, 2), rat(2, 3)));
        assert_eq!(t_candidates_from_c(&rat(1, 1)).unwrap(), (rat(1, 1), rat(1, 1)));
        assert_eq!(t_candidates_from_c(&rat(1, 2)).unwrap(), (rat(4, 3), rat(3, 4)));
        assert!(matches!(
            t_candidates_from_c(&rat(2, 1)),
            Err(VirError::IrrationalRoots(_))
        ));
    }

    #[test]
    fn zero_parameter() {
        assert_eq!(central_charge(&Scalar::zero()), Err(VirError::ZeroParameter));
        assert_eq!(kac_weight(1, 1, &Scalar::zero()), Err(VirError::ZeroParameter));
    }

    #[test]
    fn function_arithmetic_canonicalises() {
        let t = Scalar::t();
        let x = (&t * &t - Scalar::one()) / (&t - Scalar::one());
        assert_eq!(x, &t + &Scalar::one());
        assert_eq!(&t / &t, Scalar::one());
        assert!((&t - &t).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let t = Scalar::t();
        let x = (Scalar::ratio(3, 2) * &t * &t - Scalar::ratio(1, 3)) / (Scalar::int(4) * &t);
        let j = x.to_json();
        assert_eq!(Scalar::from_json(&j).unwrap(), x);
        assert_eq!(j["num"], json!(["-2", "0", "9"]));
        assert_eq!(j["den"], json!(["0", "24"]));
        let r = Scalar::ratio(-7, 3);
        assert_eq!(r.to_json(), json!("-7/3"));
        assert_eq!(Scalar::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn factored_display() {
        let t = Scalar::t();
        let x = Scalar::int(4) * (&t * &t - Scalar::one());
        assert_eq!(x.factored(), "4 (t^2 - 1)");
        let y = Scalar::int(-3) * (Scalar::int(4) * &t * &t - Scalar::one()) / (&t * &t);
        assert_eq!(y.factored(), "-3 t^-2 (4t^2 - 1)");
    }

    #[test]
    fn roots() {
        let p = Poly::from_coeffs(vec![rat(-1, 1), rat(0, 1), rat(4, 1)]);
        assert_eq!(p.rational_roots(), vec![rat(-1, 2), rat(1, 2)]);
    }
}
