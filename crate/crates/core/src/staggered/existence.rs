//! Existence of staggered modules with a quotiented right module.
//!
//! A staggered module with right module `V_{h^R} / (U Xbar y)` exists iff
//! the module with the Verma right module and the same beta invariants has
//! a singular vector `Xbar y - varpi`. When the left module keeps some rank
//! `rho + rho_bar - 1` singular vectors (the critical rank), this imposes
//! affine conditions on the beta invariants, computed here in the module
//! whose left and right modules are both Verma.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Result, VirError};
use crate::linalg::{self, Matrix, Vector};
use crate::scalars::{kac_weight, t_fraction, Rational, Scalar};
use crate::structure::{classify, kac_labels, left_right_compatible, LatticeEntry};
use crate::verma::{act_element, GradedVector, HwModule, ModeAction, VermaModule};

use super::invariants::{extract_beta, project, BetaValue, DataSpace};
use super::module::{Data, StaggeredModule};
use super::problem::{singular_element, StaggeredProblem};

/// `sum_i coeffs[i] beta_i + offset`, required to vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineConstraint {
    pub coeffs: Vec<Scalar>,
    pub offset: Scalar,
}

impl AffineConstraint {
    pub fn eval(&self, beta: &[Scalar]) -> Scalar {
        self.coeffs.iter().zip(beta).map(|(a, b)| a * b).sum::<Scalar>() + &self.offset
    }

    pub fn is_trivial(&self) -> bool {
        self.offset.is_zero() && self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coeffs": self.coeffs.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "offset": self.offset.to_json(),
        })
    }
}

impl fmt::Display for AffineConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = match self.coeffs.len() {
            1 => vec!["beta"],
            _ => vec!["beta-", "beta+"],
        };
        let mut first = true;
        for (k, n) in self.coeffs.iter().zip(names) {
            if k.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({k}) {n}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.offset)?;
        } else if !self.offset.is_zero() {
            write!(f, " + ({})", self.offset)?;
        }
        write!(f, " = 0")
    }
}

/// The set of beta invariants for which a staggered module exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaggeredAnswer {
    Empty {
        reason: String,
    },
    /// `offset + span(directions)` inside the `beta_dim`-dimensional space
    /// of beta invariants.
    Affine {
        beta_dim: usize,
        labels: Vec<String>,
        constraints: Vec<AffineConstraint>,
        offset: Vec<Scalar>,
        directions: Vec<Vector>,
    },
}

impl StaggeredAnswer {
    pub fn exists(&self) -> bool {
        matches!(self, StaggeredAnswer::Affine { .. })
    }

    /// Dimension of the space of isomorphism classes, if nonempty.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            StaggeredAnswer::Empty { .. } => None,
            StaggeredAnswer::Affine { directions, .. } => Some(directions.len()),
        }
    }

    /// Whether the beta value `beta` lies in the answer.
    pub fn contains(&self, beta: &[Scalar]) -> bool {
        match self {
            StaggeredAnswer::Empty { .. } => false,
            StaggeredAnswer::Affine { constraints, beta_dim, .. } => {
                beta.len() == *beta_dim && constraints.iter().all(|c| c.eval(beta).is_zero())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            StaggeredAnswer::Empty { reason } => json!({"status": "empty", "reason": reason}),
            StaggeredAnswer::Affine { beta_dim, labels, constraints, offset, directions } => json!({
                "status": "affine",
                "beta_dim": beta_dim,
                "labels": labels,
                "constraints": constraints.iter().map(AffineConstraint::to_json).collect::<Vec<_>>(),
                "solutions": {
                    "dimension": directions.len(),
                    "point": offset.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                    "directions": directions
                        .iter()
                        .map(|d| d.iter().map(Scalar::to_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                },
            }),
        }
    }
}

impl fmt::Display for StaggeredAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StaggeredAnswer::Empty { reason } => write!(f, "no staggered module: {reason}"),
            StaggeredAnswer::Affine { beta_dim, labels, constraints, offset, directions } => {
                writeln!(f, "staggered modules exist; {} beta invariant(s)", beta_dim)?;
                for c in constraints.iter().filter(|c| !c.is_trivial()) {
                    writeln!(f, "  constraint: {c}")?;
                }
                write!(f, "  solution dimension {}", directions.len())?;
                if directions.is_empty() && !labels.is_empty() {
                    write!(f, ":")?;
                    for (l, v) in labels.iter().zip(offset) {
                        write!(f, " {l} = {v}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Solves a constraint system in `b` unknowns.
pub fn solve_constraints(
    b: usize,
    labels: Vec<String>,
    constraints: Vec<AffineConstraint>,
) -> StaggeredAnswer {
    let rows: Matrix = constraints.iter().map(|c| c.coeffs.clone()).collect();
    let rhs: Vector = constraints.iter().map(|c| -&c.offset).collect();
    match linalg::solve(&rows, b, &rhs) {
        Ok(sol) => StaggeredAnswer::Affine {
            beta_dim: b,
            labels,
            constraints,
            offset: sol.particular,
            directions: sol.kernel,
        },
        Err(_) => StaggeredAnswer::Empty {
            reason: "the critical-rank invariants cannot all vanish".into(),
        },
    }
}

/// Whether two answers describe the same subset of beta space.
pub fn same_region(a: &StaggeredAnswer, b: &StaggeredAnswer) -> bool {
    use StaggeredAnswer::*;
    match (a, b) {
        (Empty { .. }, Empty { .. }) => true,
        (
            Affine { beta_dim: da, offset: oa, directions: va, .. },
            Affine { beta_dim: db, offset: ob, directions: vb, .. },
        ) => {
            if da != db || va.len() != vb.len() {
                return false;
            }
            let sa = linalg::Subspace::spanned_by(*da, va.iter());
            vb.iter().all(|v| sa.contains(v)) && sa.contains(&linalg::sub_vec(oa, ob))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// varpi

fn right_singular(p: &StaggeredProblem, gen_idx: usize) -> Result<(usize, crate::algebra::AlgebraElement)> {
    let g = *p
        .right()
        .generator_grades()
        .get(gen_idx)
        .ok_or_else(|| VirError::InvalidModule(format!("no right generator {gen_idx}")))?;
    Ok((g, singular_element(p.right().h(), p.t(), g)?))
}

/// The left vector `varpi` with `Xbar y - varpi` singular, where `Xbar` is
/// the `gen_idx`-th generator of the right module. Fails with
/// [`VirError::InconsistentSystem`] when no such vector exists.
pub fn varpi(p: &StaggeredProblem, d: &Data, gen_idx: usize) -> Result<GradedVector> {
    let module = p.module(d)?;
    let (_, xbar) = right_singular(p, gen_idx)?;
    let ybar = act_element(&module, &xbar, &module.y())?;
    let w1 = module.apply_mode(1, &ybar);
    let w2 = module.apply_mode(2, &ybar);
    if !w1.is_left() || !w2.is_left() {
        return Err(VirError::Internal("Xbar y is not singular in the right module".into()));
    }
    let left = p.left();
    let m = ybar.grade;
    let n = left.dim(m);
    let (d1, d2) = (left.dim(m - 1), left.dim(m - 2));
    let mut a: Matrix = vec![Vec::with_capacity(n); d1 + d2];
    for i in 0..n {
        let e = GradedVector { grade: m, coords: linalg::unit_vec(n, i) };
        let col: Vector =
            left.apply_mode(1, &e).coords.into_iter().chain(left.apply_mode(2, &e).coords).collect();
        for (row, x) in a.iter_mut().zip(col) {
            row.push(x);
        }
    }
    let rhs: Vector = w1.left.into_iter().chain(w2.left).collect();
    let coords = linalg::solve_unique(&a, n, &rhs)?;
    Ok(GradedVector { grade: m, coords })
}

/// The witnesses `varpi` for every right generator, in the module with
/// the given beta invariants, or `None` if one of them fails to exist.
pub fn oracle_singular(p: &StaggeredProblem, target: &BetaValue) -> Result<Option<Vec<GradedVector>>> {
    let d = DataSpace::new(&p.with_right_verma()?)?.data_for(target)?;
    oracle_with_data(p, &d)
}

fn oracle_with_data(p: &StaggeredProblem, d: &Data) -> Result<Option<Vec<GradedVector>>> {
    let mut out = Vec::new();
    for i in 0..p.right().generator_grades().len() {
        match varpi(p, d, i) {
            Ok(v) => out.push(v),
            Err(VirError::InconsistentSystem(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

/// The existence region computed from the singular vector search alone:
/// the right-hand sides `(L_1 Xbar y, L_2 Xbar y)` are affine in the beta
/// invariants, and must lie in the image of `(L_1, L_2)` on the left
/// module.
pub fn oracle_answer(p: &StaggeredProblem) -> Result<StaggeredAnswer> {
    let s = p.with_right_verma()?;
    let space = DataSpace::new(&s)?;
    let b = p.b();
    let ds = basis_data(&space, b)?;
    let left = p.left();
    let mut constraints = Vec::new();
    for i in 0..p.right().generator_grades().len() {
        let (_, xbar) = right_singular(p, i)?;
        let mut rhs_list = Vec::new();
        for d in &ds {
            let module = p.module(d)?;
            let ybar = act_element(&module, &xbar, &module.y())?;
            let w1 = module.apply_mode(1, &ybar);
            let w2 = module.apply_mode(2, &ybar);
            rhs_list.push(w1.left.into_iter().chain(w2.left).collect::<Vector>());
        }
        let m = ybar_grade(p, i);
        let n = left.dim(m);
        let rows = left.dim(m - 1) + left.dim(m - 2);
        let mut a: Matrix = vec![Vec::with_capacity(n); rows];
        for j in 0..n {
            let e = GradedVector { grade: m, coords: linalg::unit_vec(n, j) };
            let col: Vector = left
                .apply_mode(1, &e)
                .coords
                .into_iter()
                .chain(left.apply_mode(2, &e).coords)
                .collect();
            for (row, x) in a.iter_mut().zip(col) {
                row.push(x);
            }
        }
        for nv in linalg::left_nullspace(&a, n) {
            let vals: Vec<Scalar> = rhs_list.iter().map(|r| linalg::dot(&nv, r)).collect();
            let offset = vals[0].clone();
            let coeffs = vals[1..].iter().map(|v| v - &offset).collect();
            let c = AffineConstraint { coeffs, offset };
            if !c.is_trivial() {
                constraints.push(c);
            }
        }
    }
    Ok(solve_constraints(b, p.beta_labels()?, constraints))
}

fn ybar_grade(p: &StaggeredProblem, i: usize) -> i64 {
    (p.ell() + p.right().generator_grades()[i]) as i64
}

/// Data with beta invariants zero, then each unit vector in turn.
fn basis_data(space: &DataSpace, b: usize) -> Result<Vec<Data>> {
    let mut out = Vec::with_capacity(b + 1);
    let zero = vec![Scalar::zero(); b];
    out.push(space.data_for(&BetaValue::from_values(&zero)?)?);
    for i in 0..b {
        let mut v = zero.clone();
        v[i] = Scalar::one();
        out.push(space.data_for(&BetaValue::from_values(&v)?)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Critical rank

/// The affine conditions on the beta invariants, one per right generator
/// and surviving rank `rho + rho_bar - 1` singular vector, in generator
/// order and minus before plus. Empty outside the critical rank.
pub fn critical_constraints(p: &StaggeredProblem) -> Result<Vec<AffineConstraint>> {
    let compat = p.compatibility();
    let (Some(g), Some(rho_bar)) = (compat.g, compat.rho_bar) else {
        return Ok(Vec::new());
    };
    if compat.n == 0 || g == 0 {
        return Ok(Vec::new());
    }
    if !p.t().is_rational() {
        return Err(VirError::Unsupported(
            "critical-rank invariants need a rational value of t".into(),
        ));
    }
    let r = p.rho() + rho_bar;
    let targets: Vec<LatticeEntry> = {
        let mut v = Vec::new();
        for e in p.lattice().of_rank(r - 1) {
            if p.left().singular_image(e.grade)?.is_some_and(|x| !x.is_zero()) {
                v.push(e);
            }
        }
        v
    };
    let verma_problem = p.with_verma_modules()?;
    let space = DataSpace::new(&verma_problem)?;
    let ds = basis_data(&space, verma_problem.b())?;
    let modules: Vec<StaggeredModule> =
        ds.iter().map(|d| verma_problem.module(d)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..p.right().generator_grades().len() {
        let (_, xbar) = right_singular(p, i)?;
        let vals: Vec<Vec<Scalar>> = modules
            .par_iter()
            .map(|module| {
                let ybar = act_element(module, &xbar, &module.y())?;
                let proj = project(module, p.lattice(), &ybar, r)?;
                targets.iter().map(|e| extract_beta(module, p.lattice(), &proj.y, e)).collect()
            })
            .collect::<Result<_>>()?;
        for (k, _) in targets.iter().enumerate() {
            let offset = vals[0][k].clone();
            let coeffs = vals[1..].iter().map(|v| &v[k] - &offset).collect();
            out.push(AffineConstraint { coeffs, offset });
        }
    }
    Ok(out)
}

/// Decides which staggered modules with the given left and right modules
/// exist.
pub fn exists(left: &Arc<HwModule>, right: &Arc<HwModule>) -> Result<StaggeredAnswer> {
    let compat = left_right_compatible(left, right)?;
    if !compat.compatible {
        return Ok(StaggeredAnswer::Empty { reason: compat.reason.unwrap_or_default() });
    }
    let p = StaggeredProblem::new(left.clone(), right.clone())?;
    let constraints = critical_constraints(&p)?;
    Ok(solve_constraints(p.b(), p.beta_labels()?, constraints))
}

// ---------------------------------------------------------------------------
// Vanishing beta invariants and ell = 0

/// Existence criterion for all beta invariants zero and a prime `Xbar` of
/// minimal grade: `h = h_{r,s}` with `t = q/p`, `p | r`, `|q| | s` and
/// `p s != |q| r`, tested on the Kac labels of minimal product.
pub fn rohsiepe_exists(h: &Scalar, t: &Scalar) -> Result<bool> {
    let tr = t.as_rational().ok_or(VirError::NonRationalT)?;
    let (p, q) = t_fraction(tr)?;
    let q = q.abs();
    let mut bound = 4usize;
    let labels = loop {
        let l = kac_labels(h, t, bound)?;
        if !l.is_empty() || bound > 1 << 14 {
            break l;
        }
        bound *= 4;
    };
    let Some(&(r0, s0)) = labels.first() else {
        return Ok(false);
    };
    let min = r0 * s0;
    Ok(labels
        .iter()
        .filter(|&&(r, s)| r * s == min)
        .any(|&(r, s)| r % p == 0 && s % q == 0 && p * s != q * r))
}

/// `Xbar^dag Xbar y` along `x` in the staggered module with `ell = 0` and
/// both modules `V_h`, `h = h_{r,s}(t)`, over rational functions of `t`.
pub fn generic_beta_bar(r: i64, s: i64) -> Result<Scalar> {
    let t = Scalar::t();
    let h = kac_weight(r, s, &t)?;
    beta_bar_at(&h, &t, (r * s) as usize)
}

fn beta_bar_at(h: &Scalar, t: &Scalar, grade: usize) -> Result<Scalar> {
    let left = HwModule::verma_of(h, t)?;
    let right = VermaModule::new(h, t)?;
    let x = GradedVector { grade: 0, coords: vec![Scalar::one()] };
    let module = StaggeredModule::new(left.clone(), right, 0, x, Data::zero(&left, 0));
    let xbar = singular_element(h, t, grade)?;
    let ybar = act_element(&module, &xbar, &module.y())?;
    let v = act_element(&module, &xbar.adjoint(), &ybar)?;
    if !v.is_left() {
        return Err(VirError::Internal("Xbar^dag Xbar y has a right component".into()));
    }
    Ok(v.left[0].clone())
}

/// One row of the generic table: the labels, `beta_bar'` and the nonzero
/// rational `t` where it vanishes and `Xbar` stays prime.
#[derive(Clone, Debug)]
pub struct GenericRow {
    pub r: i64,
    pub s: i64,
    pub beta_bar: Scalar,
    pub existence: Vec<Rational>,
}

impl GenericRow {
    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "s": self.s,
            "beta_bar": self.beta_bar.to_json(),
            "factored": self.beta_bar.factored(),
            "existence": self.existence.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// The labels tabulated by default.
pub const GENERIC_ROWS: [(i64, i64); 8] =
    [(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (2, 2), (3, 2)];

pub fn generic_row(r: i64, s: i64) -> Result<GenericRow> {
    let beta_bar = generic_beta_bar(r, s)?;
    let roots = match &beta_bar {
        Scalar::Rat(_) => Vec::new(),
        Scalar::Fun(f) => f.num().rational_roots(),
    };
    let grade = (r * s) as usize;
    let mut existence = Vec::new();
    for t0 in roots {
        if t0 == Rational::from_integer(0.into()) {
            continue;
        }
        let t = Scalar::from(t0.clone());
        let h = kac_weight(r, s, &t)?;
        let prime = classify(&h, &t, grade)?.rank_at(grade) == Some(1);
        if prime {
            existence.push(t0);
        }
    }
    existence.sort();
    Ok(GenericRow { r, s, beta_bar, existence })
}

/// `beta_bar'` at a rational `t`, for cross-checks against the generic row.
pub fn beta_bar_at_t(r: i64, s: i64, t: &Scalar) -> Result<Scalar> {
    let h = kac_weight(r, s, t)?;
    beta_bar_at(&h, t, (r * s) as usize)
}
