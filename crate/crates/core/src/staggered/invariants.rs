//! Beta invariants, admissible data and the projection onto the
//! submodule generated by the rank `rho - 1` singular vectors.
//!
//! The projection works on a vector `y` of a staggered module at grade `m`.
//! For each singular vector `X_s x` of rank at most `r - 2` (with `x` itself
//! as rank zero) it takes an orthogonal basis `Z_mu` of the grade `m - s`
//! piece of `V_{h+s}` modulo its rank-one singular vectors, and replaces `y`
//! by `y - sum_mu (zeta_mu / N_mu) Z_mu X_s x`, where `Z_mu^dag y = zeta_mu
//! X_s x` and `N_mu` is the norm of `Z_mu`. The subtracted vector lies in the
//! left module, so this is a gauge transformation.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use serde_json::{json, Value};

use crate::algebra::{decompose_against_l1l2, multiply, partitions, AlgebraElement, Partition};
use crate::error::{Result, VirError};
use crate::intersection::intersection_basis;
use crate::linalg::{self, coefficient_along, is_zero_vec, Matrix, Subspace, Vector};
use crate::scalars::Scalar;
use crate::structure::{classify, Branch, LatticeEntry, ModuleStructure};
use crate::verma::{
    act_element, act_words, annihilation_word, creation_word, GradedVector, HwModule, ModeAction,
    SingularSubmodule, VermaModule,
};

use super::module::{Data, StagVec, StaggeredModule};
use super::problem::{CaseTag, StaggeredProblem};

/// The beta invariants of a staggered module, one per rank `rho - 1`
/// singular vector surviving in the left module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaValue {
    None,
    Single(Scalar),
    /// `(beta_-, beta_+)`.
    Pair(Scalar, Scalar),
}

impl BetaValue {
    pub fn from_values(v: &[Scalar]) -> Result<Self> {
        match v {
            [] => Ok(BetaValue::None),
            [a] => Ok(BetaValue::Single(a.clone())),
            [a, b] => Ok(BetaValue::Pair(a.clone(), b.clone())),
            _ => Err(VirError::InvalidModule(format!("{} beta values given", v.len()))),
        }
    }

    pub fn values(&self) -> Vec<Scalar> {
        match self {
            BetaValue::None => Vec::new(),
            BetaValue::Single(a) => vec![a.clone()],
            BetaValue::Pair(a, b) => vec![a.clone(), b.clone()],
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BetaValue::None)
    }

    pub fn to_json(&self) -> Value {
        match self {
            BetaValue::None => json!({"kind": "none"}),
            BetaValue::Single(a) => json!({"kind": "single", "beta": a.to_json()}),
            BetaValue::Pair(a, b) => {
                json!({"kind": "pair", "beta-": a.to_json(), "beta+": b.to_json()})
            }
        }
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaValue::None => write!(f, "none"),
            BetaValue::Single(a) => write!(f, "beta = {a}"),
            BetaValue::Pair(a, b) => write!(f, "beta- = {a}, beta+ = {b}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Orthogonal complements

/// An orthogonal basis of a graded piece of `V_h` modulo its rank-one
/// singular vectors, over the quotient's basis partitions.
#[derive(Debug)]
pub struct OrthoBasis {
    pub parts: Vec<Partition>,
    pub z: Vec<Vector>,
    pub norms: Vec<Scalar>,
}

static ORTHO_CACHE: LazyLock<Mutex<HashMap<String, Arc<OrthoBasis>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Grades of the rank-one singular vectors of `V_h` up to `k`.
fn rank_one_grades(h: &Scalar, t: &Scalar, k: usize) -> Result<Vec<usize>> {
    let lat = classify(h, t, k.max(1))?;
    Ok(lat.of_rank(1).into_iter().map(|e| e.grade).filter(|&g| g <= k).collect())
}

pub fn complement_basis(h: &Scalar, t: &Scalar, k: usize) -> Result<Arc<OrthoBasis>> {
    let gens = rank_one_grades(h, t, k)?;
    let key = format!("{h}|{t}|{k}|{gens:?}");
    if let Some(b) = ORTHO_CACHE.lock().unwrap().get(&key) {
        return Ok(b.clone());
    }
    let module = HwModule::new(h, t, &gens)?;
    let parts = module.basis_partitions(k as i64);
    let (z, norms) = linalg::orthogonalise(&module.gram_matrix(k))?;
    let b = Arc::new(OrthoBasis { parts, z, norms });
    ORTHO_CACHE.lock().unwrap().insert(key, b.clone());
    Ok(b)
}

// ---------------------------------------------------------------------------
// Projection

/// Result of [`project`]: the projected vector and the left vector removed.
#[derive(Clone, Debug)]
pub struct Projected {
    pub y: StagVec,
    pub u: GradedVector,
}

/// Grades of the singular vectors the projection to rank `r` steps through.
fn sources(lattice: &ModuleStructure, r: usize, m: i64) -> Vec<usize> {
    if r < 2 {
        return Vec::new();
    }
    let mut out = vec![0];
    out.extend(
        lattice
            .entries
            .iter()
            .filter(|e| e.rank <= r - 2 && (e.grade as i64) <= m)
            .map(|e| e.grade),
    );
    out.sort();
    out
}

fn unit_at_zero() -> GradedVector {
    GradedVector { grade: 0, coords: vec![Scalar::one()] }
}

/// Image of `X_s x` in the left module; `x` for `s = 0`.
fn source_vector(left: &HwModule, s: usize) -> Result<Option<GradedVector>> {
    if s == 0 {
        Ok(Some(unit_at_zero()))
    } else {
        left.singular_image(s)
    }
}

/// Applies the projection to rank `r` to `y`; see the module docs.
pub fn project(
    module: &StaggeredModule,
    lattice: &ModuleStructure,
    y: &StagVec,
    r: usize,
) -> Result<Projected> {
    let left = module.left().clone();
    let m = y.grade;
    let mut y = y.clone();
    let mut u = GradedVector::zero(m, left.dim(m));
    for s in sources(lattice, r, m) {
        let Some(xs) = source_vector(&left, s)? else {
            return Err(VirError::Internal(format!("no singular vector at grade {s}")));
        };
        let k = (m - s as i64) as usize;
        let h = left.h() + &Scalar::int(s as i64);
        let basis = complement_basis(&h, left.t(), k)?;
        let ann: Vec<Vec<i32>> = basis.parts.iter().map(|p| annihilation_word(p)).collect();
        let lowered = act_words(module, &ann, &y);
        let mut weights = Vec::with_capacity(basis.z.len());
        for (z, n) in basis.z.iter().zip(&basis.norms) {
            let mut acc = module.zero(s as i64);
            for (k, v) in z.iter().zip(&lowered) {
                if !k.is_zero() {
                    acc.axpy(k, v);
                }
            }
            if !acc.is_left() {
                return Err(VirError::Internal("projection pairing has a right component".into()));
            }
            let zeta = if xs.is_zero() {
                if !is_zero_vec(&acc.left) {
                    return Err(VirError::Internal(format!(
                        "pairing at grade {s} is nonzero but the singular vector vanishes"
                    )));
                }
                Scalar::zero()
            } else {
                coefficient_along(&acc.left, &xs.coords, None)?
            };
            weights.push(zeta / n);
        }
        if weights.iter().all(Scalar::is_zero) {
            continue;
        }
        let cre: Vec<Vec<i32>> = basis.parts.iter().map(|p| creation_word(p)).collect();
        let raised = act_words(left.as_ref(), &cre, &xs);
        let mut shift = GradedVector::zero(m, left.dim(m));
        for (z, w) in basis.z.iter().zip(&weights) {
            if w.is_zero() {
                continue;
            }
            for (k, v) in z.iter().zip(&raised) {
                if !k.is_zero() {
                    shift.axpy(&(k * w), v);
                }
            }
        }
        linalg::axpy(&mut y.left, &Scalar::int(-1), &shift.coords);
        u.axpy(&Scalar::one(), &shift);
    }
    Ok(Projected { y, u })
}

/// Coefficient of `chi^dag y` along `X_e x`, where `chi X_e` is the
/// singular vector at grade `y.grade` of the left Verma module. For a plus
/// entry of a braid the coefficient is taken modulo the submodule
/// generated by the minus entry of the same rank.
pub fn extract_beta(
    module: &StaggeredModule,
    lattice: &ModuleStructure,
    y: &StagVec,
    e: &LatticeEntry,
) -> Result<Scalar> {
    let left = module.left().clone();
    let k = y.grade - e.grade as i64;
    if k < 0 {
        return Err(VirError::Internal("beta entry lies above the vector".into()));
    }
    let k = k as usize;
    let h = left.h() + &Scalar::int(e.grade as i64);
    let chi = VermaModule::new(&h, left.t())?.singular_coords(k)?.ok_or_else(|| {
        VirError::Internal(format!("V_{h} has no singular vector at grade {k}"))
    })?;
    let parts = partitions(k);
    let mut words = Vec::new();
    let mut coeffs = Vec::new();
    for (p, a) in parts.list.iter().zip(chi.iter()) {
        if !a.is_zero() {
            words.push(annihilation_word(p));
            coeffs.push(a.clone());
        }
    }
    let lowered = act_words(module, &words, y);
    let mut v = module.zero(e.grade as i64);
    for (a, w) in coeffs.iter().zip(&lowered) {
        v.axpy(a, w);
    }
    if !v.is_left() {
        return Err(VirError::Internal("beta pairing has a right component".into()));
    }
    let xe = left
        .singular_image(e.grade)?
        .ok_or_else(|| VirError::Internal(format!("no singular vector at grade {}", e.grade)))?;
    let modulo = minus_partner_span(&left, lattice, e)?;
    coefficient_along(&v.left, &xe.coords, modulo.as_deref())
}

/// For a plus entry, the grade `e` piece of the submodule generated by the
/// minus entry of the same rank, if that vector survives in `left`.
fn minus_partner_span(
    left: &Arc<HwModule>,
    lattice: &ModuleStructure,
    e: &LatticeEntry,
) -> Result<Option<Arc<Subspace>>> {
    if e.branch != Some(Branch::Plus) {
        return Ok(None);
    }
    let Some(minus) = lattice.of_rank(e.rank).into_iter().find(|x| x.branch == Some(Branch::Minus))
    else {
        return Ok(None);
    };
    match left.singular_image(minus.grade)? {
        Some(v) if !v.is_zero() => {
            let sub = SingularSubmodule::new(left.clone(), vec![v]);
            Ok(Some(sub.span(e.grade as i64)))
        }
        _ => Ok(None),
    }
}

/// The beta invariants of the staggered module with data `d` (and Verma
/// right module).
pub fn beta_invariants(p: &StaggeredProblem, d: &Data) -> Result<BetaValue> {
    if p.rho() == 0 {
        return Err(VirError::UndefinedInvariant("ell = 0 has no beta invariants".into()));
    }
    let module = p.module(d)?;
    let proj = project(&module, p.lattice(), &module.y(), p.rho())?;
    let mut vals = Vec::new();
    for e in p.beta_entries()? {
        vals.push(extract_beta(&module, p.lattice(), &proj.y, &e)?);
    }
    BetaValue::from_values(&vals)
}

/// `<x, X^dag y>` for the creation element `X` with `omega_0 = X x`. This
/// is the beta invariant when `omega_0` has rank one and vanishes otherwise.
pub fn naive_beta(p: &StaggeredProblem, d: &Data) -> Result<Scalar> {
    let module = p.module(d)?;
    let x = p.singular_element(0, p.ell())?;
    let v = act_element(&module, &x.adjoint(), &module.y())?;
    if !v.is_left() {
        return Err(VirError::Internal("naive pairing has a right component".into()));
    }
    Ok(v.left.first().cloned().unwrap_or_else(Scalar::zero))
}

// ---------------------------------------------------------------------------
// Gauge transformations and admissibility

/// `(omega_1 + L_1 u, omega_2 + L_2 u)`.
pub fn gauge_apply(p: &StaggeredProblem, u: &GradedVector, d: &Data) -> Result<Data> {
    if u.grade != p.ell() as i64 || u.coords.len() != p.left().dim(u.grade) {
        return Err(VirError::InvalidModule("gauge vector has the wrong grade".into()));
    }
    let left = p.left();
    Ok(Data {
        omega1: d.omega1.add(&left.apply_mode(1, u)),
        omega2: d.omega2.add(&left.apply_mode(2, u)),
    })
}

/// All coordinates of `U_1 omega_1 + U_2 omega_2` over the relation bases
/// at grades `5..=ell`.
fn omega_residuals(p: &StaggeredProblem, d: &Data) -> Result<Vector> {
    let left = p.left();
    let mut out = Vec::new();
    for m in 5..=p.ell() {
        for (u1, u2) in intersection_basis(m, p.c()) {
            let a = act_element(left.as_ref(), &u1, &d.omega1)?;
            let b = act_element(left.as_ref(), &u2, &d.omega2)?;
            out.extend(a.add(&b).coords);
        }
    }
    Ok(out)
}

/// Whether `d` passes every relation of the annihilator intersection, which
/// characterises data of staggered modules with a Verma right module.
pub fn is_admissible_right_verma(p: &StaggeredProblem, d: &Data) -> Result<bool> {
    p.check_data_shape(d)?;
    Ok(is_zero_vec(&omega_residuals(p, d)?))
}

/// Subtracts the projection from `y` and returns the gauge vector `u` with
/// `gauge_apply(u, d)` the projected data.
pub fn project_data(p: &StaggeredProblem, d: &Data) -> Result<(GradedVector, Data)> {
    let module = p.module(d)?;
    let proj = project(&module, p.lattice(), &module.y(), p.rho())?;
    let w1 = module.apply_mode(1, &proj.y);
    let w2 = module.apply_mode(2, &proj.y);
    if !w1.is_left() || !w2.is_left() {
        return Err(VirError::Internal("projected data has a right component".into()));
    }
    let u = proj.u.scale(&Scalar::int(-1));
    Ok((u, Data { omega1: w1.left_part(), omega2: w2.left_part() }))
}

/// The submodule of the left module generated by the beta entries.
pub fn target_submodule(p: &StaggeredProblem) -> Result<SingularSubmodule> {
    let mut gens = Vec::new();
    for e in p.beta_entries()? {
        if e.grade == 0 {
            gens.push(unit_at_zero());
        } else if let Some(v) = p.left().singular_image(e.grade)? {
            gens.push(v);
        }
    }
    Ok(SingularSubmodule::new(p.left().clone(), gens))
}

/// Data built from coordinates over bases of `M_{ell-1}` and `M_{ell-2}`.
fn data_on(p: &StaggeredProblem, b1: &[Vector], b2: &[Vector], coords: &[Scalar]) -> Data {
    let mut d = p.zero_data();
    for (k, v) in coords[..b1.len()].iter().zip(b1) {
        linalg::axpy(&mut d.omega1.coords, k, v);
    }
    for (k, v) in coords[b1.len()..].iter().zip(b2) {
        linalg::axpy(&mut d.omega2.coords, k, v);
    }
    d
}

fn unit_coords(n: usize) -> Vec<Vector> {
    (0..n).map(|i| linalg::unit_vec(n, i)).collect()
}

/// Nullspace of a linear map on data, given by its values on a basis.
fn kernel_of<F>(basis: &[Data], mut f: F) -> Result<Vec<Data>>
where
    F: FnMut(&Data) -> Result<Vector>,
{
    let cols: Vec<Vector> = basis.iter().map(&mut f).collect::<Result<_>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    let mat: Matrix =
        (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(linalg::nullspace(&mat, basis.len())
        .into_iter()
        .map(|v| combine(basis, &v))
        .collect())
}

fn combine(basis: &[Data], v: &[Scalar]) -> Data {
    let mut it = basis.iter().zip(v);
    let (b0, k0) = it.next().expect("nonempty basis");
    let mut d = b0.scale(k0);
    for (b, k) in it {
        d = d.add(&b.scale(k));
    }
    d
}

/// Basis of the data in `M_{ell-1} + M_{ell-2}` that passes the relation
/// test; modulo gauge transformations inside `M_ell` this is the moduli
/// space of staggered modules with a Verma right module.
pub fn admissible_subspace(p: &StaggeredProblem) -> Result<Vec<Data>> {
    let m_basis = target_basis(p)?;
    if m_basis.is_empty() {
        return Ok(Vec::new());
    }
    kernel_of(&m_basis, |d| omega_residuals(p, d))
}

/// Basis of `M_{ell-1} + M_{ell-2}` as data.
fn target_basis(p: &StaggeredProblem) -> Result<Vec<Data>> {
    let sub = target_submodule(p)?;
    let l = p.ell() as i64;
    let s1 = sub.span(l - 1);
    let s2 = sub.span(l - 2);
    let (b1, b2) = (s1.basis().to_vec(), s2.basis().to_vec());
    let n = b1.len() + b2.len();
    Ok(unit_coords(n).iter().map(|c| data_on(p, &b1, &b2, c)).collect())
}

/// The admissible data together with its beta invariants, for repeated
/// solves.
#[derive(Clone, Debug)]
pub struct DataSpace {
    pub basis: Vec<Data>,
    /// One row per beta invariant, one column per basis vector.
    pub beta_matrix: Matrix,
    zero: Data,
}

impl DataSpace {
    pub fn new(p: &StaggeredProblem) -> Result<Self> {
        let basis = if p.rho() == 0 { Vec::new() } else { admissible_subspace(p)? };
        let nb = p.b();
        let mut beta_matrix = vec![Vec::with_capacity(basis.len()); nb];
        for d in &basis {
            let vals = beta_invariants(p, d)?.values();
            for (row, v) in beta_matrix.iter_mut().zip(vals) {
                row.push(v);
            }
        }
        Ok(DataSpace { basis, beta_matrix, zero: p.zero_data() })
    }

    /// Dimension of the moduli space implied by the data: `dim D' - (dim
    /// M_ell - 1)` is checked against the number of invariants by callers.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Admissible data with the given invariants.
    pub fn data_for(&self, target: &BetaValue) -> Result<Data> {
        let t = target.values();
        if t.len() != self.beta_matrix.len() {
            if self.beta_matrix.is_empty() {
                return Err(VirError::NoSolution("there are no beta invariants".into()));
            }
            return Err(VirError::InvalidModule(format!(
                "expected {} beta values, got {}",
                self.beta_matrix.len(),
                t.len()
            )));
        }
        if self.basis.is_empty() {
            return Ok(self.zero.clone());
        }
        let sol = linalg::solve(&self.beta_matrix, self.basis.len(), &t)
            .map_err(|e| VirError::NoSolution(e.to_string()))?;
        Ok(combine(&self.basis, &sol.particular))
    }
}

/// Representative admissible data with the requested beta invariants.
pub fn data_from_beta(p: &StaggeredProblem, target: &BetaValue) -> Result<Data> {
    DataSpace::new(p)?.data_for(target)
}

/// Number of beta invariants and the case tag.
pub fn moduli_dimension(p: &StaggeredProblem) -> (usize, CaseTag) {
    (p.b(), p.case())
}

// ---------------------------------------------------------------------------
// The functionals psi

/// `U_1 omega_1 + U_2 omega_2` read along `X_e x`, reduced modulo the minus
/// partner for a plus entry. Defined when the left side lies in the
/// submodule generated by `X_e x` (and the partner).
pub fn psi_value(
    p: &StaggeredProblem,
    d: &Data,
    e: &LatticeEntry,
    rel: &(AlgebraElement, AlgebraElement),
) -> Result<Scalar> {
    let left = p.left();
    let a = act_element(left.as_ref(), &rel.0, &d.omega1)?;
    let b = act_element(left.as_ref(), &rel.1, &d.omega2)?;
    let v = a.add(&b);
    if v.grade != e.grade as i64 {
        return Err(VirError::Internal("relation has the wrong grade".into()));
    }
    let xe = source_vector(left, e.grade)?
        .ok_or_else(|| VirError::Internal(format!("no singular vector at grade {}", e.grade)))?;
    let modulo = minus_partner_span(left, p.lattice(), e)?;
    coefficient_along(&v.coords, &xe.coords, modulo.as_deref())
}

/// The decomposition `chi^dag = Y_1 L_1 + Y_2 L_2` for a beta entry.
pub fn chi_decomposition(
    p: &StaggeredProblem,
    e: &LatticeEntry,
) -> Result<(AlgebraElement, AlgebraElement)> {
    let chi = p.singular_element(e.grade, p.ell() - e.grade)?;
    decompose_against_l1l2(&chi.adjoint())
}

/// The beta invariants computed as `Y_1 omega_1 + Y_2 omega_2` along `X_e
/// x`. Agrees with [`beta_invariants`] on data inside the target submodule.
pub fn beta_from_decomposition(p: &StaggeredProblem, d: &Data) -> Result<BetaValue> {
    let mut vals = Vec::new();
    for e in p.beta_entries()? {
        let rel = chi_decomposition(p, &e)?;
        vals.push(psi_value(p, d, &e, &rel)?);
    }
    BetaValue::from_values(&vals)
}

/// Data in `M_{ell-1} + M_{ell-2}` on which every psi functional vanishes:
/// first the relations at grade `e - ell` for each beta entry `e`, then in
/// the primed cases those at the grade of the same-rank minus vector.
pub fn psi_kernel(p: &StaggeredProblem) -> Result<Vec<Data>> {
    let mut basis = target_basis(p)?;
    let ell = p.ell();
    let c = p.c().clone();
    for e in p.beta_entries()? {
        if basis.is_empty() {
            return Ok(basis);
        }
        let rels = intersection_basis(ell - e.grade, &c);
        basis = kernel_of(&basis, |d| rels.iter().map(|r| psi_value(p, d, &e, r)).collect())?;
    }
    if matches!(p.case(), CaseTag::OnePrime | CaseTag::TwoPrime) && !basis.is_empty() {
        let minus = p
            .lattice()
            .of_rank(p.rho())
            .into_iter()
            .find(|x| x.branch == Some(Branch::Minus))
            .ok_or_else(|| VirError::Internal("primed case without a minus vector".into()))?;
        let rels = intersection_basis(ell - minus.grade, &c);
        basis =
            kernel_of(&basis, |d| rels.iter().map(|r| psi_value(p, d, &minus, r)).collect())?;
    }
    Ok(basis)
}

// ---------------------------------------------------------------------------
// Operator form

/// One step of the projection: the singular vector `X_s x` it acts on and
/// the orthogonal complement used there.
#[derive(Clone, Debug)]
pub struct ProjectionStep {
    pub source: usize,
    pub elements: Vec<AlgebraElement>,
    pub norms: Vec<Scalar>,
}

/// The steps of the projection for `p` and, when every step acts on `x`
/// itself, the operator `prod (1 - sum Z Z^dag / N)` acting on `y`.
pub fn projection_operator(
    p: &StaggeredProblem,
) -> Result<(Vec<ProjectionStep>, Option<AlgebraElement>)> {
    let c = p.c().clone();
    let m = p.ell() as i64;
    let mut steps = Vec::new();
    for s in sources(p.lattice(), p.rho(), m) {
        let h = p.left().h() + &Scalar::int(s as i64);
        let basis = complement_basis(&h, p.t(), (m - s as i64) as usize)?;
        let elements = basis
            .z
            .iter()
            .map(|z| {
                let mut e = AlgebraElement::zero(&c);
                for (part, k) in basis.parts.iter().zip(z) {
                    if !k.is_zero() {
                        e = e.add(&AlgebraElement::word(&c, &creation_word(part)).scale(k))?;
                    }
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        steps.push(ProjectionStep { source: s, elements, norms: basis.norms.clone() });
    }
    if steps.iter().any(|s| s.source != 0) {
        return Ok((steps, None));
    }
    let mut op = AlgebraElement::one(&c);
    for st in &steps {
        let mut factor = AlgebraElement::one(&c);
        for (z, n) in st.elements.iter().zip(&st.norms) {
            let zz = multiply(z, &z.adjoint())?;
            factor = factor.sub(&zz.scale(&n.recip()))?;
        }
        op = multiply(&factor, &op)?;
    }
    Ok((steps, Some(op)))
}
