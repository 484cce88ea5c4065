//! Verma modules and their quotients by singular vectors.
//!
//! Vectors at grade `n` are coordinate vectors over the partition basis
//! `L_{-lambda} x`. Mode actions on basis vectors are memoised per module,
//! and modules are shared through a registry keyed by `(h, t)`, so repeated
//! constructions reuse earlier work.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use serde_json::{json, Value};

use crate::algebra::{partition_count, partitions, AlgebraElement, Partition};
use crate::error::{Result, VirError};
use crate::linalg::{self, is_zero_vec, zero_vec, Subspace, Vector};
use crate::scalars::{central_charge, Scalar};
use crate::structure;

pub type SparseVec = Vec<(usize, Scalar)>;

/// A homogeneous vector: coordinates at a grade above the highest weight.
/// Negative grades are allowed and always carry the zero vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVector {
    pub grade: i64,
    pub coords: Vector,
}

impl GradedVector {
    pub fn zero(grade: i64, dim: usize) -> Self {
        GradedVector { grade, coords: zero_vec(dim) }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        GradedVector { grade: self.grade, coords: linalg::scale_vec(&self.coords, k) }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.grade, o.grade, "adding vectors of different grades");
        GradedVector { grade: self.grade, coords: linalg::add_vec(&self.coords, &o.coords) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn axpy(&mut self, k: &Scalar, o: &Self) {
        assert_eq!(self.grade, o.grade, "adding vectors of different grades");
        linalg::axpy(&mut self.coords, k, &o.coords);
    }
}

/// Something the Virasoro modes act on, one mode at a time.
pub trait ModeAction {
    type V: Clone;
    fn apply_mode(&self, n: i32, v: &Self::V) -> Self::V;
    fn zero_at(&self, grade: i64) -> Self::V;
    fn grade_of(&self, v: &Self::V) -> i64;
    fn accumulate(&self, acc: &mut Self::V, k: &Scalar, v: &Self::V);
    fn central_charge(&self) -> &Scalar;
}

/// Applies a homogeneous algebra element (or zero) to `v`. Words sharing a
/// suffix share the work of applying it.
pub fn act_element<R: ModeAction + ?Sized>(r: &R, e: &AlgebraElement, v: &R::V) -> Result<R::V> {
    if e.central_charge() != r.central_charge() {
        return Err(VirError::ContextMismatch);
    }
    let shift = match e.grade() {
        Some(g) => g,
        None if e.is_zero() => 0,
        None => {
            return Err(VirError::InvalidModule("element is not homogeneous".into()));
        }
    };
    let words: Vec<Vec<i32>> = e.terms().map(|(m, _)| m.word()).collect();
    let images = act_words(r, &words, v);
    let mut acc = r.zero_at(r.grade_of(v) + shift);
    for ((_, k), w) in e.terms().zip(&images) {
        r.accumulate(&mut acc, k, w);
    }
    Ok(acc)
}

/// Applies each word of modes (rightmost first) to `v`, sharing suffixes.
pub fn act_words<R: ModeAction + ?Sized>(r: &R, words: &[Vec<i32>], v: &R::V) -> Vec<R::V> {
    let mut memo: HashMap<Vec<i32>, R::V> = HashMap::new();
    words
        .iter()
        .map(|w| {
            let mut cur = v.clone();
            for i in (0..w.len()).rev() {
                let suffix = &w[i..];
                cur = match memo.get(suffix) {
                    Some(x) => x.clone(),
                    None => {
                        let x = r.apply_mode(w[i], &cur);
                        memo.insert(suffix.to_vec(), x.clone());
                        x
                    }
                };
            }
            cur
        })
        .collect()
}

/// The word of `L_{-p_1} ... L_{-p_k}`.
pub fn creation_word(p: &[u32]) -> Vec<i32> {
    p.iter().map(|&x| -(x as i32)).collect()
}

/// The word of the adjoint `L_{p_k} ... L_{p_1}`.
pub fn annihilation_word(p: &[u32]) -> Vec<i32> {
    p.iter().rev().map(|&x| x as i32).collect()
}

// ---------------------------------------------------------------------------
// Verma modules

/// The Verma module `V_h` at parameter `t`.
#[derive(Debug)]
pub struct VermaModule {
    h: Scalar,
    t: Scalar,
    c: Scalar,
    act_memo: Mutex<HashMap<(i32, Partition), Arc<SparseVec>>>,
    gram_memo: Mutex<HashMap<Partition, Arc<Vector>>>,
    singular_memo: Mutex<HashMap<usize, Option<Arc<Vector>>>>,
}

type Registry<K, V> = LazyLock<Mutex<HashMap<K, Arc<V>>>>;

static VERMA_REGISTRY: Registry<(Scalar, Scalar), VermaModule> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl VermaModule {
    /// Shared Verma module of weight `h` at parameter `t`.
    pub fn new(h: &Scalar, t: &Scalar) -> Result<Arc<VermaModule>> {
        let c = central_charge(t)?;
        let key = (h.clone(), t.clone());
        let mut reg = VERMA_REGISTRY.lock().unwrap();
        Ok(reg
            .entry(key)
            .or_insert_with(|| {
                Arc::new(VermaModule {
                    h: h.clone(),
                    t: t.clone(),
                    c,
                    act_memo: Mutex::new(HashMap::new()),
                    gram_memo: Mutex::new(HashMap::new()),
                    singular_memo: Mutex::new(HashMap::new()),
                })
            })
            .clone())
    }

    pub fn h(&self) -> &Scalar {
        &self.h
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn dim(&self, n: i64) -> usize {
        partition_count(n)
    }

    /// `L_n` applied to the basis vector `L_{-p} x`, as a sparse vector at
    /// grade `|p| - n`.
    pub fn act_basis(&self, n: i32, p: &[u32]) -> Arc<SparseVec> {
        let key = (n, p.to_vec());
        if let Some(r) = self.act_memo.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = Arc::new(self.compute_act(n, p));
        self.act_memo.lock().unwrap().insert(key, r.clone());
        r
    }

    fn compute_act(&self, n: i32, p: &[u32]) -> SparseVec {
        let g: i64 = p.iter().map(|&x| x as i64).sum();
        let tg = g - n as i64;
        if tg < 0 {
            return Vec::new();
        }
        let parts = partitions(tg as usize);
        if n == 0 {
            return vec![(parts.index_of(p), &self.h + &Scalar::int(g))];
        }
        if n < 0 {
            let m = (-n) as u32;
            if p.is_empty() || m >= p[0] {
                let mut q = vec![m];
                q.extend_from_slice(p);
                return vec![(parts.index_of(&q), Scalar::one())];
            }
        }
        if p.is_empty() {
            return Vec::new();
        }
        let (l1, rest) = (p[0], &p[1..]);
        let mut acc = zero_vec(parts.len());
        // L_n L_{-l1} R = L_{-l1} L_n R + [L_n, L_{-l1}] R
        let inner = self.act_basis(n, rest);
        if !inner.is_empty() {
            let ig = rest.iter().map(|&x| x as i64).sum::<i64>() - n as i64;
            let iparts = partitions(ig as usize);
            for (i, k) in inner.iter() {
                for (j, v) in self.act_basis(-(l1 as i32), &iparts.list[*i]).iter() {
                    acc[*j] += &(k * v);
                }
            }
        }
        let l1i = l1 as i32;
        let comm = Scalar::int((n + l1i) as i64);
        for (j, v) in self.act_basis(n - l1i, rest).iter() {
            acc[*j] += &(&comm * v);
        }
        if n == l1i {
            let nn = n as i64;
            let central = Scalar::ratio(nn * nn * nn - nn, 12) * &self.c;
            acc[parts.index_of(rest)] += &central;
        }
        sparsify(acc)
    }

    /// `L_n v` for `v` at grade `grade`.
    pub fn act_mode(&self, n: i32, v: &[Scalar], grade: i64) -> Vector {
        let tg = grade - n as i64;
        let mut out = zero_vec(partition_count(tg));
        if tg < 0 || grade < 0 {
            return out;
        }
        let parts = partitions(grade as usize);
        for (i, k) in v.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            for (j, x) in self.act_basis(n, &parts.list[i]).iter() {
                out[*j] += &(k * x);
            }
        }
        out
    }

    /// Row of the Shapovalov form: `<L_{-p} x, L_{-mu} x>` for all `mu`.
    pub fn gram_row(&self, p: &[u32]) -> Arc<Vector> {
        if let Some(r) = self.gram_memo.lock().unwrap().get(p) {
            return r.clone();
        }
        let row = if p.is_empty() {
            vec![Scalar::one()]
        } else {
            let g: usize = p.iter().map(|&x| x as usize).sum();
            let (l1, rest) = (p[0], &p[1..]);
            let rest_row = self.gram_row(rest);
            partitions(g)
                .list
                .iter()
                .map(|mu| {
                    let mut s = Scalar::zero();
                    for (i, k) in self.act_basis(l1 as i32, mu).iter() {
                        if !rest_row[*i].is_zero() {
                            s += &(k * &rest_row[*i]);
                        }
                    }
                    s
                })
                .collect()
        };
        let row = Arc::new(row);
        self.gram_memo.lock().unwrap().insert(p.to_vec(), row.clone());
        row
    }

    /// Gram matrix of the invariant form at grade `n` (symmetric, with
    /// `<x, x> = 1` and `L_n^dagger = L_{-n}`).
    pub fn gram_matrix(&self, n: usize) -> Vec<Vector> {
        partitions(n).list.iter().map(|p| (*self.gram_row(p)).clone()).collect()
    }

    /// `<a, b>` for vectors at grade `n`.
    pub fn inner(&self, a: &[Scalar], b: &[Scalar], n: usize) -> Scalar {
        let parts = partitions(n);
        let mut s = Scalar::zero();
        for (i, k) in a.iter().enumerate() {
            if !k.is_zero() {
                s += &(k * &linalg::dot(&self.gram_row(&parts.list[i]), b));
            }
        }
        s
    }

    /// Matrix of `v -> (L_1 v, L_2 v)` at grade `n`.
    pub fn annihilator_matrix(&self, n: usize) -> Vec<Vector> {
        let d1 = partition_count(n as i64 - 1);
        let d2 = partition_count(n as i64 - 2);
        let parts = partitions(n);
        let mut m = vec![zero_vec(parts.len()); d1 + d2];
        for (j, p) in parts.list.iter().enumerate() {
            for (i, k) in self.act_basis(1, p).iter() {
                m[*i][j] = k.clone();
            }
            for (i, k) in self.act_basis(2, p).iter() {
                m[d1 + *i][j] = k.clone();
            }
        }
        m
    }

    /// Coordinates of the singular vector at grade `n`, normalised so the
    /// coefficient of `L_{-1}^n` is one. Grade zero gives `x` itself.
    pub fn singular_coords(&self, n: usize) -> Result<Option<Arc<Vector>>> {
        if let Some(r) = self.singular_memo.lock().unwrap().get(&n) {
            return Ok(r.clone());
        }
        let r = if n == 0 {
            Some(Arc::new(vec![Scalar::one()]))
        } else {
            let m = self.annihilator_matrix(n);
            let ns = linalg::nullspace(&m, partition_count(n as i64));
            match ns.len() {
                0 => None,
                1 => {
                    let v = &ns[0];
                    if v[0].is_zero() {
                        return Err(VirError::Internal(format!(
                            "singular vector at grade {n} has no L_-1^{n} term"
                        )));
                    }
                    Some(Arc::new(linalg::scale_vec(v, &v[0].recip())))
                }
                k => {
                    return Err(VirError::Internal(format!(
                        "{k} independent singular vectors at grade {n}"
                    )))
                }
            }
        };
        self.singular_memo.lock().unwrap().insert(n, r.clone());
        Ok(r)
    }

    /// Zeros `h_{r,s}` of the Kac determinant at grade `n`, each with its
    /// multiplicity `p(n - rs)`; only meaningful for rational `t`.
    pub fn kac_factors(t: &Scalar, n: usize) -> Result<Vec<(Scalar, usize)>> {
        let mut out = Vec::new();
        for r in 1..=n as i64 {
            for s in 1..=(n as i64 / r) {
                let h = crate::scalars::kac_weight(r, s, t)?;
                out.push((h, partition_count(n as i64 - r * s)));
            }
        }
        Ok(out)
    }
}

/// `det(Gram_n) / prod (h - h_{r,s})^{p(n - rs)}`, which should not depend
/// on `h`.
pub fn kac_determinant_ratio(h: &Scalar, t: &Scalar, n: usize) -> Result<Scalar> {
    let v = VermaModule::new(h, t)?;
    let det = linalg::determinant(&v.gram_matrix(n));
    let mut prod = Scalar::one();
    for (hrs, mult) in VermaModule::kac_factors(t, n)? {
        prod *= &(h - &hrs).pow(mult as u32);
    }
    det.checked_div(&prod).ok_or_else(|| {
        VirError::NormDegenerate(format!("h = {h} is a zero of the Kac determinant at grade {n}"))
    })
}

fn sparsify(v: Vector) -> SparseVec {
    v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect()
}

impl ModeAction for VermaModule {
    type V = GradedVector;
    fn apply_mode(&self, n: i32, v: &GradedVector) -> GradedVector {
        GradedVector { grade: v.grade - n as i64, coords: self.act_mode(n, &v.coords, v.grade) }
    }
    fn zero_at(&self, grade: i64) -> GradedVector {
        GradedVector::zero(grade, partition_count(grade))
    }
    fn grade_of(&self, v: &GradedVector) -> i64 {
        v.grade
    }
    fn accumulate(&self, acc: &mut GradedVector, k: &Scalar, v: &GradedVector) {
        acc.axpy(k, v)
    }
    fn central_charge(&self) -> &Scalar {
        &self.c
    }
}

// ---------------------------------------------------------------------------
// Submodules generated by singular vectors

/// The submodule of an ambient module generated by singular vectors, built
/// grade by grade as `span(gens_n, L_{-1} S_{n-1}, L_{-2} S_{n-2})`.
#[derive(Debug)]
pub struct SingularSubmodule {
    ambient: Arc<HwModule>,
    gens: Vec<GradedVector>,
    spans: Mutex<Vec<Arc<Subspace>>>,
}

impl SingularSubmodule {
    /// `gens` must be singular vectors of `ambient`; this is not rechecked.
    pub fn new(ambient: Arc<HwModule>, gens: Vec<GradedVector>) -> Self {
        SingularSubmodule { ambient, gens, spans: Mutex::new(Vec::new()) }
    }

    pub fn ambient(&self) -> &Arc<HwModule> {
        &self.ambient
    }

    /// The span at grade `n` in ambient coordinates.
    pub fn span(&self, n: i64) -> Arc<Subspace> {
        if n < 0 {
            return Arc::new(Subspace::new(0));
        }
        let n = n as usize;
        loop {
            let k = {
                let spans = self.spans.lock().unwrap();
                if spans.len() > n {
                    return spans[n].clone();
                }
                spans.len()
            };
            let s = Arc::new(self.build(k));
            let mut spans = self.spans.lock().unwrap();
            if spans.len() == k {
                spans.push(s);
            }
        }
    }

    fn build(&self, n: usize) -> Subspace {
        let dim = self.ambient.dim(n as i64);
        let mut s = Subspace::new(dim);
        for g in &self.gens {
            if g.grade == n as i64 {
                s.insert(&g.coords);
            }
        }
        for step in [1i64, 2] {
            let below = n as i64 - step;
            if below < 0 {
                continue;
            }
            let prev = self.span(below);
            for row in prev.basis() {
                let v = GradedVector { grade: below, coords: row.clone() };
                let w = self.ambient.apply_mode(-(step as i32), &v);
                s.insert(&w.coords);
            }
        }
        s
    }

    pub fn dim(&self, n: i64) -> usize {
        self.span(n).dim()
    }

    pub fn contains(&self, v: &GradedVector) -> bool {
        self.span(v.grade).contains(&v.coords)
    }
}

// ---------------------------------------------------------------------------
// Highest-weight modules

#[derive(Debug)]
struct QuotientGrade {
    basis: Vec<usize>,
}

/// A Verma module modulo the submodule generated by zero, one or two of its
/// singular vectors.
#[derive(Debug)]
pub struct HwModule {
    verma: Arc<VermaModule>,
    gen_grades: Vec<usize>,
    relations: Option<SingularSubmodule>,
    grades: Mutex<Vec<Arc<QuotientGrade>>>,
}

static HW_REGISTRY: Registry<(Scalar, Scalar, Vec<usize>), HwModule> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl HwModule {
    /// `V_h / (U X_{g_1} x + U X_{g_2} x)` for the given singular grades.
    pub fn new(h: &Scalar, t: &Scalar, gen_grades: &[usize]) -> Result<Arc<HwModule>> {
        let mut gen_grades = gen_grades.to_vec();
        gen_grades.sort();
        gen_grades.dedup();
        if gen_grades.len() > 2 {
            return Err(VirError::InvalidModule("at most two generators are supported".into()));
        }
        let key = (h.clone(), t.clone(), gen_grades.clone());
        if let Some(m) = HW_REGISTRY.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let verma = VermaModule::new(h, t)?;
        let relations = if gen_grades.is_empty() {
            None
        } else {
            let ambient = HwModule::new(h, t, &[])?;
            let mut gens = Vec::new();
            for &g in &gen_grades {
                if g == 0 {
                    return Err(VirError::InvalidModule("cannot quotient by the highest-weight vector".into()));
                }
                let v = verma.singular_coords(g)?.ok_or_else(|| {
                    VirError::InvalidModule(format!("V_{} has no singular vector at grade {g}", h))
                })?;
                gens.push(GradedVector { grade: g as i64, coords: (*v).clone() });
            }
            Some(SingularSubmodule::new(ambient, gens))
        };
        let m = Arc::new(HwModule { verma, gen_grades, relations, grades: Mutex::new(Vec::new()) });
        HW_REGISTRY.lock().unwrap().entry(key).or_insert(m.clone());
        Ok(m)
    }

    /// The Verma module itself, viewed as a highest-weight module.
    pub fn verma_of(h: &Scalar, t: &Scalar) -> Result<Arc<HwModule>> {
        HwModule::new(h, t, &[])
    }

    pub fn verma(&self) -> &Arc<VermaModule> {
        &self.verma
    }

    pub fn h(&self) -> &Scalar {
        self.verma.h()
    }

    pub fn t(&self) -> &Scalar {
        self.verma.t()
    }

    pub fn c(&self) -> &Scalar {
        self.verma.c()
    }

    pub fn generator_grades(&self) -> &[usize] {
        &self.gen_grades
    }

    pub fn is_verma(&self) -> bool {
        self.gen_grades.is_empty()
    }

    fn grade_data(&self, n: usize) -> Arc<QuotientGrade> {
        loop {
            let k = {
                let g = self.grades.lock().unwrap();
                if g.len() > n {
                    return g[n].clone();
                }
                g.len()
            };
            let basis = match &self.relations {
                None => (0..partition_count(k as i64)).collect(),
                Some(r) => r.span(k as i64).free_columns(),
            };
            let mut g = self.grades.lock().unwrap();
            if g.len() == k {
                g.push(Arc::new(QuotientGrade { basis }));
            }
        }
    }

    /// Partition indices (at grade `n`) of the basis vectors that survive
    /// in the quotient.
    pub fn basis_indices(&self, n: i64) -> Vec<usize> {
        if n < 0 {
            return Vec::new();
        }
        self.grade_data(n as usize).basis.clone()
    }

    pub fn basis_partitions(&self, n: i64) -> Vec<Partition> {
        if n < 0 {
            return Vec::new();
        }
        let parts = partitions(n as usize);
        self.basis_indices(n).iter().map(|&i| parts.list[i].clone()).collect()
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < 0 {
            0
        } else if self.relations.is_none() {
            partition_count(n)
        } else {
            self.grade_data(n as usize).basis.len()
        }
    }

    /// Embeds quotient coordinates as a Verma vector supported on the basis
    /// partitions.
    pub fn lift(&self, v: &GradedVector) -> GradedVector {
        if self.relations.is_none() {
            return v.clone();
        }
        let mut out = GradedVector::zero(v.grade, partition_count(v.grade));
        for (k, &i) in v.coords.iter().zip(self.basis_indices(v.grade).iter()) {
            out.coords[i] = k.clone();
        }
        out
    }

    /// Image of a Verma vector in the quotient.
    pub fn project(&self, w: &GradedVector) -> GradedVector {
        match &self.relations {
            None => w.clone(),
            Some(r) => {
                let red = r.span(w.grade).reduce(&w.coords);
                let coords = self.basis_indices(w.grade).iter().map(|&i| red[i].clone()).collect();
                GradedVector { grade: w.grade, coords }
            }
        }
    }

    /// Whether a Verma vector lies in the relations.
    pub fn is_zero_in_quotient(&self, w: &GradedVector) -> bool {
        self.project(w).is_zero()
    }

    /// Image in the quotient of the Verma singular vector at grade `g`, if
    /// there is one.
    pub fn singular_image(&self, g: usize) -> Result<Option<GradedVector>> {
        Ok(self.verma.singular_coords(g)?.map(|v| {
            self.project(&GradedVector { grade: g as i64, coords: (*v).clone() })
        }))
    }

    /// The descended invariant form on the quotient basis at grade `n`.
    pub fn gram_matrix(&self, n: usize) -> Vec<Vector> {
        let parts = partitions(n);
        let idx = self.basis_indices(n as i64);
        idx.iter()
            .map(|&i| {
                let row = self.verma.gram_row(&parts.list[i]);
                idx.iter().map(|&j| row[j].clone()).collect()
            })
            .collect()
    }

    /// `<a, b>` on the quotient.
    pub fn inner(&self, a: &GradedVector, b: &GradedVector) -> Scalar {
        if a.grade != b.grade || a.grade < 0 {
            return Scalar::zero();
        }
        self.verma.inner(&self.lift(a).coords, &self.lift(b).coords, a.grade as usize)
    }

    /// The element `sum_lambda v_lambda L_{-lambda}` whose action on `x`
    /// gives `v`.
    pub fn to_element(&self, v: &GradedVector) -> AlgebraElement {
        let w = self.lift(v);
        AlgebraElement::from_partition_coords(self.c(), w.grade.max(0) as usize, &w.coords)
    }

    /// Vector `e x` for a creation element `e`.
    pub fn from_element(&self, e: &AlgebraElement) -> Result<GradedVector> {
        let x = GradedVector { grade: 0, coords: vec![Scalar::one()] };
        act_element(self, e, &x)
    }

    pub fn vector_json(&self, v: &GradedVector) -> Value {
        let parts = self.basis_partitions(v.grade);
        json!({
            "grade": v.grade,
            "terms": parts.iter().zip(&v.coords).filter(|(_, k)| !k.is_zero()).map(|(p, k)| json!({
                "partition": p,
                "coeff": k.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Human-readable `v` as a creation element acting on `x`.
    pub fn vector_string(&self, v: &GradedVector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        format!("({}) x", self.to_element(v))
    }
}

impl ModeAction for HwModule {
    type V = GradedVector;
    fn apply_mode(&self, n: i32, v: &GradedVector) -> GradedVector {
        let tg = v.grade - n as i64;
        if v.grade < 0 || tg < 0 {
            return GradedVector::zero(tg, self.dim(tg));
        }
        let w = self.lift(v);
        let out = GradedVector { grade: tg, coords: self.verma.act_mode(n, &w.coords, w.grade) };
        self.project(&out)
    }
    fn zero_at(&self, grade: i64) -> GradedVector {
        GradedVector::zero(grade, self.dim(grade))
    }
    fn grade_of(&self, v: &GradedVector) -> i64 {
        v.grade
    }
    fn accumulate(&self, acc: &mut GradedVector, k: &Scalar, v: &GradedVector) {
        acc.axpy(k, v)
    }
    fn central_charge(&self) -> &Scalar {
        self.verma.c()
    }
}

/// A singular vector together with its position in the submodule lattice.
#[derive(Clone, Debug)]
pub struct SingularVector {
    pub h: Scalar,
    pub grade: usize,
    pub coords: Vector,
    pub element: AlgebraElement,
    pub rank: usize,
    /// Prime factors, outermost first: the last one acts on `x` first.
    pub factors: Vec<AlgebraElement>,
}

impl SingularVector {
    pub fn to_json(&self) -> Value {
        json!({
            "h": self.h.to_json(),
            "grade": self.grade,
            "rank": self.rank,
            "element": self.element.to_json(),
            "display": self.element.to_string(),
            "factors": self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Singular vector of `V_h` at grade `n`, with its rank and factorisation
/// into prime singular vectors of intermediate Verma modules.
pub fn find_singular(h: &Scalar, t: &Scalar, n: usize) -> Result<Option<SingularVector>> {
    let v = VermaModule::new(h, t)?;
    let Some(coords) = v.singular_coords(n)? else {
        return Ok(None);
    };
    let element = AlgebraElement::from_partition_coords(v.c(), n, &coords);
    if n == 0 {
        return Ok(Some(SingularVector {
            h: h.clone(),
            grade: 0,
            coords: (*coords).clone(),
            element: element.clone(),
            rank: 0,
            factors: Vec::new(),
        }));
    }
    let lattice = structure::classify(h, t, n)?;
    let entry = lattice.entry_at(n).ok_or_else(|| {
        VirError::Internal(format!("singular vector at grade {n} missing from the lattice"))
    })?;
    let path = lattice.path_to(n);
    let mut factors = Vec::new();
    let mut prev = 0usize;
    for &g in &path {
        let hv = h + &Scalar::int(prev as i64);
        let vv = VermaModule::new(&hv, t)?;
        let f = vv.singular_coords(g - prev)?.ok_or_else(|| {
            VirError::Internal(format!("no prime factor of grade {} over h = {hv}", g - prev))
        })?;
        factors.push(AlgebraElement::from_partition_coords(v.c(), g - prev, &f));
        prev = g;
    }
    factors.reverse();
    if n <= 7 && factors.len() > 1 {
        let mut prod = AlgebraElement::one(v.c());
        for f in &factors {
            prod = prod.mul(f)?;
        }
        if prod != element {
            return Err(VirError::Internal(format!("factorisation at grade {n} does not multiply back")));
        }
    }
    Ok(Some(SingularVector {
        h: h.clone(),
        grade: n,
        coords: (*coords).clone(),
        element,
        rank: entry.rank,
        factors,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_and_two() {
        let t = Scalar::int(2);
        let v = VermaModule::new(&Scalar::zero(), &t).unwrap();
        assert_eq!(*v.singular_coords(1).unwrap().unwrap(), vec![Scalar::one()]);
        // h_{1,2}(2) = 5/8: L_{-1}^2 - (1/t) L_{-2}
        let h = crate::scalars::kac_weight(1, 2, &t).unwrap();
        let v = VermaModule::new(&h, &t).unwrap();
        let s = v.singular_coords(2).unwrap().unwrap();
        assert_eq!(*s, vec![Scalar::one(), Scalar::ratio(-1, 2)]);
    }

    #[test]
    fn gram_grade_two() {
        let t = Scalar::ratio(3, 2);
        let h = Scalar::ratio(1, 3);
        let v = VermaModule::new(&h, &t).unwrap();
        let g = v.gram_matrix(2);
        // <L-1^2, L-1^2> = 8h^2 + 4h, <L-1^2, L-2> = 6h, <L-2, L-2> = 4h + c/2
        assert_eq!(g[0][0], Scalar::ratio(8, 9) + Scalar::ratio(4, 3));
        assert_eq!(g[0][1], Scalar::int(2));
        assert_eq!(g[1][1], Scalar::ratio(4, 3));
    }

    #[test]
    fn quotient_dims() {
        let t = Scalar::ratio(3, 2);
        let m = HwModule::new(&Scalar::one(), &t, &[4]).unwrap();
        assert_eq!(m.dim(4), 4);
        assert_eq!(m.dim(5), 6);
    }
}
