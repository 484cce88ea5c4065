//! Explicit action on a staggered module with a Verma right module.
//!
//! A vector is a pair: a component in the left module `H^L` at grade `g`
//! and a component in the right Verma module at grade `g - ell`. The right
//! basis vectors `L_{-p} y` are acted on by recursion on `p`, with `L_0 y =
//! h^R y + omega_0`, `L_1 y = omega_1`, `L_2 y = omega_2` and `L_n y` for
//! `n >= 3` obtained from `(n-2) L_n = L_{n-1} L_1 - L_1 L_{n-1}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algebra::{partition_count, partitions, Partition};
use crate::linalg::{self, is_zero_vec, zero_vec, Vector};
use crate::scalars::Scalar;
use crate::verma::{GradedVector, HwModule, ModeAction, VermaModule};

/// A homogeneous vector of a staggered module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagVec {
    pub grade: i64,
    pub left: Vector,
    pub right: Vector,
}

impl StagVec {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.left) && is_zero_vec(&self.right)
    }

    pub fn is_left(&self) -> bool {
        is_zero_vec(&self.right)
    }

    pub fn left_part(&self) -> GradedVector {
        GradedVector { grade: self.grade, coords: self.left.clone() }
    }

    pub fn add(&self, o: &StagVec) -> StagVec {
        let mut r = self.clone();
        r.axpy(&Scalar::one(), o);
        r
    }

    pub fn axpy(&mut self, k: &Scalar, o: &StagVec) {
        assert_eq!(self.grade, o.grade, "adding staggered vectors of different grades");
        linalg::axpy(&mut self.left, k, &o.left);
        linalg::axpy(&mut self.right, k, &o.right);
    }
}

/// The pair `(omega_1, omega_2) = (L_1 y, L_2 y)` in the left module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Data {
    pub omega1: GradedVector,
    pub omega2: GradedVector,
}

impl Data {
    pub fn zero(left: &HwModule, ell: usize) -> Data {
        let g = ell as i64;
        Data {
            omega1: GradedVector::zero(g - 1, left.dim(g - 1)),
            omega2: GradedVector::zero(g - 2, left.dim(g - 2)),
        }
    }

    pub fn add(&self, o: &Data) -> Data {
        Data { omega1: self.omega1.add(&o.omega1), omega2: self.omega2.add(&o.omega2) }
    }

    pub fn scale(&self, k: &Scalar) -> Data {
        Data { omega1: self.omega1.scale(k), omega2: self.omega2.scale(k) }
    }

    pub fn sub(&self, o: &Data) -> Data {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    /// Concatenated coordinates `(omega_1, omega_2)`.
    pub fn coords(&self) -> Vector {
        let mut v = self.omega1.coords.clone();
        v.extend(self.omega2.coords.iter().cloned());
        v
    }

    pub fn from_coords(left: &HwModule, ell: usize, v: &[Scalar]) -> Data {
        let g = ell as i64;
        let d1 = left.dim(g - 1);
        Data {
            omega1: GradedVector { grade: g - 1, coords: v[..d1].to_vec() },
            omega2: GradedVector { grade: g - 2, coords: v[d1..].to_vec() },
        }
    }
}

/// A staggered module `0 -> H^L -> S -> V_{h^R} -> 0` given by its data.
#[derive(Debug)]
pub struct StaggeredModule {
    left: Arc<HwModule>,
    right: Arc<VermaModule>,
    ell: usize,
    omega0: GradedVector,
    data: Data,
    memo: Mutex<HashMap<(i32, Partition), Arc<StagVec>>>,
}

impl StaggeredModule {
    pub fn new(
        left: Arc<HwModule>,
        right: Arc<VermaModule>,
        ell: usize,
        omega0: GradedVector,
        data: Data,
    ) -> Self {
        StaggeredModule { left, right, ell, omega0, data, memo: Mutex::new(HashMap::new()) }
    }

    pub fn left(&self) -> &Arc<HwModule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<VermaModule> {
        &self.right
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn data(&self) -> &Data {
        &self.data
    }

    pub fn zero(&self, grade: i64) -> StagVec {
        StagVec {
            grade,
            left: zero_vec(self.left.dim(grade)),
            right: zero_vec(partition_count(grade - self.ell as i64)),
        }
    }

    /// The vector `y` whose image generates the right module.
    pub fn y(&self) -> StagVec {
        let mut v = self.zero(self.ell as i64);
        v.right[0] = Scalar::one();
        v
    }

    pub fn from_left(&self, v: &GradedVector) -> StagVec {
        let mut s = self.zero(v.grade);
        s.left = v.coords.clone();
        s
    }

    fn right_basis(&self, p: &[u32]) -> StagVec {
        let k = p.iter().sum::<u32>() as i64;
        let mut v = self.zero(self.ell as i64 + k);
        v.right[partitions(k as usize).index_of(p)] = Scalar::one();
        v
    }

    /// `L_n (L_{-p} y)`.
    pub fn act_right_basis(&self, n: i32, p: &[u32]) -> Arc<StagVec> {
        let key = (n, p.to_vec());
        if let Some(r) = self.memo.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = Arc::new(self.compute(n, p));
        self.memo.lock().unwrap().insert(key, r.clone());
        r
    }

    fn compute(&self, n: i32, p: &[u32]) -> StagVec {
        let k = p.iter().sum::<u32>() as i64;
        let g = self.ell as i64 + k;
        let tg = g - n as i64;
        let mut out = self.zero(tg);
        if tg < 0 {
            return out;
        }
        if n < 0 {
            for (j, x) in self.right.act_basis(n, p).iter() {
                out.right[*j] = x.clone();
            }
            return out;
        }
        if n == 0 {
            out.right[partitions(k as usize).index_of(p)] = self.right.h() + &Scalar::int(k);
            let mut w = self.omega0.clone();
            for &part in p.iter().rev() {
                w = self.left.apply_mode(-(part as i32), &w);
            }
            out.left = w.coords;
            return out;
        }
        if p.is_empty() {
            return self.base(n);
        }
        let (l1, rest) = (p[0], &p[1..]);
        let l1i = l1 as i32;
        let inner = self.act_right_basis(n, rest);
        out.axpy(&Scalar::one(), &self.apply_mode(-l1i, &inner));
        let comm = Scalar::int((n + l1i) as i64);
        out.axpy(&comm, &self.act_right_basis(n - l1i, rest));
        if n == l1i {
            let nn = n as i64;
            let central = Scalar::ratio(nn * nn * nn - nn, 12) * self.right.c();
            out.axpy(&central, &self.right_basis(rest));
        }
        out
    }

    /// `L_n y` for `n >= 1`, always a left vector.
    fn base(&self, n: i32) -> StagVec {
        match n {
            1 => self.from_left(&self.data.omega1),
            2 => self.from_left(&self.data.omega2),
            _ => {
                let a = self.left.apply_mode(n - 1, &self.data.omega1);
                let prev = self.act_right_basis(n - 1, &[]);
                let b = self.left.apply_mode(1, &prev.left_part());
                let v = a.sub(&b).scale(&Scalar::ratio(1, (n - 2) as i64));
                self.from_left(&v)
            }
        }
    }
}

impl ModeAction for StaggeredModule {
    type V = StagVec;

    fn apply_mode(&self, n: i32, v: &StagVec) -> StagVec {
        let tg = v.grade - n as i64;
        let lv = self.left.apply_mode(n, &v.left_part());
        let mut out = self.zero(tg);
        out.left = lv.coords;
        let rg = v.grade - self.ell as i64;
        if rg >= 0 && tg >= 0 {
            let parts = partitions(rg as usize);
            for (i, k) in v.right.iter().enumerate() {
                if !k.is_zero() {
                    out.axpy(k, &self.act_right_basis(n, &parts.list[i]));
                }
            }
        }
        out
    }

    fn zero_at(&self, grade: i64) -> StagVec {
        self.zero(grade)
    }

    fn grade_of(&self, v: &StagVec) -> i64 {
        v.grade
    }

    fn accumulate(&self, acc: &mut StagVec, k: &Scalar, v: &StagVec) {
        acc.axpy(k, v)
    }

    fn central_charge(&self) -> &Scalar {
        self.right.c()
    }
}
