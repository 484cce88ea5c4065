//! Relations `U_1 L_1 + U_2 L_2 = 0` among annihilators.
//!
//! At grade `-m` the pairs `(U_1, U_2)` with `U_1` of grade `-(m-1)`,
//! `U_2` of grade `-(m-2)` and `U_1 L_1 = -U_2 L_2` form a finite space.
//! Applied to a vector `y` with `L_1 y = w_1` and `L_2 y = w_2` they give
//! necessary conditions `U_1 w_1 + U_2 w_2 = 0`. Nothing here depends on the
//! central charge, so bases are computed once per grade and cached as
//! coordinates.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use crate::algebra::{normal_order, partitions, positive_basis, AlgebraElement, Monomial};
use crate::linalg::{self, zero_vec, Vector};
use crate::scalars::Scalar;

/// One relation, as coordinates of `U_1` and `U_2` over [`positive_basis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCoords {
    pub u1: Vector,
    pub u2: Vector,
}

static CACHE: LazyLock<Mutex<HashMap<usize, Arc<Vec<RelationCoords>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn positive_index(m: &Monomial) -> usize {
    let mut parts: Vec<u32> = m.word().iter().map(|&x| x as u32).collect();
    parts.reverse();
    partitions(parts.iter().sum::<u32>() as usize).index_of(&parts)
}

fn basis_times_mode(grade: usize, mode: i32, target: usize) -> Vec<Vector> {
    let c = Scalar::zero();
    let dim = partitions(target).len();
    positive_basis(grade)
        .iter()
        .map(|b| {
            let mut w = b.word();
            w.push(mode);
            let mut v = zero_vec(dim);
            for (m, k) in normal_order(&w, &c).terms() {
                v[positive_index(m)] = k.clone();
            }
            v
        })
        .collect()
}

/// Basis of the relation space at grade `-m`, each normalised so that its
/// first nonzero coordinate (over `U_1` then `U_2`) is one.
pub fn relation_coords(m: usize) -> Arc<Vec<RelationCoords>> {
    if let Some(r) = CACHE.lock().unwrap().get(&m) {
        return r.clone();
    }
    let r = Arc::new(compute(m));
    CACHE.lock().unwrap().insert(m, r.clone());
    r
}

fn compute(m: usize) -> Vec<RelationCoords> {
    if m < 2 {
        return Vec::new();
    }
    let a_cols = basis_times_mode(m - 1, 1, m);
    let b_cols = basis_times_mode(m - 2, 2, m);
    let (na, nb) = (a_cols.len(), b_cols.len());
    let rows = partitions(m).len();
    let mut mat = vec![zero_vec(na + nb); rows];
    for (j, col) in a_cols.iter().chain(&b_cols).enumerate() {
        for (i, x) in col.iter().enumerate() {
            mat[i][j] = x.clone();
        }
    }
    linalg::nullspace(&mat, na + nb)
        .into_iter()
        .map(|v| {
            let v = linalg::normalise_first(&v);
            RelationCoords { u1: v[..na].to_vec(), u2: v[na..].to_vec() }
        })
        .collect()
}

/// Dimension of the relation space at grade `-m`.
pub fn intersection_dim(m: usize) -> usize {
    relation_coords(m).len()
}

/// The relations at grade `-m` as algebra elements over central charge `c`.
pub fn intersection_basis(m: usize, c: &Scalar) -> Vec<(AlgebraElement, AlgebraElement)> {
    relation_coords(m)
        .iter()
        .map(|r| (positive_element(c, m - 1, &r.u1), positive_element(c, m - 2, &r.u2)))
        .collect()
}

fn positive_element(c: &Scalar, grade: usize, coords: &[Scalar]) -> AlgebraElement {
    let mut e = AlgebraElement::zero(c);
    for (b, k) in positive_basis(grade).into_iter().zip(coords) {
        e.add_term(b, k);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensions() {
        let d: Vec<usize> = (0..=9).map(intersection_dim).collect();
        assert_eq!(d, vec![0, 0, 0, 0, 0, 1, 1, 3, 4, 7]);
    }

    #[test]
    fn relations_vanish() {
        let c = Scalar::ratio(-2, 1);
        for m in 5..=8 {
            for (u1, u2) in intersection_basis(m, &c) {
                let s = u1
                    .mul(&AlgebraElement::mode(&c, 1))
                    .unwrap()
                    .add(&u2.mul(&AlgebraElement::mode(&c, 2)).unwrap())
                    .unwrap();
                assert!(s.is_zero());
            }
        }
    }
}
