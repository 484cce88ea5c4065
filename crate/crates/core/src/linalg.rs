//! Exact dense linear algebra over [`Scalar`].
//!
//! Matrices are row-major `Vec<Vec<Scalar>>`. Elimination always picks the
//! leftmost available column, so pivot columns of a row space do not depend
//! on the order in which rows arrive; only the row used as pivot is chosen by
//! [`Scalar::complexity`].

use crate::error::{Result, VirError};
use crate::scalars::Scalar;

pub type Vector = Vec<Scalar>;
pub type Matrix = Vec<Vector>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

/// `a += k * b`, skipping zero entries of `b`.
pub fn axpy(a: &mut [Scalar], k: &Scalar, b: &[Scalar]) {
    if k.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += &(k * y);
        }
    }
}

pub fn scale_vec(v: &[Scalar], k: &Scalar) -> Vector {
    v.iter().map(|x| x * k).collect()
}

pub fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

pub fn transpose(m: &Matrix, ncols: usize) -> Matrix {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Normalises `v` so that its first nonzero entry is one.
pub fn normalise_first(v: &[Scalar]) -> Vector {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(p) => scale_vec(v, &p.recip()),
    }
}

/// A subspace kept in fully reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ncols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ncols: usize) -> Self {
        Subspace { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<'a, I: IntoIterator<Item = &'a Vector>>(ncols: usize, vs: I) -> Self {
        let mut s = Subspace::new(ncols);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Echelon basis, one row per pivot.
    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns that are not pivots, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ncols];
        for &p in &self.pivots {
            is_piv[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_piv[c]).collect()
    }

    /// Remainder of `v` modulo the subspace; it vanishes on pivot columns.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let k = -v[p].clone();
                axpy(&mut v, &k, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v`; returns true if the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let r = scale_vec(&r, &r[p].recip());
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let k = -row[p].clone();
                axpy(row, &k, &r);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

/// Reduced row echelon form by Gauss-Jordan elimination.
pub fn rref(mut m: Matrix, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len())
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].complexity());
        let Some(best) = best else { continue };
        m.swap(r, best);
        let inv = m[r][col].recip();
        let prow: Vector = m[r].iter().map(|x| x * &inv).collect();
        let nz: Vec<usize> = (0..ncols).filter(|&j| !prow[j].is_zero()).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let k = row[col].clone();
            for &j in &nz {
                let d = &k * &prow[j];
                row[j] -= &d;
            }
        }
        m[r] = prow;
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Rref { rows: m, pivots, ncols }
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    rref(m.clone(), ncols).pivots.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &Matrix, ncols: usize) -> Vec<Vector> {
    let r = rref(m.clone(), ncols);
    nullspace_from_rref(&r)
}

fn nullspace_from_rref(r: &Rref) -> Vec<Vector> {
    let mut is_piv = vec![false; r.ncols];
    for &p in &r.pivots {
        is_piv[p] = true;
    }
    (0..r.ncols)
        .filter(|&f| !is_piv[f])
        .map(|f| {
            let mut v = zero_vec(r.ncols);
            v[f] = Scalar::one();
            for (row, &p) in r.rows.iter().zip(&r.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{y : y^T m = 0}`.
pub fn left_nullspace(m: &Matrix, ncols: usize) -> Vec<Vector> {
    nullspace(&transpose(m, ncols), m.len())
}

/// All solutions of `m x = b`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vector,
    pub kernel: Vec<Vector>,
}

pub fn solve(m: &Matrix, ncols: usize, b: &[Scalar]) -> Result<Solution> {
    assert_eq!(m.len(), b.len());
    let aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let r = rref(aug, ncols + 1);
    if r.pivots.last() == Some(&ncols) {
        return Err(VirError::InconsistentSystem("right-hand side not in image".into()));
    }
    let mut particular = zero_vec(ncols);
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        particular[p] = row[ncols].clone();
    }
    let inner = Rref {
        rows: r.rows.iter().map(|row| row[..ncols].to_vec()).collect(),
        pivots: r.pivots.clone(),
        ncols,
    };
    Ok(Solution { particular, kernel: nullspace_from_rref(&inner) })
}

/// Unique solution of `m x = b`, or an error naming what went wrong.
pub fn solve_unique(m: &Matrix, ncols: usize, b: &[Scalar]) -> Result<Vector> {
    let s = solve(m, ncols, b)?;
    if !s.kernel.is_empty() {
        return Err(VirError::NonUniqueSolution(format!(
            "{}-dimensional solution space",
            s.kernel.len()
        )));
    }
    Ok(s.particular)
}

pub fn determinant(m: &Matrix) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].complexity())
        else {
            return Scalar::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        let inv = piv.recip();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let k = &a[i][col] * &inv;
            let prow = a[col].clone();
            for j in col..n {
                if !prow[j].is_zero() {
                    let d = &k * &prow[j];
                    a[i][j] -= &d;
                }
            }
        }
    }
    det
}

/// Orthogonal basis for a symmetric bilinear form given by its Gram matrix.
///
/// Returns coefficient vectors `z_k` (in the original basis) with
/// `z_j^T g z_k = 0` for `j != k`, together with the norms `z_k^T g z_k`.
/// Fails if the form is degenerate.
pub fn orthogonalise(g: &Matrix) -> Result<(Vec<Vector>, Vec<Scalar>)> {
    let n = g.len();
    let form = |u: &[Scalar], v: &[Scalar]| dot(u, &mat_vec(g, v));
    let mut pool: Vec<Vector> = (0..n).map(|i| unit_vec(n, i)).collect();
    let mut basis = Vec::new();
    let mut norms = Vec::new();
    while !pool.is_empty() {
        let pick = pool.iter().position(|v| !form(v, v).is_zero());
        let z = match pick {
            Some(i) => pool.remove(i),
            None => {
                // Every remaining vector is isotropic; u + w has norm 2(u, w).
                let mut found = None;
                'outer: for i in 0..pool.len() {
                    for j in i + 1..pool.len() {
                        if !form(&pool[i], &pool[j]).is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let (i, j) = found.ok_or_else(|| {
                    VirError::NormDegenerate(format!(
                        "form has a {}-dimensional radical",
                        pool.len()
                    ))
                })?;
                let s = add_vec(&pool[i], &pool[j]);
                pool[i] = s;
                pool.remove(i)
            }
        };
        let gz = mat_vec(g, &z);
        let nz = dot(&z, &gz);
        let inv = nz.recip();
        for v in pool.iter_mut() {
            let k = dot(v, &gz) * &inv;
            if !k.is_zero() {
                axpy(v, &-k, &z);
            }
        }
        basis.push(z);
        norms.push(nz);
    }
    Ok((basis, norms))
}

/// Coefficient `a` with `v - a * target` in `modulo`; errors if none exists.
pub fn coefficient_along(v: &[Scalar], target: &[Scalar], modulo: Option<&Subspace>) -> Result<Scalar> {
    let (v, target) = match modulo {
        Some(s) => (s.reduce(v), s.reduce(target)),
        None => (v.to_vec(), target.to_vec()),
    };
    let Some(p) = target.iter().position(|x| !x.is_zero()) else {
        return Err(VirError::UndefinedInvariant("target vector vanishes".into()));
    };
    let a = &v[p] / &target[p];
    let rest = sub_vec(&v, &scale_vec(&target, &a));
    if !is_zero_vec(&rest) {
        return Err(VirError::Internal("vector is not proportional to the target".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()
    }

    #[test]
    fn rref_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(is_zero_vec(&mat_vec(&a, &ns[0])));
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let b = vec![Scalar::int(1), Scalar::int(3)];
        assert!(matches!(solve(&a, 2, &b), Err(VirError::InconsistentSystem(_))));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&m(&[&[2, 1], &[7, 4]])), Scalar::int(1));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), Scalar::int(-1));
    }

    #[test]
    fn orthogonalise_hyperbolic() {
        let g = m(&[&[0, 1], &[1, 0]]);
        let (b, n) = orthogonalise(&g).unwrap();
        assert_eq!(b.len(), 2);
        assert!(n.iter().all(|x| !x.is_zero()));
        assert!(dot(&b[0], &mat_vec(&g, &b[1])).is_zero());
        assert!(orthogonalise(&m(&[&[1, 1], &[1, 1]])).is_err());
    }

    #[test]
    fn subspace_pivots_independent_of_order() {
        let vs = m(&[&[1, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        let a = Subspace::spanned_by(3, vs.iter());
        let b = Subspace::spanned_by(3, vs.iter().rev());
        let mut pa = a.pivots().to_vec();
        let mut pb = b.pivots().to_vec();
        pa.sort();
        pb.sort();
        assert_eq!(pa, pb);
        assert_eq!(a.free_columns(), vec![2]);
    }
}
