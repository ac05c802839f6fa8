//! Stack-allocated `m×m` matrices and `m`-vectors for pointwise
//! coefficient fields (`m ≤ MAX_SYSTEM`).

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::dense::jacobi_eigen_in_place;
use crate::geometry::Vec3;
use crate::math;

/// Largest supported system size (vector models use `m = 6`).
pub const MAX_SYSTEM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallVec {
    n: usize,
    a: [f64; MAX_SYSTEM],
}

impl SmallVec {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_SYSTEM);
        SmallVec {
            n,
            a: [0.0; MAX_SYSTEM],
        }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut s = SmallVec::zeros(v.len());
        s.a[..v.len()].copy_from_slice(v);
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.a[..self.n]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.a[..self.n]
    }

    pub fn dot(&self, o: &SmallVec) -> f64 {
        self.as_slice().iter().zip(o.as_slice()).map(|(x, y)| x * y).sum()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.dot(self))
    }

    /// Copy of components `start..start+3` as a 3-vector.
    pub fn segment3(&self, start: usize) -> Vec3 {
        Vec3([self.a[start], self.a[start + 1], self.a[start + 2]])
    }

    pub fn set_segment3(&mut self, start: usize, v: Vec3) {
        self.a[start..start + 3].copy_from_slice(&v.0);
    }
}

impl Index<usize> for SmallVec {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.n);
        &self.a[i]
    }
}

impl IndexMut<usize> for SmallVec {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.n);
        &mut self.a[i]
    }
}

impl Add for SmallVec {
    type Output = SmallVec;
    fn add(mut self, o: SmallVec) -> SmallVec {
        for i in 0..self.n {
            self.a[i] += o.a[i];
        }
        self
    }
}

impl Sub for SmallVec {
    type Output = SmallVec;
    fn sub(mut self, o: SmallVec) -> SmallVec {
        for i in 0..self.n {
            self.a[i] -= o.a[i];
        }
        self
    }
}

impl Mul<f64> for SmallVec {
    type Output = SmallVec;
    fn mul(mut self, s: f64) -> SmallVec {
        for i in 0..self.n {
            self.a[i] *= s;
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMat {
    n: usize,
    a: [[f64; MAX_SYSTEM]; MAX_SYSTEM],
}

impl SmallMat {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_SYSTEM);
        SmallMat {
            n,
            a: [[0.0; MAX_SYSTEM]; MAX_SYSTEM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SmallMat::zeros(n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = SmallMat::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.a[i][i] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let mut m = SmallMat::zeros(rows.len());
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), rows.len());
            m.a[i][..r.len()].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Write a 3×3 block with upper-left corner `(r0, c0)`.
    pub fn set_block3(&mut self, r0: usize, c0: usize, b: &[[f64; 3]; 3]) {
        for i in 0..3 {
            for j in 0..3 {
                self.a[r0 + i][c0 + j] = b[i][j];
            }
        }
    }

    pub fn transpose(&self) -> SmallMat {
        let mut t = SmallMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.a[j][i] = self.a[i][j];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &SmallVec) -> SmallVec {
        debug_assert_eq!(v.len(), self.n);
        let mut out = SmallVec::zeros(self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                s += self.a[i][j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn matmul(&self, o: &SmallMat) -> SmallMat {
        let mut out = SmallMat::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.a[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.a[i][j] += a * o.a[k][j];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> SmallMat {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] *= s;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    /// Largest entry of `|A − Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                m = m.max((self.a[i][j] - self.a[j][i]).abs());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) of the symmetric
    /// part `(A + Aᵀ)/2`.
    pub fn symmetric_eigen(&self) -> (SmallVec, SmallMat) {
        let n = self.n;
        let mut work = [0.0; MAX_SYSTEM * MAX_SYSTEM];
        let mut v = [0.0; MAX_SYSTEM * MAX_SYSTEM];
        for i in 0..n {
            for j in 0..n {
                work[i * n + j] = 0.5 * (self.a[i][j] + self.a[j][i]);
            }
        }
        jacobi_eigen_in_place(&mut work[..n * n], &mut v[..n * n], n);
        let mut order = [0usize; MAX_SYSTEM];
        for (i, o) in order.iter_mut().enumerate().take(n) {
            *o = i;
        }
        order[..n].sort_by(|&i, &j| work[i * n + i].total_cmp(&work[j * n + j]));
        let mut vals = SmallVec::zeros(n);
        let mut vecs = SmallMat::zeros(n);
        for (new, &old) in order[..n].iter().enumerate() {
            vals[new] = work[old * n + old];
            for r in 0..n {
                vecs.a[r][new] = v[r * n + old];
            }
        }
        (vals, vecs)
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        self.symmetric_eigen().0[0]
    }

    /// Spectral norm of a symmetric matrix (largest `|λ|`).
    pub fn symmetric_spectral_norm(&self) -> f64 {
        let (vals, _) = self.symmetric_eigen();
        vals.as_slice().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Spectral norm of a general matrix, `sqrt(λ_max(AᵀA))`.
    pub fn spectral_norm(&self) -> f64 {
        let ata = self.transpose().matmul(self);
        let (vals, _) = ata.symmetric_eigen();
        math::sqrt(vals[self.n - 1].max(0.0))
    }

    /// Matrix absolute value `|A| = Q |Λ| Qᵀ` of a symmetric matrix.
    pub fn symmetric_abs(&self) -> SmallMat {
        let n = self.n;
        let (vals, q) = self.symmetric_eigen();
        let mut out = SmallMat::zeros(n);
        for k in 0..n {
            let l = vals[k].abs();
            if l == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = q.a[i][k] * l;
                for j in 0..n {
                    out.a[i][j] += qik * q.a[j][k];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for SmallMat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.n && j < self.n);
        &self.a[i][j]
    }
}

impl IndexMut<(usize, usize)> for SmallMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.n && j < self.n);
        &mut self.a[i][j]
    }
}

impl Add for SmallMat {
    type Output = SmallMat;
    fn add(mut self, o: SmallMat) -> SmallMat {
        self += o;
        self
    }
}

impl AddAssign for SmallMat {
    fn add_assign(&mut self, o: SmallMat) {
        debug_assert_eq!(self.n, o.n);
        for i in 0..self.n {
            for j in 0..self.n {
                self.a[i][j] += o.a[i][j];
            }
        }
    }
}

impl Sub for SmallMat {
    type Output = SmallMat;
    fn sub(mut self, o: SmallMat) -> SmallMat {
        for i in 0..self.n {
            for j in 0..self.n {
                self.a[i][j] -= o.a[i][j];
            }
        }
        self
    }
}

impl Neg for SmallMat {
    type Output = SmallMat;
    fn neg(self) -> SmallMat {
        self.scaled(-1.0)
    }
}

/// Cross-product matrix `V_a` with `V_a s = a × s`.
pub fn cross_matrix(a: Vec3) -> [[f64; 3]; 3] {
    [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
}

/// Levi-Civita matrix `R^j` with `(R^j)_{ik} = ε_{ijk}`.
pub fn levi_civita_matrix(j: usize) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            *e = levi_civita(i, j, k);
        }
    }
    r
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_of_diagonal() {
        let m = SmallMat::diagonal(&[1.0, -2.0, 0.0]);
        let a = m.symmetric_abs();
        assert_eq!(a, SmallMat::diagonal(&[1.0, 2.0, 0.0]));
    }

    #[test]
    fn abs_squares_to_square() {
        let m = SmallMat::from_rows(&[&[0.0, 0.3, 1.0], &[0.3, 1.0, -0.2], &[1.0, -0.2, -0.5]]);
        let a = m.symmetric_abs();
        let a2 = a.matmul(&a);
        let m2 = m.matmul(&m);
        assert!((a2 - m2).max_abs() < 1e-14);
    }

    #[test]
    fn levi_civita_builds_curl() {
        // Σ_j R^j α_j s = α × s
        let alpha = Vec3::new(0.3, -1.2, 2.0);
        let s = Vec3::new(1.0, 0.5, -0.7);
        let mut out = Vec3::ZERO;
        for j in 0..3 {
            let r = levi_civita_matrix(j);
            for i in 0..3 {
                for k in 0..3 {
                    out[i] += r[i][k] * alpha[j] * s[k];
                }
            }
        }
        let want = alpha.cross(&s);
        assert!((out - want).norm() < 1e-15);
        let v = cross_matrix(alpha);
        for i in 0..3 {
            let vi: f64 = (0..3).map(|k| v[i][k] * s[k]).sum();
            assert!((vi - want[i]).abs() < 1e-15);
        }
    }
}
