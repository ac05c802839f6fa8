//! Small dense linear algebra: row-major matrices, LU with partial
//! pivoting, Cholesky, and a cyclic Jacobi eigensolver for symmetric
//! matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DMat { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DMat {
        let mut t = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y += self * x`
    pub fn mul_vec_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            *yi += self.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    /// `y += selfᵀ * x`
    pub fn mul_vec_transpose_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, xi) in x.iter().enumerate().take(self.rows) {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// Bilinear form `yᵀ A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        (0..self.rows)
            .map(|i| y[i] * self.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }
}

impl Index<(usize, usize)> for DMat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Pivot below this fraction of the largest entry is treated as zero.
const SINGULAR_RTOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Lu {
    lu: DMat,
    perm: Vec<usize>,
}

/// Raised when elimination meets a (numerically) zero pivot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl Lu {
    pub fn factor(mut a: DMat) -> Result<Lu, SingularMatrix> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let scale = a.max_abs();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= SINGULAR_RTOL * scale || best == 0.0 {
                return Err(SingularMatrix { column: k });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                a[(i, k)] = f;
                let (upper, lower) = a.data.split_at_mut(i * n);
                let krow = &upper[k * n + k + 1..k * n + n];
                let irow = &mut lower[k + 1..n];
                for (x, y) in irow.iter_mut().zip(krow) {
                    *x -= f * y;
                }
            }
        }
        Ok(Lu { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        b.copy_from_slice(&x);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve for every column of `b`.
    pub fn solve_mat(&self, b: &DMat) -> DMat {
        let bt = b.transpose();
        let mut out = DMat::zeros(b.cols, b.rows);
        for j in 0..b.cols {
            let mut col = bt.row(j).to_vec();
            self.solve_in_place(&mut col);
            out.row_mut(j).copy_from_slice(&col);
        }
        out.transpose()
    }
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`; `None` if `A` is not
/// numerically positive definite.
pub fn cholesky(a: &DMat) -> Option<DMat> {
    let n = a.rows;
    let mut l = DMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = math::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &DMat) -> DMat {
    let n = l.rows;
    let mut inv = DMat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = s / l[(i, i)];
        }
    }
    inv
}

/// Cyclic Jacobi sweeps on a symmetric row-major `n×n` matrix stored in
/// `a`. On return the diagonal of `a` holds the eigenvalues and the
/// columns of `v` the matching orthonormal eigenvectors.
pub fn jacobi_eigen_in_place(a: &mut [f64], v: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = if i == j { 1.0 } else { 0.0 };
        }
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[i * n + i] * a[i * n + i];
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a symmetric matrix.
pub fn symmetric_eigen(a: &DMat) -> (Vec<f64>, DMat) {
    let n = a.rows;
    let mut work = a.data.clone();
    let mut v = vec![0.0; n * n];
    jacobi_eigen_in_place(&mut work, &mut v, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[i * n + i].total_cmp(&work[j * n + j]));
    let vals = order.iter().map(|&i| work[i * n + i]).collect();
    let mut vecs = DMat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, new)] = v[r * n + old];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DMat {
        DMat::from_row_major(3, 3, vec![4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0])
    }

    #[test]
    fn lu_solves_with_pivoting() {
        let a = DMat::from_row_major(3, 3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]);
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let lu = Lu::factor(a).unwrap();
        let y = lu.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn lu_flags_singular() {
        let a = DMat::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(Lu::factor(a).is_err());
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = sample();
        let l = cholesky(&a).unwrap();
        let r = l.matmul(&l.transpose());
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[(i, j)] - a[(i, j)]).abs() < 1e-14);
            }
        }
        let li = lower_inverse(&l);
        let id = li.matmul(&l);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobi_eigen_decomposes() {
        let a = sample();
        let (vals, vecs) = symmetric_eigen(&a);
        for (k, lam) in vals.iter().enumerate() {
            let col: Vec<f64> = (0..3).map(|r| vecs[(r, k)]).collect();
            let av = a.mul_vec(&col);
            for r in 0..3 {
                assert!((av[r] - lam * col[r]).abs() < 1e-13);
            }
        }
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let trace: f64 = vals.iter().sum();
        assert!((trace - 12.0).abs() < 1e-13);
    }
}
