//! Block-sparse (BSR) matrices with square blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DMat;

/// Square block-sparse matrix: `n × n` blocks of size `bs × bs`, each
/// stored row-major; block columns sorted within each block row.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSparse {
    bs: usize,
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl BlockSparse {
    /// Zero matrix with the given block pattern (`rows[r]` sorted, unique).
    pub fn from_pattern(bs: usize, rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len() * bs * bs];
        BlockSparse {
            bs,
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.bs
    }

    #[inline]
    pub fn block_rows(&self) -> usize {
        self.n
    }

    /// Scalar dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n * self.bs
    }

    /// Number of stored scalar entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn block_cols(&self, r: usize) -> &[usize] {
        &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    fn position(&self, r: usize, c: usize) -> Option<usize> {
        let start = self.row_ptr[r];
        self.block_cols(r).binary_search(&c).ok().map(|p| start + p)
    }

    pub fn block(&self, r: usize, c: usize) -> Option<&[f64]> {
        let bb = self.bs * self.bs;
        self.position(r, c).map(|p| &self.vals[p * bb..(p + 1) * bb])
    }

    pub fn block_mut(&mut self, r: usize, c: usize) -> Option<&mut [f64]> {
        let bb = self.bs * self.bs;
        self.position(r, c).map(move |p| &mut self.vals[p * bb..(p + 1) * bb])
    }

    /// Add the `bs × bs` sub-block of `src` starting at `(r0, c0)` to block `(r, c)`.
    /// Panics if the block is outside the pattern.
    pub fn add_from(&mut self, r: usize, c: usize, src: &DMat, r0: usize, c0: usize) {
        let bs = self.bs;
        let dst = self.block_mut(r, c).expect("block outside the sparsity pattern");
        for i in 0..bs {
            let s = &src.row(r0 + i)[c0..c0 + bs];
            for (d, v) in dst[i * bs..(i + 1) * bs].iter_mut().zip(s) {
                *d += v;
            }
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let bs = self.bs;
        let bb = bs * bs;
        for r in 0..self.n {
            let yr = &mut y[r * bs..(r + 1) * bs];
            yr.iter_mut().for_each(|v| *v = 0.0);
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p];
                let blk = &self.vals[p * bb..(p + 1) * bb];
                let xc = &x[c * bs..(c + 1) * bs];
                for (i, yi) in yr.iter_mut().enumerate() {
                    let row = &blk[i * bs..(i + 1) * bs];
                    *yi += row.iter().zip(xc).map(|(a, b)| a * b).sum::<f64>();
                }
            }
        }
    }

    /// Stored entries as `(row, col, value)`, row-major within blocks.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let bs = self.bs;
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).flat_map(move |p| {
                let c = self.cols[p];
                (0..bs * bs).map(move |e| (r * bs + e / bs, c * bs + e % bs, self.vals[p * bs * bs + e]))
            })
        })
    }

    pub fn to_dense(&self) -> DMat {
        let mut d = DMat::zeros(self.dim(), self.dim());
        for (i, j, v) in self.triplets() {
            d[(i, j)] += v;
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_matches_dense() {
        let rows = vec![vec![0, 2], vec![1], vec![0, 1, 2]];
        let mut a = BlockSparse::from_pattern(2, &rows);
        let mut src = DMat::zeros(2, 2);
        let mut v = 1.0;
        for r in 0..3 {
            for &c in &rows[r] {
                for i in 0..2 {
                    for j in 0..2 {
                        src[(i, j)] = v;
                        v += 0.5;
                    }
                }
                a.add_from(r, c, &src, 0, 0);
            }
        }
        let x = [1.0, -2.0, 0.5, 3.0, -1.0, 0.25];
        let mut y = [0.0; 6];
        a.matvec(&x, &mut y);
        let yd = a.to_dense().mul_vec(&x);
        for i in 0..6 {
            assert!((y[i] - yd[i]).abs() < 1e-14);
        }
        assert!(a.block(1, 0).is_none());
    }
}
