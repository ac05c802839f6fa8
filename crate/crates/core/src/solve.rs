//! Linear solvers for the condensed face system.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{assemble_global, CondensedSystem};
use crate::basis::HybridField;
use crate::dense::{DMat, Lu};
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::sparse::BlockSparse;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solver: String,
    pub dim: usize,
    pub iterations: usize,
    /// `‖b − A x‖ / ‖b‖` of the returned solution.
    pub relative_residual: f64,
}

pub trait LinearSolver {
    fn name(&self) -> &str;
    fn solve(&self, a: &BlockSparse, b: &[f64]) -> Result<(Vec<f64>, SolveReport)>;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// `‖b − A x‖ / ‖b‖`, or `‖A x‖` when `b = 0`.
pub fn relative_residual(a: &BlockSparse, x: &[f64], b: &[f64]) -> f64 {
    let mut r = vec![0.0; b.len()];
    a.matvec(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let nb = norm(b);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

/// Dense partial-pivoting LU of the whole matrix. Small systems only.
#[derive(Clone, Copy, Debug, Default)]
pub struct DenseLu;

impl LinearSolver for DenseLu {
    fn name(&self) -> &str {
        "dense-lu"
    }

    fn solve(&self, a: &BlockSparse, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let lu = Lu::factor(a.to_dense()).map_err(|e| Error::SingularSystem {
            detail: alloc::format!("zero pivot in column {}", e.column),
        })?;
        let x = lu.solve(b);
        let report = SolveReport {
            solver: self.name().to_string(),
            dim: b.len(),
            iterations: 1,
            relative_residual: relative_residual(a, &x, b),
        };
        Ok((x, report))
    }
}

/// Inverse of the diagonal blocks.
pub struct BlockJacobi {
    bs: usize,
    blocks: Vec<Lu>,
}

impl BlockJacobi {
    pub fn new(a: &BlockSparse) -> Result<Self> {
        let bs = a.block_size();
        let mut blocks = Vec::with_capacity(a.block_rows());
        for r in 0..a.block_rows() {
            let d = a.block(r, r).map(|s| s.to_vec()).unwrap_or_else(|| vec![0.0; bs * bs]);
            let lu = Lu::factor(DMat::from_row_major(bs, bs, d)).map_err(|e| Error::SingularSystem {
                detail: alloc::format!("diagonal block {r} is singular (column {})", e.column),
            })?;
            blocks.push(lu);
        }
        Ok(BlockJacobi { bs, blocks })
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        for (r, lu) in self.blocks.iter().enumerate() {
            lu.solve_in_place(&mut y[r * self.bs..(r + 1) * self.bs]);
        }
    }
}

/// Right-preconditioned BiCGSTAB with a block-Jacobi preconditioner.
#[derive(Clone, Copy, Debug)]
pub struct Bicgstab {
    pub tol: f64,
    /// Iteration cap; `10 × dim` when `None`.
    pub max_iterations: Option<usize>,
}

impl Default for Bicgstab {
    fn default() -> Self {
        Bicgstab {
            tol: 1e-10,
            max_iterations: None,
        }
    }
}

impl LinearSolver for Bicgstab {
    fn name(&self) -> &str {
        "bicgstab-block-jacobi"
    }

    fn solve(&self, a: &BlockSparse, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let n = b.len();
        let max_it = self.max_iterations.unwrap_or(10 * n.max(1));
        let pre = BlockJacobi::new(a)?;
        let nb = norm(b);
        let mut x = vec![0.0; n];
        let report = |x: &[f64], it| SolveReport {
            solver: self.name().to_string(),
            dim: n,
            iterations: it,
            relative_residual: relative_residual(a, x, b),
        };
        if nb == 0.0 {
            let rep = report(&x, 0);
            return Ok((x, rep));
        }
        let target = self.tol * nb;

        let mut r = b.to_vec();
        let mut r_hat = r.clone();
        let mut p = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut t = vec![0.0; n];
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);

        for it in 1..=max_it {
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() < 1e-30 * nb * nb {
                // shadow residual became orthogonal: restart from the current residual
                r_hat.copy_from_slice(&r);
                p.iter_mut().for_each(|e| *e = 0.0);
                v.iter_mut().for_each(|e| *e = 0.0);
                rho = 1.0;
                alpha = 1.0;
                omega = 1.0;
                continue;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            pre.apply(&p, &mut y);
            a.matvec(&y, &mut v);
            alpha = rho / dot(&r_hat, &v);
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) <= target {
                for i in 0..n {
                    x[i] += alpha * y[i];
                }
                return Ok((x.clone(), report(&x, it)));
            }
            pre.apply(&s, &mut z);
            a.matvec(&z, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) <= target {
                // guard against drift of the recursive residual
                let rel = relative_residual(a, &x, b);
                if rel <= self.tol * 10.0 {
                    return Ok((x.clone(), report(&x, it)));
                }
                a.matvec(&x, &mut r);
                for i in 0..n {
                    r[i] = b[i] - r[i];
                }
            }
            if omega == 0.0 || !omega.is_finite() || !alpha.is_finite() {
                break;
            }
        }
        Err(Error::NoConvergence {
            iterations: max_it,
            residual: relative_residual(a, &x, b),
        })
    }
}

/// Assemble, condense, solve for the face unknowns and recover the
/// element unknowns.
pub fn solve(disc: &Discretization<'_>, solver: &dyn LinearSolver) -> Result<(HybridField, SolveReport)> {
    let system = assemble_global(disc)?;
    solve_system(disc, &system, solver)
}

pub fn solve_system(
    disc: &Discretization<'_>,
    system: &CondensedSystem,
    solver: &dyn LinearSolver,
) -> Result<(HybridField, SolveReport)> {
    let (uf, report) = solver.solve(&system.matrix, &system.rhs)?;
    Ok((system.recover(disc, &uf), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix() -> BlockSparse {
        let n = 6;
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|r| {
                let mut v = vec![r];
                if r > 0 {
                    v.insert(0, r - 1);
                }
                if r + 1 < n {
                    v.push(r + 1);
                }
                v
            })
            .collect();
        let mut a = BlockSparse::from_pattern(2, &rows);
        for r in 0..n {
            let d = DMat::from_row_major(2, 2, vec![4.0, 1.0, -0.5, 3.0]);
            a.add_from(r, r, &d, 0, 0);
            let o = DMat::from_row_major(2, 2, vec![-1.0, 0.2, 0.3, -0.7]);
            if r > 0 {
                a.add_from(r, r - 1, &o, 0, 0);
            }
            if r + 1 < n {
                a.add_from(r, r + 1, &o.transpose(), 0, 0);
            }
        }
        a
    }

    #[test]
    fn bicgstab_agrees_with_lu() {
        let a = test_matrix();
        let b: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let (x1, r1) = DenseLu.solve(&a, &b).unwrap();
        let (x2, r2) = Bicgstab::default().solve(&a, &b).unwrap();
        assert!(r1.relative_residual < 1e-13);
        assert!(r2.relative_residual < 1e-9);
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let (x, r) = Bicgstab::default().solve(&test_matrix(), &[0.0; 12]).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
        assert_eq!(r.iterations, 0);
    }
}
