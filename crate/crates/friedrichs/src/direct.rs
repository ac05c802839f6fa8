//! Sparse direct LU of the condensed system, backed by faer.

use faer::sparse::{SparseColMat, Triplet};
use faer::prelude::Solve;
use faer::Mat;
use friedrichs_core::error::{Error, Result};
use friedrichs_core::solve::{relative_residual, LinearSolver, SolveReport};
use friedrichs_core::sparse::BlockSparse;

#[derive(Clone, Copy, Debug, Default)]
pub struct SparseLu;

impl LinearSolver for SparseLu {
    fn name(&self) -> &str {
        "sparse-lu"
    }

    fn solve(&self, a: &BlockSparse, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let n = a.dim();
        let entries: Vec<Triplet<usize, usize, f64>> = a
            .triplets()
            .filter(|t| t.2 != 0.0)
            .map(|(row, col, val)| Triplet { row, col, val })
            .collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::SingularSystem { detail: format!("matrix creation failed: {e:?}") })?;
        drop(entries);
        let lu = m
            .sp_lu()
            .map_err(|e| Error::SingularSystem { detail: format!("sparse LU failed: {e:?}") })?;
        let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
        let sol = lu.solve(&rhs);
        let x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
        let res = relative_residual(a, &x, b);
        if !res.is_finite() {
            return Err(Error::SingularSystem { detail: "non-finite solution".into() });
        }
        let report = SolveReport {
            solver: self.name().to_string(),
            dim: n,
            iterations: 1,
            relative_residual: res,
        };
        Ok((x, report))
    }
}
