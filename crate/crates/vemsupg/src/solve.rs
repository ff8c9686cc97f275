//! Linear solves: sparse LU through `faer`, or the GMRES path of the core crate.

use std::panic::AssertUnwindSafe;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};
use vemsupg_core::assembly::{CsrMatrix, GlobalSystem};
use vemsupg_core::solver::{self, SolveError, SolveMethod, SolveOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    /// `||b - A x|| / ||b||`.
    pub residual: f64,
}

/// Sparse LU with partial pivoting. Runs sequentially so results do not
/// depend on the thread count. A zero pivot is reported as
/// [`SolveError::Singular`]; the panic message of the factorization may
/// still reach stderr.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    faer::set_global_parallelism(Par::Seq);
    let n = a.n_rows;
    let mut triplets = Vec::with_capacity(a.nnz());
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            triplets.push(Triplet::new(r, c, v));
        }
    }
    let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, a.n_cols, &triplets).map_err(|_| SolveError::Singular)?;
    // faer panics on an exactly zero pivot instead of reporting it
    let lu = std::panic::catch_unwind(AssertUnwindSafe(|| m.sp_lu()))
        .map_err(|_| SolveError::Singular)?
        .map_err(|_| SolveError::Singular)?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    lu.solve_in_place(rhs.as_mut());
    let x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(SolveError::Singular)
    }
}

pub fn solve_csr(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<Solution, SolveError> {
    let values = match opts.method {
        SolveMethod::Direct => solve_direct(a, b)?,
        SolveMethod::Krylov => solver::gmres(a, b, opts)?.0,
    };
    let residual = a.relative_residual(&values, b);
    Ok(Solution { values, residual })
}

pub fn solve(system: &GlobalSystem, opts: &SolveOptions) -> Result<Solution, SolveError> {
    solve_csr(&system.matrix, &system.rhs, opts)
}
