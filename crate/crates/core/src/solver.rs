//! Iterative solution of the assembled nonsymmetric system: restarted GMRES
//! with an ILU(0) preconditioner. The sparse direct path lives in the std
//! crate; [`solve`] falls back to a dense LU for the direct method.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assembly::CsrMatrix;
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveMethod {
    #[default]
    Direct,
    Krylov,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Relative residual target of the Krylov method.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: SolveMethod::Direct,
            tolerance: 1e-12,
            max_iterations: 5000,
            restart: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolveError {
    Singular,
    NotConverged { iterations: usize, residual: f64 },
    InvalidOptions,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Singular => f.write_str("matrix is singular"),
            Self::NotConverged { iterations, residual } => {
                write!(f, "GMRES did not converge in {iterations} iterations (relative residual {residual:e})")
            }
            Self::InvalidOptions => f.write_str("tolerance must be positive and iteration counts nonzero"),
        }
    }
}

impl core::error::Error for SolveError {}

/// Incomplete LU factorization with the sparsity pattern of `A`.
#[derive(Clone, Debug)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self, SolveError> {
        let mut lu = a.clone();
        let n = lu.n_rows;
        let mut diag = vec![usize::MAX; n];
        for (r, d) in diag.iter_mut().enumerate() {
            let (cols, _) = lu.row(r);
            if let Ok(i) = cols.binary_search(&r) {
                *d = lu.row_ptr[r] + i;
            } else {
                return Err(SolveError::Singular);
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (lo, hi) = (lu.row_ptr[i], lu.row_ptr[i + 1]);
            for p in lo..hi {
                pos[lu.col_idx[p]] = p;
            }
            for p in lo..hi {
                let kcol = lu.col_idx[p];
                if kcol >= i {
                    break;
                }
                let pivot = lu.values[diag[kcol]];
                if pivot == 0.0 {
                    return Err(SolveError::Singular);
                }
                let factor = lu.values[p] / pivot;
                lu.values[p] = factor;
                for q in diag[kcol] + 1..lu.row_ptr[kcol + 1] {
                    let j = lu.col_idx[q];
                    let target = pos[j];
                    if target != usize::MAX {
                        lu.values[target] -= factor * lu.values[q];
                    }
                }
            }
            for p in lo..hi {
                pos[lu.col_idx[p]] = usize::MAX;
            }
            if lu.values[diag[i]] == 0.0 {
                return Err(SolveError::Singular);
            }
        }
        Ok(Self { lu, diag })
    }

    /// `z = (LU)^{-1} r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.lu.n_rows;
        for i in 0..n {
            let mut s = r[i];
            for p in self.lu.row_ptr[i]..self.diag[i] {
                s -= self.lu.values[p] * z[self.lu.col_idx[p]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for p in self.diag[i] + 1..self.lu.row_ptr[i + 1] {
                s -= self.lu.values[p] * z[self.lu.col_idx[p]];
            }
            z[i] = s / self.lu.values[self.diag[i]];
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned restarted GMRES; the reported residual is the true
/// relative residual `||b - A x|| / ||b||`.
pub fn gmres(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, usize, f64), SolveError> {
    if !(opts.tolerance > 0.0) || opts.max_iterations == 0 || opts.restart == 0 {
        return Err(SolveError::InvalidOptions);
    }
    let n = a.n_rows;
    let ilu = Ilu0::new(a)?;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let m = opts.restart.min(n.max(1));
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut rel = 1.0;
    let mut z = vec![0.0; n];
    while iterations < opts.max_iterations {
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.tolerance {
            return Ok((x, iterations, rel));
        }
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            ilu.apply(&v[j], &mut z);
            let mut w = a.mul_vec(&z);
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
            }
            let wn = norm(&w);
            h[j + 1][j] = wn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let d = libm::hypot(h[j][j], h[j + 1][j]);
            if d == 0.0 {
                return Err(SolveError::Singular);
            }
            cs[j] = h[j][j] / d;
            sn[j] = h[j + 1][j] / d;
            h[j][j] = d;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            iterations += 1;
            if g[j + 1].abs() / bnorm <= 0.1 * opts.tolerance || wn == 0.0 || iterations >= opts.max_iterations {
                break;
            }
            v.push(w.iter().map(|wk| wk / wn).collect());
        }
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|l| h[i][l] * y[l]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut dx = vec![0.0; n];
        for (i, yi) in y.iter().enumerate() {
            for (d, vk) in dx.iter_mut().zip(&v[i]) {
                *d += yi * vk;
            }
        }
        ilu.apply(&dx, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        let ax = a.mul_vec(&x);
        for ((ri, bi), axi) in r.iter_mut().zip(b).zip(&ax) {
            *ri = bi - axi;
        }
    }
    rel = rel.min(norm(&r) / bnorm);
    if rel <= opts.tolerance {
        Ok((x, iterations, rel))
    } else {
        Err(SolveError::NotConverged { iterations, residual: rel })
    }
}

/// Dense LU solve; intended for small systems and tests.
pub fn solve_dense(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = a.n_rows;
    let mut m = Mat::zeros(n, n);
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            m[(r, c)] = v;
        }
    }
    let rhs = Mat::from_column_slice(n, 1, b);
    crate::linalg::solve(&m, &rhs)
        .map(|x| x.as_slice().to_vec())
        .ok_or(SolveError::Singular)
}

pub fn solve(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<Vec<f64>, SolveError> {
    match opts.method {
        SolveMethod::Direct => solve_dense(a, b),
        SolveMethod::Krylov => gmres(a, b, opts).map(|(x, _, _)| x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i > 0 {
                t.push((i, i - 1, -1.5));
            }
            if i + 1 < n {
                t.push((i, i + 1, -0.5));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = [1.0, -2.0, 3.5];
        let opts = SolveOptions::default();
        assert_eq!(solve(&CsrMatrix::identity(3), &b, &opts).unwrap(), b.to_vec());
        let kr = SolveOptions {
            method: SolveMethod::Krylov,
            ..opts
        };
        let x = solve(&CsrMatrix::identity(3), &b, &kr).unwrap();
        assert!(x.iter().zip(&b).all(|(x, b)| (x - b).abs() < 1e-14));
    }

    #[test]
    fn two_by_two() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        for method in [SolveMethod::Direct, SolveMethod::Krylov] {
            let opts = SolveOptions {
                method,
                ..Default::default()
            };
            let x = solve(&a, &[3.0, 3.0], &opts).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ilu_is_exact_for_tridiagonal() {
        // no fill-in, so ILU(0) is the full LU and GMRES converges at once
        let a = tridiag(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let (x, it, res) = gmres(&a, &b, &SolveOptions::default()).unwrap();
        assert!(it <= 2 && res < 1e-12);
        assert!(a.relative_residual(&x, &b) < 1e-12);
    }

    #[test]
    fn non_convergence_reports_residual() {
        // 5-point Laplacian: ILU(0) drops fill, so two iterations are not enough
        let n = 12;
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let r = j * n + i;
                t.push((r, r, 4.0));
                if i > 0 {
                    t.push((r, r - 1, -1.0));
                }
                if i + 1 < n {
                    t.push((r, r + 1, -1.0));
                }
                if j > 0 {
                    t.push((r, r - n, -1.0));
                }
                if j + 1 < n {
                    t.push((r, r + n, -1.0));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n * n, n * n, &t);
        let b: Vec<f64> = (0..n * n).map(|i| 1.0 + (i % 7) as f64).collect();
        let opts = SolveOptions {
            method: SolveMethod::Krylov,
            tolerance: 1e-14,
            max_iterations: 2,
            restart: 10,
        };
        match gmres(&a, &b, &opts) {
            Err(SolveError::NotConverged { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14 && residual < 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
