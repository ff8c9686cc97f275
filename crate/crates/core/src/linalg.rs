//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Solves `a x = b` by LU with partial pivoting; `None` if `a` is singular
/// to working precision.
pub fn solve(a: &Mat, b: &Mat) -> Option<Mat> {
    let lu = a.clone().lu();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let u = lu.u();
    let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(min_pivot > 1e-14 * scale) {
        return None;
    }
    lu.solve(b)
}

/// Largest eigenvalue of the symmetric-definite pencil `a x = lambda b`.
/// `b` must be symmetric positive definite.
pub fn max_generalized_eigenvalue(a: &Mat, b: &Mat) -> Option<f64> {
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    Some(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Mat) -> alloc::vec::Vec<f64> {
    let sym = (a + a.transpose()) * 0.5;
    let mut ev: alloc::vec::Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Extreme eigenvalues of a symmetric 2x2 matrix.
pub fn eig_sym2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let off = 0.5 * (m[0][1] + m[1][0]);
    let r = libm::hypot(half_diff, off);
    (0.5 * tr - r, 0.5 * tr + r)
}
