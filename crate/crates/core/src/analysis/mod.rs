//! Error norms, convergence tables, benchmark problems and layer metrics.

mod layer;
mod problems;

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{CellSystem, FunctionProjection};
use crate::linalg::Mat;
use crate::mesh::Mesh;
use crate::poly::{cell_quadrature, eval_poly};
use crate::supg::{CoefficientField, ExactSolution};
use crate::vemspace::{dof_functionals, DofMap};

pub use layer::{layer_metrics, sample_grid, LayerMetrics, LayerSample};
pub use problems::{LayerProblem, MonomialProblem, Problem, Problem1};

/// Relative errors of a discrete solution; the `abs_*` fields hold the
/// unnormalized values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub h_max: f64,
    pub ndof: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub err_energy: f64,
    pub abs_l2: f64,
    pub abs_h1: f64,
    pub abs_energy: f64,
}

/// Local dof values of cell `c` gathered from a global vector.
pub fn local_values(mesh: &Mesh, dofmap: &DofMap, c: usize, global: &[f64]) -> Mat {
    let dofs = dofmap.cell_dofs(mesh, c);
    Mat::from_iterator(dofs.len(), 1, dofs.iter().map(|&g| global[g]))
}

/// Projection-based errors:
///
/// * `L2`: `|| u - Pi0_k u_h ||`
/// * `H1`: `|| grad u - Pi0_{k-1} grad u_h ||` (broken)
/// * energy: `|| K_beta^(1/2) (grad u - Pi0_{k-1} grad u_h) ||^2
///   + S(u_I - u_h, u_I - u_h) + || gamma^(1/2) (u - P u_h) ||^2`, with `u_I`
///   the interpolant and `P` the function projection of the forms.
///
/// Each is divided by the same norm of `u` (`u_h = 0`).
pub fn compute_errors(
    mesh: &Mesh,
    dofmap: &DofMap,
    cells: &[CellSystem],
    uh: &[f64],
    exact: &dyn ExactSolution,
    coeffs: &dyn CoefficientField,
    projection: FunctionProjection,
) -> ErrorReport {
    let k = dofmap.k;
    let mut e = [0.0; 3];
    let mut n = [0.0; 3];
    for (c, cs) in cells.iter().enumerate() {
        let ops = &cs.ops;
        let cell = mesh.local_cell(c);
        let rule = cell_quadrature(&cell, 2 * k + 6).unwrap_or_else(|_| ops.rule.clone());
        let vals = local_values(mesh, dofmap, c, uh);
        let l2c = &ops.pi0_k * &vals;
        let gx = &ops.pi0_grad[0] * &vals;
        let gy = &ops.pi0_grad[1] * &vals;
        let fp = cs.function_projection(projection) * &vals;
        for (p, w) in rule.iter() {
            let m = ops.basis.eval(p);
            let u = exact.value(p);
            let gu = exact.gradient(p);
            let du = u - eval_poly(&m, l2c.as_slice());
            let dg = [gu[0] - eval_poly(&m, gx.as_slice()), gu[1] - eval_poly(&m, gy.as_slice())];
            e[0] += w * du * du;
            n[0] += w * u * u;
            e[1] += w * (dg[0] * dg[0] + dg[1] * dg[1]);
            n[1] += w * (gu[0] * gu[0] + gu[1] * gu[1]);
            let kb = cs.params.effective_tensor(coeffs.diffusion(p), coeffs.convection(p));
            let energy = |q: [f64; 2]| {
                q[0] * (kb[0][0] * q[0] + kb[0][1] * q[1]) + q[1] * (kb[1][0] * q[0] + kb[1][1] * q[1])
            };
            let gamma = coeffs.reaction(p);
            let dfp = u - eval_poly(&m, fp.as_slice());
            e[2] += w * (energy(dg) + gamma * dfp * dfp);
            n[2] += w * (energy(gu) + gamma * u * u);
        }
        if let Ok(ui) = dof_functionals(&cell, k, |p| exact.value(p)) {
            let ui = Mat::from_column_slice(ui.len(), 1, &ui);
            let diff = &ui - &vals;
            e[2] += (diff.transpose() * &cs.local.stab * &diff)[0];
            n[2] += (ui.transpose() * &cs.local.stab * &ui)[0];
        }
    }
    let abs = e.map(|v| libm::sqrt(v.max(0.0)));
    let nrm = n.map(|v| libm::sqrt(v.max(0.0)));
    let rel = |i: usize| if nrm[i] > 0.0 { abs[i] / nrm[i] } else { abs[i] };
    ErrorReport {
        h_max: mesh.h_max(),
        ndof: dofmap.n_dofs,
        err_l2: rel(0),
        err_h1: rel(1),
        err_energy: rel(2),
        abs_l2: abs[0],
        abs_h1: abs[1],
        abs_energy: abs[2],
    }
}

/// `log2(e_prev / e_next)`, undefined for non-positive errors.
pub fn rate(prev: f64, next: f64) -> Option<f64> {
    if prev > 0.0 && next > 0.0 {
        Some(libm::log2(prev / next))
    } else {
        None
    }
}

/// Errors per refinement and the rates between successive rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
}

/// Rates of one row with respect to the previous one: `[l2, h1, energy]`.
pub type Rates = [Option<f64>; 3];

impl ConvergenceTable {
    pub fn push(&mut self, r: ErrorReport) {
        self.rows.push(r);
    }

    pub fn rates(&self) -> Vec<Rates> {
        let mut out = vec![[None; 3]; self.rows.len()];
        for i in 1..self.rows.len() {
            let (a, b) = (&self.rows[i - 1], &self.rows[i]);
            out[i] = [rate(a.err_l2, b.err_l2), rate(a.err_h1, b.err_h1), rate(a.err_energy, b.err_energy)];
        }
        out
    }

    pub fn last_rates(&self) -> Rates {
        self.rates().last().copied().unwrap_or([None; 3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_halve() {
        let mut t = ConvergenceTable::default();
        for (i, e) in [0.1, 0.025, 0.00625].iter().enumerate() {
            t.push(ErrorReport {
                h_max: 0.5 / (1 << i) as f64,
                err_l2: *e,
                err_h1: e * 10.0,
                err_energy: 0.0,
                ..Default::default()
            });
        }
        let r = t.rates();
        assert_eq!(r[0], [None; 3]);
        assert!((r[2][0].unwrap() - 2.0).abs() < 1e-12);
        assert!((r[1][1].unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r[2][2], None);
    }
}
