//! Local discrete forms and global assembly.
//!
//! With `P` the function projection (by default `Pi0_{k-1}`), `G` the
//! projected gradient `Pi0_{k-1} grad` and `tau` the SUPG parameter, the local
//! forms are
//!
//! ```text
//! a(w, v) = (K G w, G v) + tau (beta . G w, beta . G v) + S(w, v)
//! b(w, v) = 1/2 (beta . G w, P v) - 1/2 (P w, beta . G v)
//! c(w, v) = (gamma P w, P v + tau beta . G v)
//! d(w, v) = -tau (div(K G w), beta . G v)
//! F(v)    = (f, P v + tau beta . G v)
//! ```
//!
//! and `S` is the dof-dof stabilization of `(I - Pi_nabla)` scaled by
//! `kappa_E + tau beta_E^2`. When `div beta != 0` the skew form is not
//! consistent with `beta . grad u`; the optional correction
//! `-1/2 (div beta P w, P v)` restores consistency.

mod sparse;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::Point2;
use crate::linalg::Mat;
use crate::mesh::Mesh;
use crate::poly::edge_quadrature;
use crate::poly::EdgeBasis;
use crate::supg::{self, CoefficientField, SupgError, SupgParams};
use crate::vemspace::{DofMap, ElementError, ElementOperators};

pub use sparse::CsrMatrix;

/// Projection applied to function (as opposed to gradient) arguments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FunctionProjection {
    /// `Pi0_{k-1}`.
    #[default]
    Km1,
    /// `Pi0_k`, available through the enhancement.
    K,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormOptions {
    pub function_projection: FunctionProjection,
    pub divergence_correction: bool,
    pub c_tau: f64,
}

impl Default for FormOptions {
    fn default() -> Self {
        Self {
            function_projection: FunctionProjection::Km1,
            divergence_correction: true,
            c_tau: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AssemblyError {
    Element { cell: usize, error: ElementError },
    Coefficients { cell: usize, error: SupgError },
}

impl fmt::Display for AssemblyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Element { cell, error } => write!(f, "cell {cell}: {error}"),
            Self::Coefficients { cell, error } => write!(f, "cell {cell}: {error}"),
        }
    }
}

impl core::error::Error for AssemblyError {}

/// Local matrices of one cell; rows index test dofs, columns trial dofs.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    /// `(K G w, G v) + tau (beta . G w, beta . G v)`.
    pub a: Mat,
    pub stab: Mat,
    /// Exactly skew-symmetric.
    pub b: Mat,
    /// Divergence correction (zero when disabled or `div beta = 0`).
    pub b_div: Mat,
    pub c: Mat,
    pub d: Mat,
    pub matrix: Mat,
    pub rhs: Vec<f64>,
}

/// Everything computed for one cell.
#[derive(Clone, Debug)]
pub struct CellSystem {
    pub ops: ElementOperators,
    pub params: SupgParams,
    pub local: LocalSystem,
}

impl CellSystem {
    /// Monomial coefficients of the function projection used by the forms.
    pub fn function_projection(&self, p: FunctionProjection) -> &Mat {
        match p {
            FunctionProjection::K => &self.ops.pi0_k,
            FunctionProjection::Km1 => &self.ops.pi0_km1,
        }
    }
}

pub fn local_forms(
    ops: &ElementOperators,
    params: &SupgParams,
    coeffs: &dyn CoefficientField,
    opts: &FormOptions,
) -> LocalSystem {
    let n = ops.n_dofs;
    let basis = &ops.basis;
    let nkm1 = ops.n_km1();
    let proj = match opts.function_projection {
        FunctionProjection::K => &ops.pi0_k,
        FunctionProjection::Km1 => &ops.pi0_km1,
    };
    let np = proj.nrows();
    let tau = params.tau;
    let h = ops.diameter;

    let mut a = Mat::zeros(n, n);
    let mut m = Mat::zeros(n, n);
    let mut b_div = Mat::zeros(n, n);
    let mut c = Mat::zeros(n, n);
    let mut d = Mat::zeros(n, n);
    let mut rhs = vec![0.0; n];

    let mut pv = vec![0.0; n];
    let mut gv = [vec![0.0; n], vec![0.0; n]];
    // dg[a][b][i] = d_a (G v_i)_b
    let mut dg = [[vec![0.0; n], vec![0.0; n]], [vec![0.0; n], vec![0.0; n]]];
    let mut bg = vec![0.0; n];
    let mut test = vec![0.0; n];
    let mut kg = [vec![0.0; n], vec![0.0; n]];
    let mut divkg = vec![0.0; n];

    for (x, w) in ops.rule.iter() {
        let mv = basis.eval(x);
        let mg = basis.grad(x);
        let kt = coeffs.diffusion(x);
        let dk = supg::diffusion_gradient(coeffs, x, h);
        let beta = coeffs.convection(x);
        let gamma = coeffs.reaction(x);
        let f = coeffs.source(x);
        for i in 0..n {
            pv[i] = (0..np).map(|al| mv[al] * proj[(al, i)]).sum();
            for s in 0..2 {
                let gs = &ops.pi0_grad[s];
                gv[s][i] = (0..nkm1).map(|al| mv[al] * gs[(al, i)]).sum();
                for ax in 0..2 {
                    dg[ax][s][i] = (0..nkm1).map(|al| mg[al][ax] * gs[(al, i)]).sum();
                }
            }
            let q = [gv[0][i], gv[1][i]];
            let kq = supg::apply(kt, q);
            kg[0][i] = kq[0];
            kg[1][i] = kq[1];
            let dq = [[dg[0][0][i], dg[0][1][i]], [dg[1][0][i], dg[1][1][i]]];
            divkg[i] = supg::div_flux(kt, dk, q, dq);
            bg[i] = beta[0] * q[0] + beta[1] * q[1];
            test[i] = pv[i] + tau * bg[i];
        }
        let divb = if opts.divergence_correction {
            supg::convection_divergence(coeffs, x, h)
        } else {
            0.0
        };
        for i in 0..n {
            rhs[i] += w * f * test[i];
            for j in 0..n {
                a[(i, j)] += w * (kg[0][j] * gv[0][i] + kg[1][j] * gv[1][i] + tau * bg[j] * bg[i]);
                m[(i, j)] += w * bg[j] * pv[i];
                c[(i, j)] += w * gamma * pv[j] * test[i];
                d[(i, j)] -= w * tau * divkg[j] * bg[i];
                if divb != 0.0 {
                    b_div[(i, j)] -= 0.5 * w * divb * pv[j] * pv[i];
                }
            }
        }
    }
    let b = (&m - m.transpose()) * 0.5;
    let defect = ops.non_polynomial_part();
    let stab = defect.transpose() * &defect * params.stability_scale();
    let matrix = &a + &stab + &b + &b_div + &c + &d;
    LocalSystem {
        a,
        stab,
        b,
        b_div,
        c,
        d,
        matrix,
        rhs,
    }
}

/// Operators, SUPG parameters and local forms of cell `c`.
pub fn cell_system(
    mesh: &Mesh,
    c: usize,
    k: usize,
    coeffs: &dyn CoefficientField,
    opts: &FormOptions,
) -> Result<CellSystem, AssemblyError> {
    let cell = mesh.local_cell(c);
    let ops = ElementOperators::new(&cell, k).map_err(|error| AssemblyError::Element { cell: c, error })?;
    let params = supg::cell_params(&ops, &cell.vertices, coeffs, opts.c_tau)
        .map_err(|error| AssemblyError::Coefficients { cell: c, error })?;
    let local = local_forms(&ops, &params, coeffs, opts);
    Ok(CellSystem { ops, params, local })
}

/// Assembled system with Dirichlet rows replaced by identity rows.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofmap: DofMap,
    /// Prescribed values on boundary dofs (zero elsewhere).
    pub dirichlet: Vec<f64>,
}

/// Edge moments `(1/|e|) int_e g m_j` of the boundary data on every boundary
/// dof; zero on the other dofs.
pub fn boundary_values(mesh: &Mesh, dofmap: &DofMap, mut g: impl FnMut(Point2) -> f64) -> Vec<f64> {
    let k = dofmap.k;
    let mut out = vec![0.0; dofmap.n_dofs];
    for (e, edge) in mesh.edges.iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        let eb = EdgeBasis::new(k - 1, edge.midpoint, edge.tangent(), edge.length);
        let rule = edge_quadrature(a, b, 2 * k + 8);
        for (p, w) in rule.iter() {
            let gv = g(p);
            for (j, m) in eb.eval(p).into_iter().enumerate() {
                out[dofmap.edge_base[e] + j] += w * gv * m / edge.length;
            }
        }
    }
    out
}

/// Scatters the local systems (in cell order) and imposes the Dirichlet
/// values strongly: boundary rows become identity rows and boundary columns
/// are moved to the right-hand side. Eliminated entries stay in the pattern
/// as explicit zeros.
pub fn assemble_cells(mesh: &Mesh, dofmap: &DofMap, cells: &[CellSystem], dirichlet: Vec<f64>) -> GlobalSystem {
    let n = dofmap.n_dofs;
    let mut rhs = vec![0.0; n];
    let nnz: usize = cells.iter().map(|c| c.ops.n_dofs * c.ops.n_dofs).sum();
    let mut triplets = Vec::with_capacity(nnz);
    for (c, cs) in cells.iter().enumerate() {
        let dofs = dofmap.cell_dofs(mesh, c);
        let lm = &cs.local.matrix;
        for (i, &gi) in dofs.iter().enumerate() {
            if dofmap.boundary[gi] {
                for &gj in &dofs {
                    triplets.push((gi, gj, 0.0));
                }
                continue;
            }
            rhs[gi] += cs.local.rhs[i];
            for (j, &gj) in dofs.iter().enumerate() {
                if dofmap.boundary[gj] {
                    rhs[gi] -= lm[(i, j)] * dirichlet[gj];
                    triplets.push((gi, gj, 0.0));
                } else {
                    triplets.push((gi, gj, lm[(i, j)]));
                }
            }
        }
    }
    for (i, &bnd) in dofmap.boundary.iter().enumerate() {
        if bnd {
            triplets.push((i, i, 1.0));
            rhs[i] = dirichlet[i];
        }
    }
    GlobalSystem {
        matrix: CsrMatrix::from_triplets(n, n, &triplets),
        rhs,
        dofmap: dofmap.clone(),
        dirichlet,
    }
}

/// Sequential assembly; see [`assemble_cells`].
pub fn assemble(
    mesh: &Mesh,
    k: usize,
    coeffs: &dyn CoefficientField,
    opts: &FormOptions,
    g: impl FnMut(Point2) -> f64,
) -> Result<(GlobalSystem, Vec<CellSystem>), AssemblyError> {
    let dofmap = DofMap::new(mesh, k);
    let cells = (0..mesh.n_cells())
        .map(|c| cell_system(mesh, c, k, coeffs, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let dirichlet = boundary_values(mesh, &dofmap, g);
    let system = assemble_cells(mesh, &dofmap, &cells, dirichlet);
    Ok((system, cells))
}

/// Global interpolant: the dofs of `u` computed cell by cell (shared edge
/// dofs are written by both neighbours with identical values).
pub fn interpolate(mesh: &Mesh, dofmap: &DofMap, mut u: impl FnMut(Point2) -> f64) -> Result<Vec<f64>, AssemblyError> {
    let mut out = vec![0.0; dofmap.n_dofs];
    let mut written = vec![false; dofmap.n_dofs];
    for c in 0..mesh.n_cells() {
        let cell = mesh.local_cell(c);
        let vals = crate::vemspace::dof_functionals(&cell, dofmap.k, &mut u)
            .map_err(|error| AssemblyError::Element { cell: c, error })?;
        for (v, g) in vals.into_iter().zip(dofmap.cell_dofs(mesh, c)) {
            if !written[g] {
                out[g] = v;
                written[g] = true;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::mesh::LocalCell;

    pub(crate) struct Constant {
        pub k: f64,
        pub beta: [f64; 2],
        pub gamma: f64,
    }

    impl CoefficientField for Constant {
        fn diffusion(&self, _: Point2) -> supg::Tensor2 {
            [[self.k, 0.0], [0.0, self.k]]
        }
        fn convection(&self, _: Point2) -> [f64; 2] {
            self.beta
        }
        fn reaction(&self, _: Point2) -> f64 {
            self.gamma
        }
        fn source(&self, _: Point2) -> f64 {
            0.0
        }
    }

    fn hexagon() -> LocalCell {
        let pts = (0..6)
            .map(|i| {
                let t = core::f64::consts::PI / 3.0 * i as f64;
                Point2::new(0.5 + 0.2 * libm::cos(t), 0.5 + 0.2 * libm::sin(t))
            })
            .collect();
        LocalCell::from_polygon(pts)
    }

    fn system(k: usize, coeffs: &Constant) -> (ElementOperators, LocalSystem) {
        let cell = hexagon();
        let ops = ElementOperators::new(&cell, k).unwrap();
        let params = supg::cell_params(&ops, &cell.vertices, coeffs, 0.5).unwrap();
        let ls = local_forms(&ops, &params, coeffs, &FormOptions::default());
        (ops, ls)
    }

    #[test]
    fn convection_form_is_skew() {
        let coeffs = Constant {
            k: 1e-3,
            beta: [1.0, 0.3],
            gamma: 1.0,
        };
        for k in 1..=3 {
            let (_, ls) = system(k, &coeffs);
            let norm = ls.b.amax();
            assert!((&ls.b + ls.b.transpose()).amax() <= 1e-13 * norm);
        }
    }

    #[test]
    fn pure_diffusion_kernel_is_constants() {
        let coeffs = Constant {
            k: 1.0,
            beta: [0.0; 2],
            gamma: 0.0,
        };
        for k in 1..=3 {
            let (ops, ls) = system(k, &coeffs);
            let ev = linalg::symmetric_eigenvalues(&ls.matrix);
            assert!((&ls.matrix - ls.matrix.transpose()).amax() < 1e-12);
            let top = ev[ev.len() - 1];
            assert!(ev[0].abs() < 1e-11 * top, "k={k}");
            assert!(ev[1] > 1e-6 * top, "k={k}");
            // the kernel vector is the dof vector of 1
            let ones = ops.d.column(0).into_owned();
            assert!((&ls.matrix * ones).amax() < 1e-11 * top);
        }
    }

    #[test]
    fn stabilization_vanishes_on_polynomials() {
        let coeffs = Constant {
            k: 1.0,
            beta: [1.0, 1.0],
            gamma: 1.0,
        };
        let (ops, ls) = system(3, &coeffs);
        let sd = &ls.stab * &ops.d;
        assert!(sd.amax() < 1e-10 * ls.stab.amax());
    }
}
