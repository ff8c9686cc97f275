use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::Point2;
use crate::linalg::{self, Mat};
use crate::mesh::LocalCell;
use crate::poly::{
    cell_quadrature, dim_p, edge_quadrature, EdgeBasis, MonomialBasis, QuadratureError, QuadratureRule,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementError {
    Quadrature(QuadratureError),
    DegenerateEdge { edge: usize },
    /// One of the local Gram systems is singular; names the matrix.
    Singular { which: &'static str },
}

impl fmt::Display for ElementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Quadrature(e) => write!(f, "{e}"),
            Self::DegenerateEdge { edge } => write!(f, "local edge {edge} has zero length"),
            Self::Singular { which } => write!(f, "singular local {which} matrix"),
        }
    }
}

impl core::error::Error for ElementError {}

impl From<QuadratureError> for ElementError {
    fn from(e: QuadratureError) -> Self {
        Self::Quadrature(e)
    }
}

pub fn local_dof_count(n_edges: usize, k: usize) -> usize {
    n_edges * k + dim_p(k as isize - 2)
}

/// Local projection matrices of one cell. Each projector maps local dof
/// values to monomial coefficients of the cell's [`MonomialBasis`].
#[derive(Clone, Debug)]
pub struct ElementOperators {
    pub k: usize,
    pub n_edges: usize,
    pub n_dofs: usize,
    pub basis: MonomialBasis,
    /// Dofs of the monomials: `d[(i, a)] = dof_i(m_a)`, `n_dofs x dim P_k`.
    pub d: Mat,
    /// Elliptic projection onto `P_k`, `dim P_k x n_dofs`.
    pub pi_nabla: Mat,
    /// `L2` projection onto `P_k` (computable thanks to the enhancement).
    pub pi0_k: Mat,
    /// `L2` projection onto `P_{k-1}`, `dim P_{k-1} x n_dofs`.
    pub pi0_km1: Mat,
    /// `L2` projections of the two gradient components onto `P_{k-1}`.
    pub pi0_grad: [Mat; 2],
    /// Monomial mass matrix on `P_k`.
    pub mass: Mat,
    /// Monomial stiffness matrix `int grad m_a . grad m_b` on `P_k`.
    pub stiffness: Mat,
    /// Cell rule exact to degree `2k + 2`.
    pub rule: QuadratureRule,
    pub area: f64,
    pub diameter: f64,
    pub centroid: Point2,
}

struct EdgeData {
    basis: EdgeBasis,
    rule: QuadratureRule,
    length: f64,
    normal: Point2,
    /// Inverse of the edge monomial mass matrix (`k x k`).
    mass_inv: Mat,
}

fn edge_data(cell: &LocalCell, i: usize, k: usize) -> Result<EdgeData, ElementError> {
    let fr = cell.edge(i);
    if !(fr.length > 0.0) {
        return Err(ElementError::DegenerateEdge { edge: i });
    }
    let basis = EdgeBasis::new(k - 1, fr.midpoint, fr.tangent, fr.length);
    let rule = edge_quadrature(fr.start, fr.end, 2 * k + 1);
    let mut m = Mat::zeros(k, k);
    for (p, w) in rule.iter() {
        let v = basis.eval(p);
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    let mass_inv = linalg::solve(&m, &Mat::identity(k, k)).ok_or(ElementError::Singular { which: "edge mass" })?;
    Ok(EdgeData {
        basis,
        rule,
        length: fr.length,
        normal: fr.outward_normal,
        mass_inv,
    })
}

impl EdgeData {
    /// Coefficients in the edge monomials of the `L2(e)` projection of `f`
    /// onto `P_{k-1}(e)`; exact when `f` is a polynomial of degree `< k`.
    fn project(&self, mut f: impl FnMut(Point2) -> f64) -> Vec<f64> {
        let k = self.basis.len();
        let mut rhs = vec![0.0; k];
        for (p, w) in self.rule.iter() {
            let fv = f(p);
            for (r, m) in rhs.iter_mut().zip(self.basis.eval(p)) {
                *r += w * fv * m;
            }
        }
        (0..k)
            .map(|a| (0..k).map(|b| self.mass_inv[(a, b)] * rhs[b]).sum())
            .collect()
    }
}

impl ElementOperators {
    pub fn new(cell: &LocalCell, k: usize) -> Result<Self, ElementError> {
        assert!(k >= 1, "degree must be at least 1");
        let ne = cell.n_edges();
        let nk = dim_p(k as isize);
        let nkm1 = dim_p(k as isize - 1);
        let nkm2 = dim_p(k as isize - 2);
        let n = local_dof_count(ne, k);
        let cell_off = ne * k;
        let area = cell.area;
        let basis = MonomialBasis::new(k, cell.centroid, cell.diameter);
        let idx = basis.indices().to_vec();
        let rule = cell_quadrature(cell, 2 * k + 2)?;

        let mut mass = Mat::zeros(nk, nk);
        let mut stiffness = Mat::zeros(nk, nk);
        for (p, w) in rule.iter() {
            let v = basis.eval(p);
            let g = basis.grad(p);
            for a in 0..nk {
                for b in 0..nk {
                    mass[(a, b)] += w * v[a] * v[b];
                    stiffness[(a, b)] += w * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                }
            }
        }

        let edges = (0..ne).map(|i| edge_data(cell, i, k)).collect::<Result<Vec<_>, _>>()?;

        let mut d = Mat::zeros(n, nk);
        for (i, e) in edges.iter().enumerate() {
            for (p, w) in e.rule.iter() {
                let mv = basis.eval(p);
                let ev = e.basis.eval(p);
                for j in 0..k {
                    for a in 0..nk {
                        d[(i * k + j, a)] += w * mv[a] * ev[j] / e.length;
                    }
                }
            }
        }
        for b in 0..nkm2 {
            for a in 0..nk {
                d[(cell_off + b, a)] = mass[(a, b)] / area;
            }
        }

        // elliptic projection: G c = B
        let mut g = stiffness.clone();
        let mut bmat = Mat::zeros(nk, n);
        for (a, &ma) in idx.iter().enumerate() {
            for (pos, c) in basis.lap_expansion(ma) {
                bmat[(a, cell_off + pos)] -= area * c;
            }
            for (i, e) in edges.iter().enumerate() {
                let coeffs = e.project(|p| {
                    let gr = basis.grad(p)[a];
                    gr[0] * e.normal.x + gr[1] * e.normal.y
                });
                for (j, c) in coeffs.into_iter().enumerate() {
                    bmat[(a, i * k + j)] += e.length * c;
                }
            }
        }
        for col in 0..n {
            bmat[(0, col)] = 0.0;
        }
        if k == 1 {
            for b in 0..nk {
                g[(0, b)] = edges.iter().map(|e| e.rule.integrate(|p| basis.eval(p)[b])).sum();
            }
            for (i, e) in edges.iter().enumerate() {
                bmat[(0, i * k)] = e.length;
            }
        } else {
            for b in 0..nk {
                g[(0, b)] = mass[(0, b)];
            }
            bmat[(0, cell_off)] = area;
        }
        let pi_nabla = linalg::solve(&g, &bmat).ok_or(ElementError::Singular { which: "stiffness" })?;

        // enhanced L2 projection: moments up to k-2 from the dofs, the rest from pi_nabla
        let hp = &mass * &pi_nabla;
        let mut c = Mat::zeros(nk, n);
        for a in 0..nk {
            if a < nkm2 {
                c[(a, cell_off + a)] = area;
            } else {
                c.row_mut(a).copy_from(&hp.row(a));
            }
        }
        let pi0_k = linalg::solve(&mass, &c).ok_or(ElementError::Singular { which: "mass" })?;
        let mass_km1 = mass.view((0, 0), (nkm1, nkm1)).into_owned();
        let c_km1 = c.rows(0, nkm1).into_owned();
        let pi0_km1 = linalg::solve(&mass_km1, &c_km1).ok_or(ElementError::Singular { which: "mass" })?;

        // int dv/dx_s m_a = -int v d m_a/dx_s + sum_e int_e v m_a n_s
        let mut pi0_grad = [Mat::zeros(nkm1, n), Mat::zeros(nkm1, n)];
        for (s, out) in pi0_grad.iter_mut().enumerate() {
            let mut e_mat = Mat::zeros(nkm1, n);
            for (a, &ma) in idx.iter().take(nkm1).enumerate() {
                if let Some((pos, coef)) = basis.derivative_expansion(ma, s) {
                    e_mat[(a, cell_off + pos)] -= area * coef;
                }
                for (i, e) in edges.iter().enumerate() {
                    let ns = if s == 0 { e.normal.x } else { e.normal.y };
                    if ns == 0.0 {
                        continue;
                    }
                    let coeffs = e.project(|p| basis.eval(p)[a] * ns);
                    for (j, cf) in coeffs.into_iter().enumerate() {
                        e_mat[(a, i * k + j)] += e.length * cf;
                    }
                }
            }
            *out = linalg::solve(&mass_km1, &e_mat).ok_or(ElementError::Singular { which: "mass" })?;
        }

        Ok(Self {
            k,
            n_edges: ne,
            n_dofs: n,
            basis,
            d,
            pi_nabla,
            pi0_k,
            pi0_km1,
            pi0_grad,
            mass,
            stiffness,
            rule,
            area,
            diameter: cell.diameter,
            centroid: cell.centroid,
        })
    }

    /// Lower-degree view of the basis values: coefficient vectors from
    /// `pi0_km1` and `pi0_grad` only use the first `dim P_{k-1}` entries.
    pub fn n_km1(&self) -> usize {
        dim_p(self.k as isize - 1)
    }

    /// `I - D Pi_nabla`, the part of the local space invisible to the
    /// consistency terms.
    pub fn non_polynomial_part(&self) -> Mat {
        Mat::identity(self.n_dofs, self.n_dofs) - &self.d * &self.pi_nabla
    }
}

/// Local dof values of a function given pointwise (used for interpolation and
/// boundary data). The quadrature is a few orders above the polynomial
/// degree since `f` is generally not polynomial.
pub fn dof_functionals(cell: &LocalCell, k: usize, mut f: impl FnMut(Point2) -> f64) -> Result<Vec<f64>, ElementError> {
    let ne = cell.n_edges();
    let mut out = Vec::with_capacity(local_dof_count(ne, k));
    for i in 0..ne {
        let fr = cell.edge(i);
        if !(fr.length > 0.0) {
            return Err(ElementError::DegenerateEdge { edge: i });
        }
        let eb = EdgeBasis::new(k - 1, fr.midpoint, fr.tangent, fr.length);
        let rule = edge_quadrature(fr.start, fr.end, 2 * k + 8);
        let mut acc = vec![0.0; k];
        for (p, w) in rule.iter() {
            let fv = f(p);
            for (a, m) in acc.iter_mut().zip(eb.eval(p)) {
                *a += w * fv * m;
            }
        }
        out.extend(acc.into_iter().map(|v| v / fr.length));
    }
    let nkm2 = dim_p(k as isize - 2);
    if nkm2 > 0 {
        let basis = MonomialBasis::new(k - 2, cell.centroid, cell.diameter);
        let rule = cell_quadrature(cell, 2 * k + 6)?;
        let mut acc = vec![0.0; nkm2];
        for (p, w) in rule.iter() {
            let fv = f(p);
            for (a, m) in acc.iter_mut().zip(basis.eval(p)) {
                *a += w * fv * m;
            }
        }
        out.extend(acc.into_iter().map(|v| v / cell.area));
    }
    Ok(out)
}
