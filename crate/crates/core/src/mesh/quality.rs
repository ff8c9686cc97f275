use alloc::vec::Vec;

use super::Mesh;
use crate::geometry::Point2;

/// Regularity diagnostics of a mesh against a shape constant `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub rho: f64,
    /// `min_E min_{e in E} h_e / h_E`.
    pub min_edge_ratio: f64,
    /// Per cell: the kernel contains a disk of radius `rho * h_E`.
    pub star_shaped_ok: Vec<bool>,
    /// Per cell: radius of the largest disk inside the kernel, over `h_E`.
    pub kernel_radius_ratio: Vec<f64>,
    pub max_vertices_per_cell: usize,
}

impl QualityReport {
    pub fn all_star_shaped(&self) -> bool {
        self.star_shaped_ok.iter().all(|&ok| ok)
    }

    /// Both regularity assumptions hold with the report's `rho`.
    pub fn is_regular(&self) -> bool {
        self.all_star_shaped() && self.min_edge_ratio >= self.rho
    }
}

pub fn validate(mesh: &Mesh, rho: f64) -> QualityReport {
    let mut min_edge_ratio = f64::INFINITY;
    let mut star_shaped_ok = Vec::with_capacity(mesh.n_cells());
    let mut kernel_radius_ratio = Vec::with_capacity(mesh.n_cells());
    let mut max_vertices_per_cell = 0;
    for (c, cell) in mesh.cells.iter().enumerate() {
        max_vertices_per_cell = max_vertices_per_cell.max(cell.n_edges());
        for &e in &cell.edges {
            min_edge_ratio = min_edge_ratio.min(mesh.edges[e].length / cell.diameter);
        }
        let ratio = kernel_inradius(&mesh.cell_coords(c)) / cell.diameter;
        kernel_radius_ratio.push(ratio);
        star_shaped_ok.push(ratio >= rho);
    }
    QualityReport {
        rho,
        min_edge_ratio,
        star_shaped_ok,
        kernel_radius_ratio,
        max_vertices_per_cell,
    }
}

/// Radius of the largest disk contained in the kernel of a counterclockwise
/// polygon (the intersection of the inner half-planes of its sides).
///
/// This is the linear program `max r` subject to `n_i . c + r <= n_i . p_i`;
/// with three unknowns the optimum sits on a vertex cut out by three sides,
/// so the vertices are enumerated directly. Returns 0 when the kernel is empty.
pub fn kernel_inradius(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut planes: Vec<(Point2, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let normal = Point2::new(d.y / len, -d.x / len);
        planes.push((normal, normal.dot(a)));
    }
    let scale = crate::geometry::diameter(vertices).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let mut best: f64 = 0.0;
    let m = planes.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let Some((c, r)) = solve3(planes[i], planes[j], planes[k]) else {
                    continue;
                };
                if r <= best {
                    continue;
                }
                if planes.iter().all(|&(nq, aq)| nq.dot(c) + r <= aq + tol) {
                    best = r;
                }
            }
        }
    }
    best
}

/// Solves `n_q . c + r = a_q` for three planes via Cramer's rule.
fn solve3(p: (Point2, f64), q: (Point2, f64), s: (Point2, f64)) -> Option<(Point2, f64)> {
    let rows = [[p.0.x, p.0.y, 1.0], [q.0.x, q.0.y, 1.0], [s.0.x, s.0.y, 1.0]];
    let rhs = [p.1, q.1, s.1];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(rows);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut sol = [0.0; 3];
    for (col, out) in sol.iter_mut().enumerate() {
        let mut m = rows;
        for r in 0..3 {
            m[r][col] = rhs[r];
        }
        *out = det3(m) / det;
    }
    Some((Point2::new(sol[0], sol[1]), sol[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, MeshFamily};
    use alloc::vec;

    #[test]
    fn unit_square_report() {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let m = Mesh::new(v, vec![vec![0, 1, 2, 3]]).unwrap();
        let r = validate(&m, 0.1);
        assert!((r.min_edge_ratio - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((r.kernel_radius_ratio[0] - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        assert!(r.star_shaped_ok[0]);
        assert_eq!(r.max_vertices_per_cell, 4);
    }

    #[test]
    fn zero_length_edge_is_flagged() {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let m = Mesh::new(v, vec![vec![0, 1, 2, 3, 4]]).unwrap();
        let r = validate(&m, 0.1);
        assert_eq!(r.min_edge_ratio, 0.0);
        assert!(!r.is_regular());
    }

    #[test]
    fn hexagons_are_star_shaped() {
        let m = generate(MeshFamily::M1, 5).unwrap();
        assert!(validate(&m, 0.1).all_star_shaped());
    }

    #[test]
    fn kernel_of_a_dented_polygon_is_smaller_than_its_hull() {
        // an L-shape: kernel is the unit-square corner region
        let l = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        assert!((kernel_inradius(&l) - 0.5).abs() < 1e-12);
    }
}
