use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::Mesh;
use crate::poly::dim_p;

/// Global numbering of the dofs: interior-edge moments first (edge index
/// major, moment order minor), then boundary-edge moments, then cell moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    pub k: usize,
    /// First dof of each edge; edge `e` owns `edge_base[e] .. edge_base[e] + k`.
    pub edge_base: Vec<usize>,
    /// First dof of each cell; cell `c` owns `dim P_{k-2}` dofs.
    pub cell_base: Vec<usize>,
    pub n_dofs: usize,
    pub boundary: Vec<bool>,
    pub n_interior_edge_dofs: usize,
    pub n_edge_dofs: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, k: usize) -> Self {
        assert!(k >= 1, "degree must be at least 1");
        let mut edge_base = vec![0; mesh.edges.len()];
        let mut next = 0;
        for (e, edge) in mesh.edges.iter().enumerate() {
            if !edge.is_boundary() {
                edge_base[e] = next;
                next += k;
            }
        }
        let n_interior_edge_dofs = next;
        for (e, edge) in mesh.edges.iter().enumerate() {
            if edge.is_boundary() {
                edge_base[e] = next;
                next += k;
            }
        }
        let n_edge_dofs = next;
        let per_cell = dim_p(k as isize - 2);
        let cell_base = (0..mesh.n_cells()).map(|c| next + c * per_cell).collect();
        let n_dofs = next + mesh.n_cells() * per_cell;
        let mut boundary = vec![false; n_dofs];
        for b in &mut boundary[n_interior_edge_dofs..n_edge_dofs] {
            *b = true;
        }
        Self {
            k,
            edge_base,
            cell_base,
            n_dofs,
            boundary,
            n_interior_edge_dofs,
            n_edge_dofs,
        }
    }

    pub fn dofs_per_cell(&self) -> usize {
        dim_p(self.k as isize - 2)
    }

    /// Global ids of the local dofs of cell `c`, in local order.
    pub fn cell_dofs(&self, mesh: &Mesh, c: usize) -> Vec<usize> {
        let cell = &mesh.cells[c];
        let mut out = Vec::with_capacity(cell.n_edges() * self.k + self.dofs_per_cell());
        for &e in &cell.edges {
            out.extend(self.edge_base[e]..self.edge_base[e] + self.k);
        }
        let base = self.cell_base[c];
        out.extend(base..base + self.dofs_per_cell());
        out
    }

    pub fn n_boundary(&self) -> usize {
        self.n_edge_dofs - self.n_interior_edge_dofs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::mesh::{generate, MeshFamily};

    fn unit_square() -> Mesh {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        Mesh::new(v, vec![vec![0, 1, 2, 3]]).unwrap()
    }

    #[test]
    fn single_square_k1_is_all_boundary() {
        let d = DofMap::new(&unit_square(), 1);
        assert_eq!(d.n_dofs, 4);
        assert!(d.boundary.iter().all(|&b| b));
    }

    #[test]
    fn two_squares_k3() {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 1.0),
            Point2::new(1.0, 1.0),
        ];
        let m = Mesh::new(v, vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]]).unwrap();
        let d = DofMap::new(&m, 3);
        // 7 edges x 3 + 2 cells x 3
        assert_eq!(d.n_dofs, 27);
        assert_eq!(d.n_interior_edge_dofs, 3);
        assert_eq!(d.n_boundary(), 18);
        // the shared edge carries the first three dofs in both cells
        let left = d.cell_dofs(&m, 0);
        let right = d.cell_dofs(&m, 1);
        assert_eq!(left[3..6], [0, 1, 2]);
        assert_eq!(right[9..12], [0, 1, 2]);
        assert_eq!(left[12..], [21, 22, 23]);
        assert_eq!(right[12..], [24, 25, 26]);
    }

    #[test]
    fn hexagon_k2_local_count() {
        let m = generate(MeshFamily::M1, 4).unwrap();
        let d = DofMap::new(&m, 2);
        let hex = m.cells.iter().position(|c| c.n_edges() == 6).unwrap();
        assert_eq!(d.cell_dofs(&m, hex).len(), 13);
    }
}
