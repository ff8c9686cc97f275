//! Point location on a mesh through a uniform grid of cell bounding boxes.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{self, Point2};
use crate::mesh::Mesh;

#[derive(Clone, Debug)]
pub struct PointLocator {
    min: Point2,
    cell_size: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
    polygons: Vec<Vec<Point2>>,
}

impl PointLocator {
    pub fn new(mesh: &Mesh) -> Self {
        let polygons: Vec<Vec<Point2>> = (0..mesh.n_cells()).map(|c| mesh.cell_coords(c)).collect();
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for v in &mesh.vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        let side = libm::ceil(libm::sqrt(mesh.n_cells().max(1) as f64)) as usize;
        let dims = [side.max(1), side.max(1)];
        let cell_size = [
            ((hi.x - lo.x) / dims[0] as f64).max(f64::MIN_POSITIVE),
            ((hi.y - lo.y) / dims[1] as f64).max(f64::MIN_POSITIVE),
        ];
        let mut loc = Self {
            min: lo,
            cell_size,
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1]],
            polygons,
        };
        for c in 0..loc.polygons.len() {
            let (mut bl, mut bh) = (loc.polygons[c][0], loc.polygons[c][0]);
            for p in &loc.polygons[c] {
                bl = Point2::new(bl.x.min(p.x), bl.y.min(p.y));
                bh = Point2::new(bh.x.max(p.x), bh.y.max(p.y));
            }
            let (i0, j0) = loc.bucket(bl);
            let (i1, j1) = loc.bucket(bh);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * dims[0] + i].push(c);
                }
            }
        }
        loc
    }

    fn bucket(&self, p: Point2) -> (usize, usize) {
        let clamp = |t: f64, n: usize| {
            if t <= 0.0 {
                0
            } else {
                (t as usize).min(n - 1)
            }
        };
        (
            clamp((p.x - self.min.x) / self.cell_size[0], self.dims[0]),
            clamp((p.y - self.min.y) / self.cell_size[1], self.dims[1]),
        )
    }

    /// The cell containing `p` by the crossing-number test, or `None`
    /// outside the mesh. Points on the domain boundary may report `None`.
    pub fn locate(&self, p: Point2) -> Option<usize> {
        let (i, j) = self.bucket(p);
        self.buckets[j * self.dims[0] + i]
            .iter()
            .copied()
            .find(|&c| geometry::point_in_polygon(p, &self.polygons[c]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, MeshFamily};

    #[test]
    fn centroids_are_found_in_their_cells() {
        for fam in MeshFamily::ALL {
            let m = generate(fam, 5).unwrap();
            let loc = PointLocator::new(&m);
            for (c, cell) in m.cells.iter().enumerate() {
                if geometry::point_in_polygon(cell.centroid, &m.cell_coords(c)) {
                    assert_eq!(loc.locate(cell.centroid), Some(c));
                }
            }
            assert!(loc.locate(Point2::new(1.5, 0.5)).is_none());
        }
    }
}
