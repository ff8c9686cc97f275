//! Polygonal meshes of the unit square.
//!
//! A [`Mesh`] is built once from a vertex list and counterclockwise cell
//! connectivity and is immutable afterwards. Construction derives the edge
//! table, the cell/edge adjacency and the per-cell geometry (area, centroid,
//! diameter).

mod generate;
mod quality;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::{self, Point2};

pub use generate::generate;
pub use quality::{validate, QualityReport};

/// The four benchmark mesh families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeshFamily {
    /// Regular hexagons, completed by half hexagons along the boundary.
    M1,
    /// Remapped hexagons: barycentric dual of a sinusoidally remapped triangulation.
    M2,
    /// Skewed quadrilaterals.
    M3,
    /// Interlocking non-convex octagons.
    M4,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] = [Self::M1, Self::M2, Self::M3, Self::M4];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::M1 => "m1",
            Self::M2 => "m2",
            Self::M3 => "m3",
            Self::M4 => "m4",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeshFamily {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m1" | "M1" => Ok(Self::M1),
            "m2" | "M2" => Ok(Self::M2),
            "m3" | "M3" => Ok(Self::M3),
            "m4" | "M4" => Ok(Self::M4),
            _ => Err(MeshError::UnknownFamily),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshError {
    UnknownFamily,
    InvalidResolution(usize),
    NonFiniteVertex { vertex: usize },
    TooFewVertices { cell: usize },
    MissingVertex { cell: usize, vertex: usize },
    NotCounterClockwise { cell: usize },
    NotSimple { cell: usize },
    /// An edge is used by more than two cells, or twice in the same direction.
    NonManifoldEdge { v0: usize, v1: usize },
    BoundaryMismatch { v0: usize, v1: usize },
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownFamily => write!(f, "unknown mesh family (expected m1, m2, m3 or m4)"),
            Self::InvalidResolution(n) => write!(f, "resolution must be at least 2, got {n}"),
            Self::NonFiniteVertex { vertex } => write!(f, "vertex {vertex} has a non-finite coordinate"),
            Self::TooFewVertices { cell } => write!(f, "cell {cell} has fewer than 3 vertices"),
            Self::MissingVertex { cell, vertex } => {
                write!(f, "cell {cell} references missing vertex {vertex}")
            }
            Self::NotCounterClockwise { cell } => {
                write!(f, "cell {cell} is not counterclockwise (non-positive area)")
            }
            Self::NotSimple { cell } => write!(f, "cell {cell} is not a simple polygon"),
            Self::NonManifoldEdge { v0, v1 } => {
                write!(f, "edge ({v0}, {v1}) is shared inconsistently by the cells")
            }
            Self::BoundaryMismatch { v0, v1 } => {
                write!(f, "boundary edge list disagrees with the connectivity at ({v0}, {v1})")
            }
        }
    }
}

impl core::error::Error for MeshError {}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Vertex indices in counterclockwise order.
    pub vertices: Vec<usize>,
    /// Edge indices; local edge `i` joins `vertices[i]` and `vertices[i + 1]`.
    pub edges: Vec<usize>,
    pub area: f64,
    pub centroid: Point2,
    pub diameter: f64,
}

impl Cell {
    pub fn n_edges(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, ordered as traversed by `cell_plus`.
    pub vertices: [usize; 2],
    pub length: f64,
    /// Unit normal pointing out of `cell_plus` (zero for a degenerate edge).
    pub normal: Point2,
    pub midpoint: Point2,
    pub cell_plus: usize,
    pub cell_minus: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cell_minus.is_none()
    }

    /// Unit tangent from `vertices[0]` to `vertices[1]`.
    pub fn tangent(&self) -> Point2 {
        Point2::new(-self.normal.y, self.normal.x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub cells: Vec<Cell>,
    pub edges: Vec<Edge>,
    pub family: Option<MeshFamily>,
    pub resolution: Option<usize>,
}

impl Mesh {
    /// Builds a mesh from coordinates and counterclockwise cell connectivity.
    ///
    /// Zero-length edges are accepted here so that [`validate`] can report
    /// them; simplicity of the cells is checked by [`Mesh::check_simple`].
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(MeshError::NonFiniteVertex { vertex: i });
            }
        }
        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut out_cells = Vec::with_capacity(cells.len());
        for (c, verts) in cells.into_iter().enumerate() {
            if verts.len() < 3 {
                return Err(MeshError::TooFewVertices { cell: c });
            }
            if let Some(&v) = verts.iter().find(|&&v| v >= vertices.len()) {
                return Err(MeshError::MissingVertex { cell: c, vertex: v });
            }
            let coords: Vec<Point2> = verts.iter().map(|&v| vertices[v]).collect();
            let area = geometry::signed_area(&coords);
            if !(area > 0.0) {
                return Err(MeshError::NotCounterClockwise { cell: c });
            }
            let n = verts.len();
            let mut cell_edges = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                match edge_index.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        // the second cell must traverse the edge in the opposite direction
                        if edge.cell_minus.is_some() || edge.vertices != [b, a] {
                            return Err(MeshError::NonManifoldEdge { v0: a, v1: b });
                        }
                        edge.cell_minus = Some(c);
                        cell_edges.push(e);
                    }
                    None => {
                        let (pa, pb) = (vertices[a], vertices[b]);
                        let d = pb - pa;
                        let length = d.norm();
                        let normal = if length > 0.0 {
                            Point2::new(d.y / length, -d.x / length)
                        } else {
                            Point2::default()
                        };
                        edge_index.insert(key, edges.len());
                        cell_edges.push(edges.len());
                        edges.push(Edge {
                            vertices: [a, b],
                            length,
                            normal,
                            midpoint: pa.lerp(pb, 0.5),
                            cell_plus: c,
                            cell_minus: None,
                        });
                    }
                }
            }
            out_cells.push(Cell {
                centroid: geometry::centroid(&coords),
                diameter: geometry::diameter(&coords),
                vertices: verts,
                edges: cell_edges,
                area,
            });
        }
        Ok(Self {
            vertices,
            cells: out_cells,
            edges,
            family: None,
            resolution: None,
        })
    }

    pub(crate) fn with_tag(mut self, family: MeshFamily, n: usize) -> Self {
        self.family = Some(family);
        self.resolution = Some(n);
        self
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_coords(&self, c: usize) -> Vec<Point2> {
        self.cells[c].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// Boundary edges as vertex pairs, in edge order.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        self.edges.iter().filter(|e| e.is_boundary()).map(|e| e.vertices).collect()
    }

    /// Rejects cells that are not simple polygons.
    pub fn check_simple(&self) -> Result<(), MeshError> {
        for c in 0..self.cells.len() {
            if !geometry::is_simple_polygon(&self.cell_coords(c)) {
                return Err(MeshError::NotSimple { cell: c });
            }
        }
        Ok(())
    }

    /// Compares a list of boundary edges (unordered vertex pairs) against the
    /// edges that the connectivity leaves with a single adjacent cell.
    pub fn check_boundary(&self, boundary: &[[usize; 2]]) -> Result<(), MeshError> {
        let mut declared: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for &[a, b] in boundary {
            declared.insert((a.min(b), a.max(b)), false);
        }
        for e in &self.edges {
            let [a, b] = e.vertices;
            let key = (a.min(b), a.max(b));
            match (e.is_boundary(), declared.get_mut(&key)) {
                (true, Some(seen)) => *seen = true,
                (true, None) => return Err(MeshError::BoundaryMismatch { v0: a, v1: b }),
                (false, Some(_)) => return Err(MeshError::BoundaryMismatch { v0: a, v1: b }),
                (false, None) => {}
            }
        }
        if let Some((&(a, b), _)) = declared.iter().find(|(_, seen)| !**seen) {
            return Err(MeshError::BoundaryMismatch { v0: a, v1: b });
        }
        Ok(())
    }

    /// Geometry of cell `c` detached from the global tables, as needed by the
    /// element-level computations.
    pub fn local_cell(&self, c: usize) -> LocalCell {
        let cell = &self.cells[c];
        let n = cell.n_edges();
        let edge_reversed = (0..n)
            .map(|i| self.edges[cell.edges[i]].vertices[0] != cell.vertices[i])
            .collect();
        LocalCell {
            vertices: self.cell_coords(c),
            edge_reversed,
            area: cell.area,
            centroid: cell.centroid,
            diameter: cell.diameter,
        }
    }
}

/// Geometry of a single polygon plus the global orientation of its edges.
///
/// Edge moments are defined with respect to the global edge direction, so two
/// cells sharing an edge see the same edge monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCell {
    pub vertices: Vec<Point2>,
    /// `true` when the global direction of local edge `i` runs from
    /// `vertices[i + 1]` to `vertices[i]`.
    pub edge_reversed: Vec<bool>,
    pub area: f64,
    pub centroid: Point2,
    pub diameter: f64,
}

/// Local frame of one edge of a [`LocalCell`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFrame {
    pub start: Point2,
    pub end: Point2,
    pub midpoint: Point2,
    pub length: f64,
    /// Global unit tangent (defines the edge coordinate of the edge monomials).
    pub tangent: Point2,
    /// Unit normal pointing out of this cell.
    pub outward_normal: Point2,
}

impl LocalCell {
    /// A standalone counterclockwise polygon with every edge in its local direction.
    pub fn from_polygon(vertices: Vec<Point2>) -> Self {
        let n = vertices.len();
        Self {
            area: geometry::signed_area(&vertices),
            centroid: geometry::centroid(&vertices),
            diameter: geometry::diameter(&vertices),
            edge_reversed: alloc::vec![false; n],
            vertices,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, i: usize) -> EdgeFrame {
        let n = self.vertices.len();
        let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
        let d = b - a;
        let length = d.norm();
        let t = if length > 0.0 { d * (1.0 / length) } else { Point2::default() };
        let outward_normal = Point2::new(t.y, -t.x);
        EdgeFrame {
            start: a,
            end: b,
            midpoint: a.lerp(b, 0.5),
            length,
            tangent: if self.edge_reversed[i] { -t } else { t },
            outward_normal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_squares() -> Mesh {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 1.0),
            Point2::new(1.0, 1.0),
        ];
        Mesh::new(v, vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]]).unwrap()
    }

    #[test]
    fn adjacency_and_normals() {
        let m = two_squares();
        assert_eq!(m.edges.len(), 7);
        let interior: Vec<_> = m.edges.iter().filter(|e| !e.is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        let e = interior[0];
        assert_eq!(e.cell_plus, 0);
        assert_eq!(e.cell_minus, Some(1));
        // points out of the left cell
        assert!((e.normal.x - 1.0).abs() < 1e-15 && e.normal.y.abs() < 1e-15);
    }

    #[test]
    fn shared_edge_is_reversed_in_second_cell() {
        let m = two_squares();
        let left = m.local_cell(0);
        let right = m.local_cell(1);
        assert!(!left.edge_reversed.iter().any(|&r| r));
        assert_eq!(right.edge_reversed.iter().filter(|&&r| r).count(), 1);
        let shared = m.edges.iter().position(|e| !e.is_boundary()).unwrap();
        let il = m.cells[0].edges.iter().position(|&e| e == shared).unwrap();
        let ir = m.cells[1].edges.iter().position(|&e| e == shared).unwrap();
        assert_eq!(left.edge(il).tangent, right.edge(ir).tangent);
        assert_eq!(left.edge(il).outward_normal, -right.edge(ir).outward_normal);
    }

    #[test]
    fn missing_vertex_names_the_cell() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let err = Mesh::new(v, vec![vec![0, 1, 2], vec![0, 1, 7]]).unwrap_err();
        assert_eq!(err, MeshError::MissingVertex { cell: 1, vertex: 7 });
    }

    #[test]
    fn clockwise_cell_rejected() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let err = Mesh::new(v, vec![vec![0, 2, 1]]).unwrap_err();
        assert_eq!(err, MeshError::NotCounterClockwise { cell: 0 });
    }

    #[test]
    fn boundary_list_check() {
        let m = two_squares();
        let b = m.boundary_edges();
        assert_eq!(b.len(), 6);
        assert!(m.check_boundary(&b).is_ok());
        assert!(m.check_boundary(&b[1..]).is_err());
        let mut extra = b.clone();
        extra.push([1, 4]);
        assert!(m.check_boundary(&extra).is_err());
    }
}
