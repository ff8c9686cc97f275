//! Generators for the four benchmark mesh families on `(0,1)^2`.
//!
//! `n` is the number of partitions per direction; the benchmark sequences use
//! `n = 5, 10, 20, 40`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{atan2, sin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Mesh, MeshError, MeshFamily};
use crate::geometry::Point2;

/// Amplitude of the sinusoidal remap used by M2.
const REMAP_AMPLITUDE: f64 = 0.1;
/// Amplitude of the smooth shear used by M3.
const SKEW_AMPLITUDE: f64 = 0.08;
/// Interior node jitter of M3, relative to the grid spacing.
const SKEW_JITTER: f64 = 0.15;
const SKEW_SEED: u64 = 0x5eed_0003;
/// Inward dent of the M4 octagons, relative to the cell width.
const DENT: f64 = 0.2;

pub fn generate(family: MeshFamily, n: usize) -> Result<Mesh, MeshError> {
    if n < 2 {
        return Err(MeshError::InvalidResolution(n));
    }
    let mesh = match family {
        MeshFamily::M1 => hexagonal(n),
        MeshFamily::M2 => remapped_hexagonal(n),
        MeshFamily::M3 => skewed_quadrilateral(n),
        MeshFamily::M4 => octagonal(n),
    }?;
    Ok(mesh.with_tag(family, n))
}

/// Point registry keyed by integer lattice coordinates.
struct Lattice {
    index: BTreeMap<(i64, i64), usize>,
    points: Vec<Point2>,
    sx: f64,
    sy: f64,
}

impl Lattice {
    fn new(nx: i64, ny: i64) -> Self {
        Self {
            index: BTreeMap::new(),
            points: Vec::new(),
            sx: nx as f64,
            sy: ny as f64,
        }
    }

    fn id(&mut self, p: (i64, i64)) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.points.len();
        self.points.push(Point2::new(p.0 as f64 / self.sx, p.1 as f64 / self.sy));
        self.index.insert(p, i);
        i
    }
}

/// Sutherland-Hodgman clipping of an integer polygon against `lo <= coord <= hi`
/// along one axis. Crossing points must fall on the lattice.
fn clip_axis(poly: &[(i64, i64)], axis: usize, bound: i64, keep_above: bool) -> Vec<(i64, i64)> {
    let coord = |p: (i64, i64)| if axis == 0 { p.0 } else { p.1 };
    let inside = |p: (i64, i64)| if keep_above { coord(p) >= bound } else { coord(p) <= bound };
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let prev = poly[(i + n - 1) % n];
        let crossing = |a: (i64, i64), b: (i64, i64)| {
            let (ca, cb) = (coord(a), coord(b));
            let (oa, ob) = if axis == 0 { (a.1, b.1) } else { (a.0, b.0) };
            let num = (ob - oa) * (bound - ca);
            let den = cb - ca;
            debug_assert_eq!(num % den, 0, "clip point off the lattice");
            let o = oa + num / den;
            if axis == 0 {
                (bound, o)
            } else {
                (o, bound)
            }
        };
        match (inside(prev), inside(cur)) {
            (true, true) => out.push(cur),
            (true, false) => out.push(crossing(prev, cur)),
            (false, true) => {
                out.push(crossing(prev, cur));
                out.push(cur);
            }
            (false, false) => {}
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// M1: staggered rows of hexagons, clipped to the square so that the boundary
/// is completed by half (and, at two corners, quarter) hexagons.
///
/// Lattice units are `1/(2n)` horizontally and `1/(3n)` vertically; a hexagon
/// centred at `(cx, cy)` has vertices `(cx, cy +- 2)` and `(cx +- 1, cy +- 1)`.
fn hexagonal(n: usize) -> Result<Mesh, MeshError> {
    let ni = n as i64;
    let (xmax, ymax) = (2 * ni, 3 * ni);
    let mut lattice = Lattice::new(xmax, ymax);
    let mut cells = Vec::new();
    for j in 0..=ni {
        let cy = 3 * j;
        let centres: Vec<i64> = if j % 2 == 0 {
            (0..=ni).map(|i| 2 * i).collect()
        } else {
            (0..ni).map(|i| 2 * i + 1).collect()
        };
        for cx in centres {
            let hex = [
                (cx, cy - 2),
                (cx + 1, cy - 1),
                (cx + 1, cy + 1),
                (cx, cy + 2),
                (cx - 1, cy + 1),
                (cx - 1, cy - 1),
            ];
            let mut poly = clip_axis(&hex, 0, 0, true);
            poly = clip_axis(&poly, 0, xmax, false);
            poly = clip_axis(&poly, 1, 0, true);
            poly = clip_axis(&poly, 1, ymax, false);
            if poly.len() >= 3 {
                cells.push(poly.into_iter().map(|p| lattice.id(p)).collect());
            }
        }
    }
    Mesh::new(lattice.points, cells)
}

fn remap(p: Point2) -> Point2 {
    let s = REMAP_AMPLITUDE * sin(2.0 * PI * p.x) * sin(2.0 * PI * p.y);
    Point2::new(p.x + s, p.y + s)
}

/// M2: the primal grid is remapped by `x + 0.1 sin(2 pi x) sin(2 pi y)` (same
/// shift for `y`), each quadrilateral is split into two triangles, and the dual
/// cells join the barycenters of the triangles around each primal vertex. At
/// the boundary the dual cell also passes through the midpoints of the
/// boundary edges and the boundary vertex itself.
fn remapped_hexagonal(n: usize) -> Result<Mesh, MeshError> {
    let h = 1.0 / n as f64;
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let primal: Vec<Point2> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| {
            // snap boundary nodes exactly onto the square
            let p = remap(Point2::new(i as f64 * h, j as f64 * h));
            let x = if i == 0 { 0.0 } else if i == n { 1.0 } else { p.x };
            let y = if j == 0 { 0.0 } else if j == n { 1.0 } else { p.y };
            Point2::new(x, y)
        })
        .collect();

    // triangles split along the (i, j) -> (i + 1, j + 1) diagonal
    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([node(i, j), node(i + 1, j), node(i + 1, j + 1)]);
            triangles.push([node(i, j), node(i + 1, j + 1), node(i, j + 1)]);
        }
    }

    let mut points: Vec<Point2> = Vec::new();
    let bary_id: Vec<usize> = triangles
        .iter()
        .map(|t| {
            let b = (primal[t[0]] + primal[t[1]] + primal[t[2]]) * (1.0 / 3.0);
            points.push(b);
            points.len() - 1
        })
        .collect();

    let mut around: Vec<Vec<usize>> = vec![Vec::new(); primal.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            around[v].push(t);
        }
    }

    let on_boundary = |i: usize, j: usize| i == 0 || j == 0 || i == n || j == n;
    let mut boundary_point: BTreeMap<usize, usize> = BTreeMap::new();
    let mut midpoint_id: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut cells = Vec::with_capacity(primal.len());

    for j in 0..=n {
        for i in 0..=n {
            let v = node(i, j);
            let centre = primal[v];
            let mut ring: Vec<(f64, usize)> = Vec::new();
            let reference = if on_boundary(i, j) {
                let rx = if i == 0 { 1.0 } else if i == n { -1.0 } else { 0.0 };
                let ry = if j == 0 { 1.0 } else if j == n { -1.0 } else { 0.0 };
                Point2::new(rx, ry)
            } else {
                Point2::new(1.0, 0.0)
            };
            let angle = |p: Point2| {
                let d = p - centre;
                atan2(reference.cross(d), reference.dot(d))
            };
            for &t in &around[v] {
                ring.push((angle(points[bary_id[t]]), bary_id[t]));
            }
            if on_boundary(i, j) {
                // neighbouring boundary vertices along the sides of the square
                let mut nbrs: Vec<(usize, usize)> = Vec::new();
                if j == 0 || j == n {
                    if i > 0 {
                        nbrs.push((i - 1, j));
                    }
                    if i < n {
                        nbrs.push((i + 1, j));
                    }
                }
                if i == 0 || i == n {
                    if j > 0 {
                        nbrs.push((i, j - 1));
                    }
                    if j < n {
                        nbrs.push((i, j + 1));
                    }
                }
                for (a, b) in nbrs {
                    let w = node(a, b);
                    let key = (v.min(w), v.max(w));
                    let id = *midpoint_id.entry(key).or_insert_with(|| {
                        points.push(primal[v].lerp(primal[w], 0.5));
                        points.len() - 1
                    });
                    ring.push((angle(points[id]), id));
                }
            }
            ring.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cell: Vec<usize> = Vec::with_capacity(ring.len() + 1);
            if on_boundary(i, j) {
                let id = *boundary_point.entry(v).or_insert_with(|| {
                    points.push(centre);
                    points.len() - 1
                });
                cell.push(id);
            }
            cell.extend(ring.into_iter().map(|(_, id)| id));
            cells.push(cell);
        }
    }
    Mesh::new(points, cells)
}

/// M3: a uniform quadrilateral grid whose interior nodes are moved by a smooth
/// shear plus a seeded random jitter, producing skewed, non-parallel cells.
fn skewed_quadrilateral(n: usize) -> Result<Mesh, MeshError> {
    let h = 1.0 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SKEW_SEED);
    let mut points = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if i == 0 || j == 0 || i == n || j == n {
                points.push(Point2::new(x, y));
                continue;
            }
            let sx = SKEW_AMPLITUDE * sin(PI * x) * sin(2.0 * PI * y);
            let sy = SKEW_AMPLITUDE * sin(2.0 * PI * x) * sin(PI * y);
            let jx: f64 = rng.gen_range(-1.0..1.0);
            let jy: f64 = rng.gen_range(-1.0..1.0);
            points.push(Point2::new(
                x + sx + SKEW_JITTER * h * jx,
                y + sy + SKEW_JITTER * h * jy,
            ));
        }
    }
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let cells = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| vec![node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)])
        .collect();
    Mesh::new(points, cells)
}

/// M4: square cells with a vertex at the middle of every side. In a
/// checkerboard pattern, "even" cells have their vertical sides dented inward
/// and their horizontal sides bulged outward; "odd" cells the reverse, so the
/// octagons interlock. Sides on the domain boundary stay straight.
fn octagonal(n: usize) -> Result<Mesh, MeshError> {
    let h = 1.0 / n as f64;
    let delta = DENT * h;
    let even = |i: usize, j: usize| (i + j).is_multiple_of(2);
    let mut points = Vec::new();
    let corner = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..=n {
        for i in 0..=n {
            points.push(Point2::new(i as f64 * h, j as f64 * h));
        }
    }
    // midpoint of the horizontal side from (i, j) to (i + 1, j)
    let hbase = points.len();
    for j in 0..=n {
        for i in 0..n {
            let shift = if j == 0 || j == n {
                0.0
            } else if even(i, j - 1) {
                delta
            } else {
                -delta
            };
            points.push(Point2::new((i as f64 + 0.5) * h, j as f64 * h + shift));
        }
    }
    let hmid = |i: usize, j: usize| hbase + j * n + i;
    // midpoint of the vertical side from (i, j) to (i, j + 1)
    let vbase = points.len();
    for j in 0..n {
        for i in 0..=n {
            let shift = if i == 0 || i == n {
                0.0
            } else if even(i - 1, j) {
                -delta
            } else {
                delta
            };
            points.push(Point2::new(i as f64 * h + shift, (j as f64 + 0.5) * h));
        }
    }
    let vmid = |i: usize, j: usize| vbase + j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![
                corner(i, j),
                hmid(i, j),
                corner(i + 1, j),
                vmid(i + 1, j),
                corner(i + 1, j + 1),
                hmid(i, j + 1),
                corner(i, j + 1),
                vmid(i, j),
            ]);
        }
    }
    Mesh::new(points, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_resolution() {
        for f in MeshFamily::ALL {
            assert_eq!(generate(f, 1).unwrap_err(), MeshError::InvalidResolution(1));
        }
    }

    #[test]
    fn remap_fixes_the_centre() {
        let p = remap(Point2::new(0.5, 0.5));
        assert!((p.x - 0.5).abs() < 1e-16 && (p.y - 0.5).abs() < 1e-16);
    }

    #[test]
    fn hexagonal_interior_cells_are_hexagons() {
        for n in [2, 5, 10] {
            let m = generate(MeshFamily::M1, n).unwrap();
            for (c, cell) in m.cells.iter().enumerate() {
                let touches = m.cells[c]
                    .edges
                    .iter()
                    .any(|&e| m.edges[e].is_boundary());
                if !touches {
                    assert_eq!(cell.n_edges(), 6, "cell {c}");
                }
            }
        }
    }

    #[test]
    fn octagons_have_eight_vertices() {
        let m = generate(MeshFamily::M4, 5).unwrap();
        assert_eq!(m.n_cells(), 25);
        assert!(m.cells.iter().all(|c| c.n_edges() == 8));
    }

    #[test]
    fn hexagonal_counts() {
        // 3 rows of 6 cells, 3 rows of 5 cells
        let m = generate(MeshFamily::M1, 5).unwrap();
        assert_eq!(m.n_cells(), 33);
        assert!((m.h_max() - 4.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn dual_mesh_has_one_cell_per_primal_vertex() {
        let m = generate(MeshFamily::M2, 5).unwrap();
        assert_eq!(m.n_cells(), 36);
    }
}
