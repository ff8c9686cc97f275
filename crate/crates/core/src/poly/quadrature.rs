use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::{self, Point2};
use crate::mesh::LocalCell;

/// Points and positive weights; the weights sum to the measure of the domain.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(Point2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point2, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureError {
    /// The polygon could not be triangulated (it is not simple).
    NotSimple,
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSimple => f.write_str("polygon is not simple; cannot triangulate"),
        }
    }
}

impl core::error::Error for QuadratureError {}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration
/// on the three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule on the segment `[a, b]`, exact for polynomials of the
/// given degree.
pub fn segment_quadrature(a: Point2, b: Point2, exactness: usize) -> QuadratureRule {
    let (xs, ws) = gauss_legendre(exactness / 2 + 1);
    let half = 0.5 * a.distance(b);
    QuadratureRule {
        points: xs.iter().map(|&t| a.lerp(b, 0.5 * (t + 1.0))).collect(),
        weights: ws.iter().map(|&w| w * half).collect(),
    }
}

/// Alias of [`segment_quadrature`] for a cell edge.
pub fn edge_quadrature(a: Point2, b: Point2, exactness: usize) -> QuadratureRule {
    segment_quadrature(a, b, exactness)
}

/// Collapsed tensor Gauss rule on a triangle, exact to the given degree.
pub fn triangle_quadrature(tri: [Point2; 3], exactness: usize) -> QuadratureRule {
    let mut rule = QuadratureRule::default();
    push_triangle(&mut rule, tri, exactness);
    rule
}

fn push_triangle(rule: &mut QuadratureRule, tri: [Point2; 3], exactness: usize) {
    // x(s, t) = (1 - s) p0 + s ((1 - t) p1 + t p2), Jacobian 2|T| s
    let n = exactness / 2 + 1;
    let (xs, ws) = gauss_legendre(n);
    let area2 = (tri[1] - tri[0]).cross(tri[2] - tri[0]).abs();
    for (&u, &wu) in xs.iter().zip(&ws) {
        let s = 0.5 * (u + 1.0);
        for (&v, &wv) in xs.iter().zip(&ws) {
            let t = 0.5 * (v + 1.0);
            let edge = tri[1].lerp(tri[2], t);
            rule.points.push(tri[0].lerp(edge, s));
            rule.weights.push(0.25 * wu * wv * area2 * s);
        }
    }
}

/// Rule on a simple counterclockwise polygon: triangles fanned from the
/// centroid, or an ear-clipping triangulation when the fan would contain a
/// degenerate or inverted triangle.
pub fn polygon_quadrature(
    vertices: &[Point2],
    centroid: Point2,
    exactness: usize,
) -> Result<QuadratureRule, QuadratureError> {
    if !geometry::is_simple_polygon(vertices) || geometry::signed_area(vertices) <= 0.0 {
        return Err(QuadratureError::NotSimple);
    }
    let n = vertices.len();
    let area = geometry::signed_area(vertices);
    let fan_ok = (0..n).all(|i| {
        let a = vertices[i] - centroid;
        let b = vertices[(i + 1) % n] - centroid;
        a.cross(b) > 1e-12 * area
    });
    let triangles = if fan_ok {
        (0..n).map(|i| [centroid, vertices[i], vertices[(i + 1) % n]]).collect()
    } else {
        ear_clip(vertices).ok_or(QuadratureError::NotSimple)?
    };
    let mut rule = QuadratureRule::default();
    for tri in triangles {
        push_triangle(&mut rule, tri, exactness);
    }
    Ok(rule)
}

pub fn cell_quadrature(cell: &LocalCell, exactness: usize) -> Result<QuadratureRule, QuadratureError> {
    polygon_quadrature(&cell.vertices, cell.centroid, exactness)
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
fn ear_clip(vertices: &[Point2]) -> Option<Vec<[Point2; 3]>> {
    if geometry::signed_area(vertices) <= 0.0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::with_capacity(vertices.len() - 2);
    let scale = geometry::diameter(vertices);
    let eps = 1e-14 * scale * scale;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (vertices[ia], vertices[ib], vertices[ic]);
            if (b - a).cross(c - b) <= eps {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = vertices[j];
                (b - a).cross(p - a) >= -eps && (c - b).cross(p - b) >= -eps && (a - c).cross(p - c) >= -eps
            });
            if blocked {
                continue;
            }
            out.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return None;
        }
    }
    out.push([vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]]);
    Some(out)
}
