use core::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Signed area by the shoelace formula; positive for counterclockwise order.
pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * acc
}

/// Area centroid of a simple polygon. Falls back to the vertex average for
/// degenerate (zero-area) input.
pub fn centroid(vertices: &[Point2]) -> Point2 {
    let n = vertices.len();
    let area = signed_area(vertices);
    if area.abs() <= f64::MIN_POSITIVE {
        let sum = vertices.iter().fold(Point2::default(), |a, &p| a + p);
        return sum * (1.0 / n as f64);
    }
    // shift to the first vertex to limit cancellation
    let o = vertices[0];
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = vertices[i] - o;
        let q = vertices[(i + 1) % n] - o;
        let w = p.cross(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let s = 1.0 / (6.0 * area);
    Point2::new(o.x + cx * s, o.y + cy * s)
}

/// Maximum pairwise vertex distance (the diameter of the polygon).
pub fn diameter(vertices: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &p) in vertices.iter().enumerate() {
        for &q in &vertices[i + 1..] {
            d = d.max(p.distance(q));
        }
    }
    d
}

/// True when the closed segments `[a, b]` and `[c, d]` intersect.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let scale = (b - a).norm().max((d - c).norm()).max(f64::MIN_POSITIVE);
    let eps = 1e-14 * scale * scale;
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    let sgn = |v: f64| {
        if v > eps {
            1
        } else if v < -eps {
            -1
        } else {
            0
        }
    };
    let (s1, s2, s3, s4) = (sgn(o1), sgn(o2), sgn(o3), sgn(o4));
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    let on_segment = |p: Point2, q: Point2, r: Point2| {
        r.x >= p.x.min(q.x) - 1e-14 * scale
            && r.x <= p.x.max(q.x) + 1e-14 * scale
            && r.y >= p.y.min(q.y) - 1e-14 * scale
            && r.y <= p.y.max(q.y) + 1e-14 * scale
    };
    (s1 == 0 && on_segment(a, b, c))
        || (s2 == 0 && on_segment(a, b, d))
        || (s3 == 0 && on_segment(c, d, a))
        || (s4 == 0 && on_segment(c, d, b))
}

/// Checks that a closed polygon has no self-intersections: non-adjacent sides
/// must not touch and adjacent sides may only share their common vertex.
pub fn is_simple_polygon(vertices: &[Point2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if vertices[i].distance(vertices[(i + 1) % n]) == 0.0 {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Even-odd point-in-polygon test; points on the boundary may land either way.
pub fn point_in_polygon(p: Point2, vertices: &[Point2]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> [Point2; 4] {
        [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn unit_square_geometry() {
        let sq = square();
        assert_eq!(signed_area(&sq), 1.0);
        let c = centroid(&sq);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((diameter(&sq) - 2f64.sqrt()).abs() < 1e-15);
        assert!(is_simple_polygon(&sq));
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bow = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(!is_simple_polygon(&bow));
    }

    #[test]
    fn clockwise_area_is_negative() {
        let mut sq = square();
        sq.reverse();
        assert_eq!(signed_area(&sq), -1.0);
    }
}
