//! Scaled monomial bases and quadrature.
//!
//! Cell monomials are `m_a(x) = ((x - x_E) / h_E)^a` for multi-indices
//! `|a| <= k`, ordered graded-lexicographically:
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.
//! Edge monomials are `m_j(s) = ((s - s_e) / h_e)^j` in the arc-length
//! coordinate `s` along the globally oriented edge.

mod quadrature;

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Point2;

pub use quadrature::{
    cell_quadrature, edge_quadrature, gauss_legendre, polygon_quadrature, segment_quadrature,
    triangle_quadrature, QuadratureError, QuadratureRule,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    pub a1: usize,
    pub a2: usize,
}

impl MultiIndex {
    pub fn order(self) -> usize {
        self.a1 + self.a2
    }

    /// Position in the graded-lexicographic ordering.
    pub fn position(self) -> usize {
        let d = self.order();
        d * (d + 1) / 2 + self.a2
    }
}

/// `dim P_k = (k+1)(k+2)/2`, with `dim P_k = 0` for negative `k`.
pub fn dim_p(k: isize) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

pub fn multi_indices(k: usize) -> Vec<MultiIndex> {
    (0..=k)
        .flat_map(|d| (0..=d).map(move |j| MultiIndex { a1: d - j, a2: j }))
        .collect()
}

/// Scaled monomials of total degree at most `degree` on a cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis {
    pub degree: usize,
    pub center: Point2,
    pub scale: f64,
    indices: Vec<MultiIndex>,
}

impl MonomialBasis {
    pub fn new(degree: usize, center: Point2, scale: f64) -> Self {
        Self {
            degree,
            center,
            scale,
            indices: multi_indices(degree),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Powers `t^0..=t^degree` of the scaled coordinates.
    fn powers(&self, p: Point2) -> (Vec<f64>, Vec<f64>) {
        let tx = (p.x - self.center.x) / self.scale;
        let ty = (p.y - self.center.y) / self.scale;
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * tx;
            py[i] = py[i - 1] * ty;
        }
        (px, py)
    }

    pub fn eval(&self, p: Point2) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    pub fn eval_into(&self, p: Point2, out: &mut [f64]) {
        let (px, py) = self.powers(p);
        for (o, a) in out.iter_mut().zip(&self.indices) {
            *o = px[a.a1] * py[a.a2];
        }
    }

    /// Gradients `[d/dx, d/dy]`; each derivative carries a factor `1/h_E`.
    pub fn grad(&self, p: Point2) -> Vec<[f64; 2]> {
        let mut out = vec![[0.0; 2]; self.len()];
        self.grad_into(p, &mut out);
        out
    }

    pub fn grad_into(&self, p: Point2, out: &mut [[f64; 2]]) {
        let (px, py) = self.powers(p);
        let s = 1.0 / self.scale;
        for (o, a) in out.iter_mut().zip(&self.indices) {
            let dx = if a.a1 > 0 { a.a1 as f64 * px[a.a1 - 1] * py[a.a2] * s } else { 0.0 };
            let dy = if a.a2 > 0 { a.a2 as f64 * px[a.a1] * py[a.a2 - 1] * s } else { 0.0 };
            *o = [dx, dy];
        }
    }

    /// Second derivatives `[xx, xy, yy]`.
    pub fn hessian(&self, p: Point2) -> Vec<[f64; 3]> {
        let (px, py) = self.powers(p);
        let s2 = 1.0 / (self.scale * self.scale);
        self.indices
            .iter()
            .map(|a| {
                let (i, j) = (a.a1, a.a2);
                let f = |c: usize, ex: usize, ey: usize| {
                    if c == 0 {
                        0.0
                    } else {
                        c as f64 * px[ex] * py[ey] * s2
                    }
                };
                let xx = if i >= 2 { f(i * (i - 1), i - 2, j) } else { 0.0 };
                let xy = if i >= 1 && j >= 1 { f(i * j, i - 1, j - 1) } else { 0.0 };
                let yy = if j >= 2 { f(j * (j - 1), i, j - 2) } else { 0.0 };
                [xx, xy, yy]
            })
            .collect()
    }

    pub fn lap(&self, p: Point2) -> Vec<f64> {
        self.hessian(p).into_iter().map(|h| h[0] + h[2]).collect()
    }

    /// Exact expansion of `lap m_a` in the monomials of degree `<= degree - 2`:
    /// returns `(position, coefficient)` pairs.
    pub fn lap_expansion(&self, a: MultiIndex) -> Vec<(usize, f64)> {
        let s2 = 1.0 / (self.scale * self.scale);
        let mut out = Vec::new();
        if a.a1 >= 2 {
            let b = MultiIndex { a1: a.a1 - 2, a2: a.a2 };
            out.push((b.position(), (a.a1 * (a.a1 - 1)) as f64 * s2));
        }
        if a.a2 >= 2 {
            let b = MultiIndex { a1: a.a1, a2: a.a2 - 2 };
            out.push((b.position(), (a.a2 * (a.a2 - 1)) as f64 * s2));
        }
        out
    }

    /// Expansion of `d m_a / d x_axis` in the monomials of degree `<= degree - 1`.
    pub fn derivative_expansion(&self, a: MultiIndex, axis: usize) -> Option<(usize, f64)> {
        let s = 1.0 / self.scale;
        match axis {
            0 if a.a1 > 0 => Some((MultiIndex { a1: a.a1 - 1, a2: a.a2 }.position(), a.a1 as f64 * s)),
            1 if a.a2 > 0 => Some((MultiIndex { a1: a.a1, a2: a.a2 - 1 }.position(), a.a2 as f64 * s)),
            _ => None,
        }
    }
}

/// Evaluates the polynomial with monomial coefficients `coeffs` (which may be
/// shorter than the basis, i.e. of lower degree).
pub fn eval_poly(values: &[f64], coeffs: &[f64]) -> f64 {
    values.iter().zip(coeffs).map(|(v, c)| v * c).sum()
}

/// Scaled monomials `((s - s_e)/h_e)^j`, `j <= degree`, on a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeBasis {
    pub degree: usize,
    pub midpoint: Point2,
    /// Unit tangent fixing the orientation of the edge coordinate.
    pub tangent: Point2,
    pub length: f64,
}

impl EdgeBasis {
    pub fn new(degree: usize, midpoint: Point2, tangent: Point2, length: f64) -> Self {
        Self {
            degree,
            midpoint,
            tangent,
            length,
        }
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scaled coordinate in `[-1/2, 1/2]` of a point on the edge.
    pub fn coordinate(&self, p: Point2) -> f64 {
        (p - self.midpoint).dot(self.tangent) / self.length
    }

    pub fn eval(&self, p: Point2) -> Vec<f64> {
        let t = self.coordinate(p);
        let mut out = vec![1.0; self.len()];
        for j in 1..out.len() {
            out[j] = out[j - 1] * t;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        for k in 0..=5usize {
            assert_eq!(multi_indices(k).len(), (k + 1) * (k + 2) / 2);
            assert_eq!(dim_p(k as isize), (k + 1) * (k + 2) / 2);
        }
        assert_eq!(dim_p(-1), 0);
        for (i, a) in multi_indices(4).into_iter().enumerate() {
            assert_eq!(a.position(), i);
        }
    }

    #[test]
    fn constant_and_linear_monomials() {
        let c = Point2::new(0.3, -0.2);
        let b = MonomialBasis::new(2, c, 0.5);
        let p = Point2::new(1.7, 2.9);
        assert_eq!(b.eval(p)[0], 1.0);
        assert_eq!(b.grad(p)[0], [0.0, 0.0]);
        let shifted = Point2::new(c.x + 0.5, c.y);
        assert!((b.eval(shifted)[1] - 1.0).abs() < 1e-15);
        // lap m_(2,0) = 2 / h^2
        assert!((b.lap(p)[3] - 2.0 / 0.25).abs() < 1e-12);
        assert_eq!(b.lap_expansion(MultiIndex { a1: 2, a2: 0 }), vec![(0, 8.0)]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let b = MonomialBasis::new(4, Point2::new(0.1, 0.2), 0.7);
        let p = Point2::new(0.45, -0.3);
        let g = b.grad(p);
        let eps = 1e-6;
        let fx = |dx: f64, dy: f64| b.eval(Point2::new(p.x + dx, p.y + dy));
        let (xp, xm, yp, ym) = (fx(eps, 0.0), fx(-eps, 0.0), fx(0.0, eps), fx(0.0, -eps));
        for i in 0..b.len() {
            let cx = (xp[i] - xm[i]) / (2.0 * eps);
            let cy = (yp[i] - ym[i]) / (2.0 * eps);
            assert!((g[i][0] - cx).abs() <= 1e-7 * (1.0 + cx.abs()));
            assert!((g[i][1] - cy).abs() <= 1e-7 * (1.0 + cy.abs()));
        }
    }

    #[test]
    fn edge_coordinate_is_centred() {
        let e = EdgeBasis::new(2, Point2::new(1.0, 1.0), Point2::new(0.0, 1.0), 2.0);
        assert_eq!(e.coordinate(Point2::new(1.0, 2.0)), 0.5);
        assert_eq!(e.eval(Point2::new(1.0, 0.0)), vec![1.0, -0.5, 0.25]);
    }
}
