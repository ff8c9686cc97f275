use alloc::string::String;
use core::f64::consts::PI;

use libm::{cos, exp, sin};

use crate::geometry::Point2;
use crate::supg::{CoefficientField, ExactSolution, Tensor2};

/// A boundary value problem on the unit square.
pub trait Problem: CoefficientField {
    fn name(&self) -> String;
    fn dirichlet(&self, p: Point2) -> f64;
    fn exact(&self) -> Option<&dyn ExactSolution> {
        None
    }
}

/// Variable-coefficient accuracy test:
/// `K = alpha [[1 + x^2, xy], [xy, 1 + y^2]]`, `beta = (cos 2 pi x, sin 2 pi y)`,
/// `gamma = e^(x + y)`, `u = sin(2 pi x) sin(2 pi y) + x^5 + y^5 + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Problem1 {
    pub alpha: f64,
    /// Set `gamma = 0` (used by the robustness sweep).
    pub no_reaction: bool,
}

impl Problem1 {
    pub const DEFAULT_ALPHA: f64 = 1e-7;

    pub fn new(alpha: f64) -> Self {
        Self { alpha, no_reaction: false }
    }

    pub fn without_reaction(alpha: f64) -> Self {
        Self { alpha, no_reaction: true }
    }

    /// Second derivatives `[u_xx, u_xy, u_yy]` of the exact solution.
    pub fn hessian(&self, p: Point2) -> [f64; 3] {
        let (sx, sy) = (sin(2.0 * PI * p.x), sin(2.0 * PI * p.y));
        let (cx, cy) = (cos(2.0 * PI * p.x), cos(2.0 * PI * p.y));
        let w = 4.0 * PI * PI;
        [
            -w * sx * sy + 20.0 * ipow(p.x, 3),
            w * cx * cy,
            -w * sx * sy + 20.0 * ipow(p.y, 3),
        ]
    }
}

impl CoefficientField for Problem1 {
    fn diffusion(&self, p: Point2) -> Tensor2 {
        let a = self.alpha;
        [[a * (1.0 + p.x * p.x), a * p.x * p.y], [a * p.x * p.y, a * (1.0 + p.y * p.y)]]
    }

    fn diffusion_gradient(&self, p: Point2) -> Option<[Tensor2; 2]> {
        let a = self.alpha;
        Some([
            [[2.0 * a * p.x, a * p.y], [a * p.y, 0.0]],
            [[0.0, a * p.x], [a * p.x, 2.0 * a * p.y]],
        ])
    }

    fn convection(&self, p: Point2) -> [f64; 2] {
        [cos(2.0 * PI * p.x), sin(2.0 * PI * p.y)]
    }

    fn convection_divergence(&self, p: Point2) -> Option<f64> {
        Some(-2.0 * PI * sin(2.0 * PI * p.x) + 2.0 * PI * cos(2.0 * PI * p.y))
    }

    fn reaction(&self, p: Point2) -> f64 {
        if self.no_reaction {
            0.0
        } else {
            exp(p.x + p.y)
        }
    }

    fn source(&self, p: Point2) -> f64 {
        let [ux, uy] = self.gradient(p);
        let [uxx, uxy, uyy] = self.hessian(p);
        let (x, y) = (p.x, p.y);
        let diff = -self.alpha * (3.0 * x * ux + 3.0 * y * uy + (1.0 + x * x) * uxx + 2.0 * x * y * uxy + (1.0 + y * y) * uyy);
        let b = self.convection(p);
        diff + b[0] * ux + b[1] * uy + self.reaction(p) * self.value(p)
    }
}

impl ExactSolution for Problem1 {
    fn value(&self, p: Point2) -> f64 {
        sin(2.0 * PI * p.x) * sin(2.0 * PI * p.y) + ipow(p.x, 5) + ipow(p.y, 5) + 1.0
    }

    fn gradient(&self, p: Point2) -> [f64; 2] {
        let (sx, sy) = (sin(2.0 * PI * p.x), sin(2.0 * PI * p.y));
        let (cx, cy) = (cos(2.0 * PI * p.x), cos(2.0 * PI * p.y));
        [
            2.0 * PI * cx * sy + 5.0 * ipow(p.x, 4),
            2.0 * PI * sx * cy + 5.0 * ipow(p.y, 4),
        ]
    }
}

impl Problem for Problem1 {
    fn name(&self) -> String {
        alloc::format!("problem1(alpha={:e})", self.alpha)
    }

    fn dirichlet(&self, p: Point2) -> f64 {
        self.value(p)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        Some(self)
    }
}

/// Internal-layer benchmark: `K = 1e-6 I`, `beta = (cos 45deg, sin 45deg)`,
/// `gamma = f = 0`, `u = 1` on `y = 0` and on `x = 0, y < 0.2`, `u = 0`
/// elsewhere on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerProblem {
    pub kappa: f64,
    pub angle: f64,
    /// Height of the inflow jump on the left side.
    pub split: f64,
}

impl Default for LayerProblem {
    fn default() -> Self {
        Self {
            kappa: 1e-6,
            angle: PI / 4.0,
            split: 0.2,
        }
    }
}

impl CoefficientField for LayerProblem {
    fn diffusion(&self, _: Point2) -> Tensor2 {
        [[self.kappa, 0.0], [0.0, self.kappa]]
    }

    fn diffusion_gradient(&self, _: Point2) -> Option<[Tensor2; 2]> {
        Some([[[0.0; 2]; 2]; 2])
    }

    fn convection(&self, _: Point2) -> [f64; 2] {
        [cos(self.angle), sin(self.angle)]
    }

    fn convection_divergence(&self, _: Point2) -> Option<f64> {
        Some(0.0)
    }

    fn reaction(&self, _: Point2) -> f64 {
        0.0
    }

    fn source(&self, _: Point2) -> f64 {
        0.0
    }
}

impl Problem for LayerProblem {
    fn name(&self) -> String {
        String::from("layer")
    }

    fn dirichlet(&self, p: Point2) -> f64 {
        let eps = 1e-12;
        if p.y <= eps || (p.x <= eps && p.y < self.split) {
            1.0
        } else {
            0.0
        }
    }
}

/// `u = x^mu y^nu` with constant `K = kappa I`, `beta`, `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonomialProblem {
    pub mu: u32,
    pub nu: u32,
    pub kappa: f64,
    pub beta: [f64; 2],
    pub gamma: f64,
}

impl MonomialProblem {
    pub fn new(mu: u32, nu: u32) -> Self {
        Self {
            mu,
            nu,
            kappa: 1.0,
            beta: [1.0, 1.0],
            gamma: 1.0,
        }
    }
}

fn ipow(t: f64, n: i32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * t)
}

fn dpow(t: f64, n: u32, order: u32) -> f64 {
    if order > n {
        return 0.0;
    }
    let c: f64 = (0..order).map(|i| (n - i) as f64).product();
    c * ipow(t, (n - order) as i32)
}

impl CoefficientField for MonomialProblem {
    fn diffusion(&self, _: Point2) -> Tensor2 {
        [[self.kappa, 0.0], [0.0, self.kappa]]
    }

    fn diffusion_gradient(&self, _: Point2) -> Option<[Tensor2; 2]> {
        Some([[[0.0; 2]; 2]; 2])
    }

    fn convection(&self, _: Point2) -> [f64; 2] {
        self.beta
    }

    fn convection_divergence(&self, _: Point2) -> Option<f64> {
        Some(0.0)
    }

    fn reaction(&self, _: Point2) -> f64 {
        self.gamma
    }

    fn source(&self, p: Point2) -> f64 {
        let (m, n) = (self.mu, self.nu);
        let lap = dpow(p.x, m, 2) * dpow(p.y, n, 0) + dpow(p.x, m, 0) * dpow(p.y, n, 2);
        let [ux, uy] = self.gradient(p);
        -self.kappa * lap + self.beta[0] * ux + self.beta[1] * uy + self.gamma * self.value(p)
    }
}

impl ExactSolution for MonomialProblem {
    fn value(&self, p: Point2) -> f64 {
        dpow(p.x, self.mu, 0) * dpow(p.y, self.nu, 0)
    }

    fn gradient(&self, p: Point2) -> [f64; 2] {
        [
            dpow(p.x, self.mu, 1) * dpow(p.y, self.nu, 0),
            dpow(p.x, self.mu, 0) * dpow(p.y, self.nu, 1),
        ]
    }
}

impl Problem for MonomialProblem {
    fn name(&self) -> String {
        alloc::format!("x^{} y^{}", self.mu, self.nu)
    }

    fn dirichlet(&self, p: Point2) -> f64 {
        self.value(p)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem1_value_at_quarter_point() {
        let p = Problem1::new(1e-7);
        assert_eq!(p.value(Point2::new(0.25, 0.25)), 2.001953125);
    }

    #[test]
    fn problem1_diffusion_eigenvalues_at_corner() {
        let p = Problem1::new(1e-7);
        let (lo, hi) = crate::linalg::eig_sym2(p.diffusion(Point2::new(1.0, 1.0)));
        assert!((lo - 1e-7).abs() < 1e-20 && (hi - 3e-7).abs() < 1e-20);
    }

    /// Independent residual of `-div(K grad u) + beta . grad u + gamma u - f`
    /// with `div` taken by fourth-order central differences of `K grad u`.
    fn fd_residual(pr: &Problem1, p: Point2) -> f64 {
        let s = 1e-3;
        let flux = |q: Point2, axis: usize| {
            let k = pr.diffusion(q);
            let g = pr.gradient(q);
            k[axis][0] * g[0] + k[axis][1] * g[1]
        };
        let d = |axis: usize| {
            let at = |t: f64| {
                if axis == 0 {
                    flux(Point2::new(p.x + t, p.y), 0)
                } else {
                    flux(Point2::new(p.x, p.y + t), 1)
                }
            };
            (-at(2.0 * s) + 8.0 * at(s) - 8.0 * at(-s) + at(-2.0 * s)) / (12.0 * s)
        };
        let b = pr.convection(p);
        let g = pr.gradient(p);
        -(d(0) + d(1)) + b[0] * g[0] + b[1] * g[1] + pr.reaction(p) * pr.value(p) - pr.source(p)
    }

    #[test]
    fn problem1_source_matches_residual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // alpha = 1 exposes the diffusive part; alpha = 1e-7 is the benchmark
        let strong = Problem1::new(1.0);
        let weak = Problem1::new(1e-7);
        for _ in 0..1000 {
            let p = Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert!(fd_residual(&strong, p).abs() < 1e-7);
            assert!(fd_residual(&weak, p).abs() < 1e-8);
        }
    }

    #[test]
    fn problem1_gradient_matches_differences() {
        let pr = Problem1::new(1e-7);
        let p = Point2::new(0.31, 0.77);
        let s = 1e-6;
        let g = pr.gradient(p);
        let gx = (pr.value(Point2::new(p.x + s, p.y)) - pr.value(Point2::new(p.x - s, p.y))) / (2.0 * s);
        let gy = (pr.value(Point2::new(p.x, p.y + s)) - pr.value(Point2::new(p.x, p.y - s))) / (2.0 * s);
        assert!((g[0] - gx).abs() < 1e-7 && (g[1] - gy).abs() < 1e-7);
    }

    #[test]
    fn layer_boundary_data() {
        let l = LayerProblem::default();
        assert_eq!(l.dirichlet(Point2::new(0.5, 0.0)), 1.0);
        assert_eq!(l.dirichlet(Point2::new(0.0, 0.1)), 1.0);
        assert_eq!(l.dirichlet(Point2::new(0.0, 0.3)), 0.0);
        assert_eq!(l.dirichlet(Point2::new(1.0, 0.5)), 0.0);
        assert_eq!(l.dirichlet(Point2::new(0.5, 1.0)), 0.0);
    }
}
