//! Problem coefficients, per-cell coefficient bounds, the inverse-inequality
//! constant and the SUPG parameter `tau_E`.

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::Point2;
use crate::linalg::{self, Mat};
use crate::poly::MonomialBasis;
use crate::vemspace::ElementOperators;

/// `K(x)` as `[[Kxx, Kxy], [Kyx, Kyy]]`.
pub type Tensor2 = [[f64; 2]; 2];

/// Evaluable problem data for `-div(K grad u) + beta . grad u + gamma u = f`.
pub trait CoefficientField: Send + Sync {
    fn diffusion(&self, p: Point2) -> Tensor2;

    /// `[dK/dx, dK/dy]`, when known in closed form.
    fn diffusion_gradient(&self, _p: Point2) -> Option<[Tensor2; 2]> {
        None
    }

    fn convection(&self, p: Point2) -> [f64; 2];

    /// `div beta`, when known in closed form.
    fn convection_divergence(&self, _p: Point2) -> Option<f64> {
        None
    }

    fn reaction(&self, p: Point2) -> f64;

    fn source(&self, p: Point2) -> f64;
}

pub trait ExactSolution: Send + Sync {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> [f64; 2];
}

/// Derivatives of `K`, by central differences with step `1e-6 h` when no
/// closed form is available.
pub fn diffusion_gradient(coeffs: &dyn CoefficientField, p: Point2, h: f64) -> [Tensor2; 2] {
    if let Some(g) = coeffs.diffusion_gradient(p) {
        return g;
    }
    let s = 1e-6 * h;
    let mut out = [[[0.0; 2]; 2]; 2];
    for (axis, o) in out.iter_mut().enumerate() {
        let d = if axis == 0 { Point2::new(s, 0.0) } else { Point2::new(0.0, s) };
        let kp = coeffs.diffusion(p + d);
        let km = coeffs.diffusion(p - d);
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] = (kp[i][j] - km[i][j]) / (2.0 * s);
            }
        }
    }
    out
}

/// `div beta`, by central differences with step `1e-6 h` when no closed form
/// is available.
pub fn convection_divergence(coeffs: &dyn CoefficientField, p: Point2, h: f64) -> f64 {
    if let Some(d) = coeffs.convection_divergence(p) {
        return d;
    }
    let s = 1e-6 * h;
    let bxp = coeffs.convection(p + Point2::new(s, 0.0))[0];
    let bxm = coeffs.convection(p - Point2::new(s, 0.0))[0];
    let byp = coeffs.convection(p + Point2::new(0.0, s))[1];
    let bym = coeffs.convection(p - Point2::new(0.0, s))[1];
    (bxp - bxm + byp - bym) / (2.0 * s)
}

/// `div(K q) = sum_ab (d_a K_ab) q_b + K_ab d_a q_b`, with `dq[a][b] = d_a q_b`.
pub fn div_flux(k: Tensor2, dk: [Tensor2; 2], q: [f64; 2], dq: [[f64; 2]; 2]) -> f64 {
    let mut s = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            s += dk[a][a][b] * q[b] + k[a][b] * dq[a][b];
        }
    }
    s
}

pub fn apply(k: Tensor2, q: [f64; 2]) -> [f64; 2] {
    [k[0][0] * q[0] + k[0][1] * q[1], k[1][0] * q[0] + k[1][1] * q[1]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SupgError {
    /// `K` is not symmetric positive definite at the given point.
    NotSpd { x: f64, y: f64 },
    NegativeReaction { x: f64, y: f64 },
    NonFinite { x: f64, y: f64 },
}

impl fmt::Display for SupgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSpd { x, y } => write!(f, "diffusion tensor is not symmetric positive definite at ({x}, {y})"),
            Self::NegativeReaction { x, y } => write!(f, "reaction coefficient is negative at ({x}, {y})"),
            Self::NonFinite { x, y } => write!(f, "non-finite coefficient at ({x}, {y})"),
        }
    }
}

impl core::error::Error for SupgError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalBounds {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Extreme eigenvalues of `K` and maxima of `|beta|` and `gamma` sampled at
/// the given points (quadrature nodes plus vertices in practice).
pub fn local_bounds(
    points: impl IntoIterator<Item = Point2>,
    coeffs: &dyn CoefficientField,
) -> Result<LocalBounds, SupgError> {
    let mut b = LocalBounds {
        kappa_min: f64::INFINITY,
        kappa_max: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };
    for p in points {
        let k = coeffs.diffusion(p);
        let be = coeffs.convection(p);
        let g = coeffs.reaction(p);
        let all = [k[0][0], k[0][1], k[1][0], k[1][1], be[0], be[1], g];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SupgError::NonFinite { x: p.x, y: p.y });
        }
        let scale = k[0][0].abs().max(k[1][1].abs()).max(k[0][1].abs());
        let (lo, hi) = linalg::eig_sym2(k);
        if (k[0][1] - k[1][0]).abs() > 1e-12 * scale || !(lo > 0.0) {
            return Err(SupgError::NotSpd { x: p.x, y: p.y });
        }
        if g < 0.0 {
            return Err(SupgError::NegativeReaction { x: p.x, y: p.y });
        }
        b.kappa_min = b.kappa_min.min(lo);
        b.kappa_max = b.kappa_max.max(hi);
        b.beta = b.beta.max(libm::hypot(be[0], be[1]));
        b.gamma = b.gamma.max(g);
    }
    Ok(b)
}

pub fn cell_bounds(ops: &ElementOperators, vertices: &[Point2], coeffs: &dyn CoefficientField) -> Result<LocalBounds, SupgError> {
    local_bounds(ops.rule.points.iter().chain(vertices).copied(), coeffs)
}

/// The constant of the inverse inequality `C h^2 |div(K q)|^2 <= |K q|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InverseConstant {
    /// `div(K grad p) = 0` for every `p` in `P_k`.
    DivergenceFree,
    Value(f64),
}

impl InverseConstant {
    /// Value used in `tau_E`; the divergence-free case takes the value that
    /// gives `m_k = 1/3`.
    pub fn value(self) -> f64 {
        match self {
            Self::DivergenceFree => 1.0 / 6.0,
            Self::Value(c) => c,
        }
    }

    pub fn m_k(self) -> f64 {
        match self {
            Self::DivergenceFree => 1.0 / 3.0,
            Self::Value(c) => 2.0 * c,
        }
    }
}

/// Largest admissible constant over `q = grad p`, `p in P_k(E)`: the
/// reciprocal of the largest eigenvalue of `h^2 (div Kq, div Kq)` against
/// `(Kq, Kq)`.
pub fn inverse_constant(ops: &ElementOperators, coeffs: &dyn CoefficientField) -> InverseConstant {
    let basis = &ops.basis;
    let n = basis.len() - 1;
    let h = ops.diameter;
    let mut num = Mat::zeros(n, n);
    let mut den = Mat::zeros(n, n);
    for (p, w) in ops.rule.iter() {
        let k = coeffs.diffusion(p);
        let dk = diffusion_gradient(coeffs, p, h);
        let (flux, div) = monomial_fluxes(basis, k, dk, p);
        for a in 0..n {
            for b in 0..n {
                num[(a, b)] += w * h * h * div[a + 1] * div[b + 1];
                den[(a, b)] += w * (flux[a + 1][0] * flux[b + 1][0] + flux[a + 1][1] * flux[b + 1][1]);
            }
        }
    }
    match linalg::max_generalized_eigenvalue(&num, &den) {
        Some(l) if l > 1e-10 => InverseConstant::Value(1.0 / l),
        _ => InverseConstant::DivergenceFree,
    }
}

/// `K grad m_a` and `div(K grad m_a)` for every monomial of `basis` at `p`.
pub fn monomial_fluxes(basis: &MonomialBasis, k: Tensor2, dk: [Tensor2; 2], p: Point2) -> (Vec<[f64; 2]>, Vec<f64>) {
    let g = basis.grad(p);
    let hs = basis.hessian(p);
    let flux = g.iter().map(|&q| apply(k, q)).collect();
    let div = g
        .iter()
        .zip(&hs)
        .map(|(&q, h)| div_flux(k, dk, q, [[h[0], h[1]], [h[1], h[2]]]))
        .collect();
    (flux, div)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupgParams {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub beta: f64,
    pub gamma: f64,
    pub inverse: InverseConstant,
    pub ck: f64,
    pub m_k: f64,
    pub peclet: f64,
    pub karlovitz: f64,
    pub tau: f64,
    pub c_tau: f64,
    pub h: f64,
}

/// Which argument of the minimum defines `tau_E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Diffusive,
    Convective,
    Reactive,
}

impl SupgParams {
    /// `tau_E = min{ C h^2 / kappa, h / (2 beta), C_tau / gamma }`, where the
    /// last two arguments are dropped when `beta` or `gamma` vanish.
    pub fn compute(h: f64, bounds: LocalBounds, inverse: InverseConstant, c_tau: f64) -> Self {
        let ck = inverse.value();
        let m_k = inverse.m_k();
        let kappa = bounds.kappa_max;
        let diffusive = ck * h * h / kappa;
        let convective = if bounds.beta > 0.0 { h / (2.0 * bounds.beta) } else { f64::INFINITY };
        let reactive = if bounds.gamma > 0.0 { c_tau / bounds.gamma } else { f64::INFINITY };
        let tau = diffusive.min(convective).min(reactive);
        let peclet = m_k * bounds.beta * h / (2.0 * kappa);
        let karlovitz = if bounds.gamma > 0.0 {
            2.0 * bounds.beta * c_tau / (h * bounds.gamma)
        } else {
            f64::INFINITY
        };
        Self {
            kappa_min: bounds.kappa_min,
            kappa_max: bounds.kappa_max,
            beta: bounds.beta,
            gamma: bounds.gamma,
            inverse,
            ck,
            m_k,
            peclet,
            karlovitz,
            tau,
            c_tau,
            h,
        }
    }

    pub fn regime(&self) -> Regime {
        let diffusive = self.ck * self.h * self.h / self.kappa_max;
        let reactive = if self.gamma > 0.0 { self.c_tau / self.gamma } else { f64::INFINITY };
        if self.tau == diffusive {
            Regime::Diffusive
        } else if self.tau == reactive {
            Regime::Reactive
        } else {
            Regime::Convective
        }
    }

    /// `K_beta = K + tau beta beta^T`.
    pub fn effective_tensor(&self, k: Tensor2, beta: [f64; 2]) -> Tensor2 {
        let t = self.tau;
        [
            [k[0][0] + t * beta[0] * beta[0], k[0][1] + t * beta[0] * beta[1]],
            [k[1][0] + t * beta[1] * beta[0], k[1][1] + t * beta[1] * beta[1]],
        ]
    }

    /// Multiplier of the dof-dof stabilization.
    pub fn stability_scale(&self) -> f64 {
        self.kappa_max + self.tau * self.beta * self.beta
    }
}

/// Bounds, inverse constant and `tau_E` of one cell.
pub fn cell_params(
    ops: &ElementOperators,
    vertices: &[Point2],
    coeffs: &dyn CoefficientField,
    c_tau: f64,
) -> Result<SupgParams, SupgError> {
    let bounds = cell_bounds(ops, vertices, coeffs)?;
    let inverse = inverse_constant(ops, coeffs);
    Ok(SupgParams::compute(ops.diameter, bounds, inverse, c_tau))
}
