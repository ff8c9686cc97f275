use alloc::vec::Vec;

use libm::{cos, sin};

use super::{local_values, LayerProblem};
use crate::assembly::CellSystem;
use crate::geometry::Point2;
use crate::locate::PointLocator;
use crate::mesh::Mesh;
use crate::poly::eval_poly;
use crate::vemspace::DofMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSample {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerMetrics {
    pub samples: Vec<LayerSample>,
    pub min: f64,
    pub max: f64,
    /// Mean of `|u_h - 1|` on the plateau below the internal layer.
    pub plateau_low: f64,
    /// Mean of `|u_h|` on the plateau above the internal layer.
    pub plateau_high: f64,
    pub n_low: usize,
    pub n_high: usize,
    /// Distance kept from the layers, `5 h_max`.
    pub margin: f64,
}

/// `Pi0_k u_h` at the centres of a `grid x grid` partition of the unit
/// square, row by row from the bottom. Points outside the mesh are skipped.
pub fn sample_grid(mesh: &Mesh, dofmap: &DofMap, cells: &[CellSystem], uh: &[f64], grid: usize) -> Vec<LayerSample> {
    let locator = PointLocator::new(mesh);
    let coeffs: Vec<_> = (0..cells.len())
        .map(|c| &cells[c].ops.pi0_k * local_values(mesh, dofmap, c, uh))
        .collect();
    let mut out = Vec::with_capacity(grid * grid);
    for j in 0..grid {
        for i in 0..grid {
            let p = Point2::new((i as f64 + 0.5) / grid as f64, (j as f64 + 0.5) / grid as f64);
            let Some(c) = locator.locate(p) else { continue };
            let u = eval_poly(&cells[c].ops.basis.eval(p), coeffs[c].as_slice());
            out.push(LayerSample { x: p.x, y: p.y, u });
        }
    }
    out
}

/// Samples `Pi0_k u_h` with [`sample_grid`] and measures the two constant
/// regions away from the layers.
///
/// The layers are the internal one along the characteristic through
/// `(0, split)` and the outflow boundary layers at `x = 1` and `y = 1`.
pub fn layer_metrics(
    mesh: &Mesh,
    dofmap: &DofMap,
    cells: &[CellSystem],
    uh: &[f64],
    problem: &LayerProblem,
    grid: usize,
) -> LayerMetrics {
    let samples = sample_grid(mesh, dofmap, cells, uh, grid);
    let margin = 5.0 * mesh.h_max();
    let dir = Point2::new(cos(problem.angle), sin(problem.angle));
    let origin = Point2::new(0.0, problem.split);
    let mut m = LayerMetrics {
        samples: Vec::new(),
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        plateau_low: 0.0,
        plateau_high: 0.0,
        n_low: 0,
        n_high: 0,
        margin,
    };
    for s in &samples {
        let (p, u) = (Point2::new(s.x, s.y), s.u);
        m.min = m.min.min(u);
        m.max = m.max.max(u);
        // signed distance to the internal layer, positive above it
        let side = dir.cross(p - origin);
        if side.abs() <= margin || 1.0 - p.x <= margin || 1.0 - p.y <= margin {
            continue;
        }
        if side < 0.0 {
            m.plateau_low += (u - 1.0).abs();
            m.n_low += 1;
        } else {
            m.plateau_high += u.abs();
            m.n_high += 1;
        }
    }
    m.samples = samples;
    if m.n_low > 0 {
        m.plateau_low /= m.n_low as f64;
    }
    if m.n_high > 0 {
        m.plateau_high /= m.n_high as f64;
    }
    m
}
