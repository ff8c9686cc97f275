//! Nonconforming virtual element method of arbitrary order with SUPG
//! stabilization for convection-diffusion-reaction problems on polygonal
//! meshes of the unit square.
//!
//! The crate is `no_std` and only needs an allocator. Everything that touches
//! files, threads, or a sparse direct factorization lives in the `vemsupg`
//! companion crate.
//!
//! Module map:
//!
//! - [`mesh`]: polygonal meshes, the four benchmark mesh families, quality checks
//! - [`poly`]: scaled monomials on cells and edges, polygon and edge quadrature
//! - [`vemspace`]: degrees of freedom, global numbering, projector matrices
//! - [`supg`]: coefficient fields, local coefficient bounds, the SUPG parameter
//! - [`assembly`]: local discrete forms, sparse global assembly, Dirichlet data
//! - [`solver`]: sparse matrix kernels, ILU(0) and restarted GMRES
//! - [`analysis`]: error norms, convergence tables, benchmark problems

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod assembly;
pub mod geometry;
pub mod linalg;
pub mod locate;
pub mod mesh;
pub mod poly;
pub mod solver;
pub mod supg;
pub mod vemspace;

pub use geometry::Point2;
pub use mesh::{Mesh, MeshFamily};
