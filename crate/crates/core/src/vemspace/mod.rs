//! The nonconforming virtual element space of order `k`.
//!
//! Local degrees of freedom of a cell with `n_E` edges, in this order:
//!
//! 1. for every edge (in cell order) the moments
//!    `(1/|e|) int_e v m_j`, `j = 0..k-1`, with the edge monomials taken in
//!    the global edge direction;
//! 2. the interior moments `(1/|E|) int_E v m_a`, `|a| <= k-2`.
//!
//! That gives `n_E k + k(k-1)/2` local dofs. Interior-edge dofs are shared by
//! the two neighbouring cells, which is what makes the jumps orthogonal to
//! `P_{k-1}(e)`.

mod dofmap;
mod operators;

pub use dofmap::DofMap;
pub use operators::{dof_functionals, local_dof_count, ElementError, ElementOperators};
