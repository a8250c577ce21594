//! Exact integer linear algebra and finitely generated abelian groups.
//!
//! Every K-group in the crate is an [`FgAbGroup`] in invariant-factor form,
//! and every K-map is a [`GroupHom`] whose matrix acts on canonical generator
//! tuples: free generators first, then torsion generators in increasing
//! invariant-factor order.

mod group;
mod matrix;
mod snf;
mod subquotient;

pub use group::{hom_well_defined, FgAbGroup, GroupHom};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, solve, SnfResult};
pub use subquotient::{
    cokernel, induced_on_cokernel, induced_on_kernel, kernel_basis, lattice_contains, Subquotient,
};

pub(crate) mod serde_int;
