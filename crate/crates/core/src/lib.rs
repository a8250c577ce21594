//! K-theory of Toeplitz and Cuntz-Pimsner algebras of finitely generated
//! Hilbert bimodules over finite-dimensional commutative coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`abelian`]: exact integer matrices, Smith normal form, finitely
//!   generated abelian groups and homomorphisms between their presentations.
//! * [`exactseq`]: cyclic exact sequences, exactness checks and the
//!   extension problem for six-term sequences.
//! * [`model`]: graphs, permutation bimodules, rank-2 graph data with the
//!   factorization bijection, pull-back graphs, abstract K-data and unitary
//!   commutation matrices.
//! * [`ktheory`]: the Pimsner six-term pipeline, the two-stage iterated
//!   computation and the 3x3 ideal diagram cross-check.
//! * [`fock`]: creation operators on truncated Fock spaces and numerical
//!   checks of the operator relations.
//! * [`cli`]: JSON documents, reports and the `cpk` commands.

pub mod abelian;
pub mod cli;
pub mod error;
pub mod exactseq;
pub mod fock;
pub mod ktheory;
pub mod model;

pub use error::{Error, Result};
