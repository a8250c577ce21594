//! Bimodule inputs: graphs, permutation bimodules, two-layer graphs with a
//! factorization bijection, abstract K-data and unitary commutation
//! matrices.

mod graph;
mod kdata;
mod twograph;
mod unitary;

pub use graph::{
    numbered_vertices, permutation_bimodule, pullback_graph, validate_graph, vertex_matrix, Edge,
    FiniteGraph, GraphBimodule, ValidationReport, Violation,
};
pub use kdata::{AbstractKData, KAction};
pub use twograph::{
    chi2_spec, chi_flip, chi_from_pairing, commuting_permutations_spec, flip_spec,
    single_vertex_spec, validate_chi, ChiPair, IndexedChiPair, Layer, TwoGraphSpec,
};
pub use unitary::{UnitaryChi, UNITARY_TOL};

/// Inputs the K-theory pipeline accepts. Unitary commutation matrices are
/// deliberately absent: they only feed the Fock checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimoduleModel {
    Graph(FiniteGraph),
    TwoGraph(TwoGraphSpec),
    Abstract(AbstractKData),
}
