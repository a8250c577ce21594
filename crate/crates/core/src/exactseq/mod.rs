//! Cyclic exact sequences of finitely generated abelian groups.
//!
//! A sequence is a cycle `B_0 -> B_1 -> ... -> B_{n-1} -> B_0` where any
//! node or arrow may be unknown. Arrow `i` goes from node `i` to node
//! `i + 1 (mod n)`.

mod extension;
mod solve;

pub use extension::{
    default_bound, extension_candidates, extension_candidates_with_bound, extensions, Extension,
    DEFAULT_EXTENSION_BOUND,
};
pub use solve::{
    realize, solve_six_term, solve_six_term_with, NodeSolution, SolveOptions, SolveOutcome,
    SolveStatus,
};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::{kernel_basis, lattice_contains, FgAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSequence {
    nodes: Vec<Option<FgAbGroup>>,
    arrows: Vec<Option<GroupHom>>,
}

impl ExactSequence {
    pub fn new(nodes: Vec<Option<FgAbGroup>>, arrows: Vec<Option<GroupHom>>) -> Result<Self> {
        let n = nodes.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Malformed(format!(
                "a cyclic exact sequence needs a positive even length, got {n}"
            )));
        }
        if arrows.len() != n {
            return Err(Error::Malformed(format!(
                "{n} nodes need {n} arrows, got {}",
                arrows.len()
            )));
        }
        for (i, arrow) in arrows.iter().enumerate() {
            let Some(f) = arrow else { continue };
            let j = (i + 1) % n;
            if let Some(src) = &nodes[i] {
                if f.dom() != src {
                    return Err(Error::Malformed(format!(
                        "arrow {i} starts at {} but node {i} is {src}",
                        f.dom()
                    )));
                }
            }
            if let Some(dst) = &nodes[j] {
                if f.cod() != dst {
                    return Err(Error::Malformed(format!(
                        "arrow {i} ends at {} but node {j} is {dst}",
                        f.cod()
                    )));
                }
            }
        }
        Ok(ExactSequence { nodes, arrows })
    }

    /// A fully known sequence.
    pub fn known(arrows: Vec<GroupHom>) -> Result<Self> {
        let nodes = arrows.iter().map(|f| Some(f.dom().clone())).collect();
        Self::new(nodes, arrows.into_iter().map(Some).collect())
    }

    /// The standard six-term layout
    /// `x0 -f0-> x1 -> ? -> x3 -f3-> x4 -> ? -> x0`.
    pub fn six_term(f0: GroupHom, f3: GroupHom) -> Result<Self> {
        let nodes = vec![
            Some(f0.dom().clone()),
            Some(f0.cod().clone()),
            None,
            Some(f3.dom().clone()),
            Some(f3.cod().clone()),
            None,
        ];
        let arrows = vec![Some(f0), None, None, Some(f3), None, None];
        Self::new(nodes, arrows)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> Option<&FgAbGroup> {
        self.nodes[i].as_ref()
    }

    pub fn arrow(&self, i: usize) -> Option<&GroupHom> {
        self.arrows[i].as_ref()
    }

    pub fn nodes(&self) -> &[Option<FgAbGroup>] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[Option<GroupHom>] {
        &self.arrows
    }

    /// The same cycle started at node `k`.
    pub fn rotate(&self, k: usize) -> Self {
        let n = self.len();
        let k = k % n;
        let mut nodes = self.nodes.clone();
        let mut arrows = self.arrows.clone();
        nodes.rotate_left(k);
        arrows.rotate_left(k);
        ExactSequence { nodes, arrows }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeReport {
    pub position: usize,
    pub exact: bool,
    /// A generator of one lattice that is missing from the other, in the
    /// node's canonical coordinates.
    #[serde(
        with = "witness_serde",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub witness: Option<Vec<BigInt>>,
    pub detail: String,
}

mod witness_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::abelian::serde_int::vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Checks `im(incoming) = ker(outgoing)` at every node. The comparison is
/// done on lattices in `Z^n` over the node's generators, with the node's own
/// relations added to the image side.
pub fn verify_exact(seq: &ExactSequence) -> Result<Vec<NodeReport>> {
    let n = seq.len();
    let mut arrows = Vec::with_capacity(n);
    for i in 0..n {
        if seq.node(i).is_none() {
            return Err(Error::Precondition(format!("node {i} is unknown")));
        }
        match seq.arrow(i) {
            Some(f) => arrows.push(f),
            None => return Err(Error::Precondition(format!("arrow {i} is unknown"))),
        }
    }
    for i in 0..n {
        let next = arrows[(i + 1) % n];
        if arrows[i].cod() != next.dom() {
            return Err(Error::Malformed(format!(
                "arrow {i} ends at {} but arrow {} starts at {}",
                arrows[i].cod(),
                (i + 1) % n,
                next.dom()
            )));
        }
    }

    let mut reports = Vec::with_capacity(n);
    for i in 0..n {
        let incoming = arrows[(i + n - 1) % n];
        let outgoing = arrows[i];
        let node = outgoing.dom();
        let rel_here = node.relation_matrix();
        let rel_next = outgoing.cod().relation_matrix();
        let image = incoming.matrix().hstack(&rel_here);

        // x with outgoing(x) a relation of the next node
        let stacked = outgoing.matrix().hstack(&rel_next);
        let top: Vec<usize> = (0..node.generator_count()).collect();
        let kernel = kernel_basis(&stacked).select_rows(&top);

        let report = compare(i, node, outgoing.matrix(), &rel_next, &image, &kernel);
        reports.push(report);
    }
    Ok(reports)
}

fn compare(
    position: usize,
    node: &FgAbGroup,
    outgoing: &IntMatrix,
    rel_next: &IntMatrix,
    image: &IntMatrix,
    kernel: &IntMatrix,
) -> NodeReport {
    for col in image.columns() {
        if !lattice_contains(rel_next, &outgoing.mul_vec(&col)) {
            return NodeReport {
                position,
                exact: false,
                witness: Some(node.reduce(&col)),
                detail: "image element not killed by the outgoing map".into(),
            };
        }
    }
    for col in kernel.columns() {
        if !lattice_contains(image, &col) {
            return NodeReport {
                position,
                exact: false,
                witness: Some(node.reduce(&col)),
                detail: "kernel element not in the image of the incoming map".into(),
            };
        }
    }
    NodeReport {
        position,
        exact: true,
        witness: None,
        detail: "im = ker".into(),
    }
}

/// True when every node of a fully known sequence is exact.
pub fn is_exact(seq: &ExactSequence) -> Result<bool> {
    Ok(verify_exact(seq)?.iter().all(|r| r.exact))
}
