//! Two edge layers over one vertex set, tied together by a factorization
//! bijection `chi` from blue-red paths `(e1, e2)` to red-blue paths
//! `(f2, f1)` with the same endpoints.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::graph::{
    ensure_permutation, numbered_vertices, validate_graph, vertex_matrix, Edge, FiniteGraph,
    ValidationReport, Violation,
};
use crate::abelian::IntMatrix;
use crate::error::{Error, Result};

/// `((e1, e2), (f2, f1))`: edge ids, `e1`/`f1` from the first layer.
pub type ChiPair = ((String, String), (String, String));

/// Index form of a [`ChiPair`], positions within `edges1`/`edges2`.
pub type IndexedChiPair = ((usize, usize), (usize, usize));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    First,
    Second,
}

impl Layer {
    pub fn other(self) -> Layer {
        match self {
            Layer::First => Layer::Second,
            Layer::Second => Layer::First,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoGraphSpec {
    pub vertices: Vec<String>,
    pub edges1: Vec<Edge>,
    pub edges2: Vec<Edge>,
    pub chi: Vec<ChiPair>,
}

impl TwoGraphSpec {
    pub fn layer(&self, layer: Layer) -> FiniteGraph {
        let edges = match layer {
            Layer::First => &self.edges1,
            Layer::Second => &self.edges2,
        };
        FiniteGraph::new(self.vertices.clone(), edges.clone())
    }

    pub fn vertex_matrix(&self, layer: Layer) -> Result<IntMatrix> {
        vertex_matrix(&self.layer(layer))
    }

    /// Both layers, then the bijection.
    pub fn validate(&self, strict: bool) -> Result<ValidationReport> {
        let mut report = ValidationReport::from_violations(Vec::new());
        for layer in [Layer::First, Layer::Second] {
            let mut r = validate_graph(&self.layer(layer), strict)?;
            for v in &mut r.violations {
                v.message = format!("layer {}: {}", layer_number(layer), v.message);
            }
            report = report.merge(r);
        }
        Ok(report.merge(validate_chi(self)?))
    }

    /// `chi` with edge ids replaced by positions. Unknown ids are malformed.
    pub fn indexed_chi(&self) -> Result<Vec<IndexedChiPair>> {
        let pos = |edges: &[Edge]| -> HashMap<String, usize> {
            edges
                .iter()
                .enumerate()
                .map(|(i, e)| (e.id.clone(), i))
                .collect()
        };
        let (p1, p2) = (pos(&self.edges1), pos(&self.edges2));
        let look = |map: &HashMap<String, usize>, id: &str, layer: usize| {
            map.get(id).copied().ok_or_else(|| {
                Error::Malformed(format!("chi names {id:?}, which is not an edge of layer {layer}"))
            })
        };
        self.chi
            .iter()
            .map(|((e1, e2), (f2, f1))| {
                Ok((
                    (look(&p1, e1, 1)?, look(&p2, e2, 2)?),
                    (look(&p2, f2, 2)?, look(&p1, f1, 1)?),
                ))
            })
            .collect()
    }

    /// The same data with the layers exchanged and `chi` inverted.
    pub fn swapped(&self) -> TwoGraphSpec {
        TwoGraphSpec {
            vertices: self.vertices.clone(),
            edges1: self.edges2.clone(),
            edges2: self.edges1.clone(),
            chi: self
                .chi
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

fn layer_number(layer: Layer) -> usize {
    match layer {
        Layer::First => 1,
        Layer::Second => 2,
    }
}

/// Checks that `chi` is a bijection between composable blue-red and
/// red-blue pairs preserving endpoints, and that the vertex matrices
/// commute. Every violation names the pair involved.
pub fn validate_chi(spec: &TwoGraphSpec) -> Result<ValidationReport> {
    validate_graph(&spec.layer(Layer::First), false)?;
    validate_graph(&spec.layer(Layer::Second), false)?;
    let pairs = spec.indexed_chi()?;
    let g1 = spec.layer(Layer::First).indexed_edges()?;
    let g2 = spec.layer(Layer::Second).indexed_edges()?;
    let name1 = |i: usize| spec.edges1[i].id.as_str();
    let name2 = |i: usize| spec.edges2[i].id.as_str();

    let mut violations = Vec::new();
    let mut domain: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut image: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &((e1, e2), (f2, f1)) in &pairs {
        let subject = format!(
            "({},{}) -> ({},{})",
            name1(e1),
            name2(e2),
            name2(f2),
            name1(f1)
        );
        if g1[e1].1 != g2[e2].0 {
            violations.push(Violation::new(
                "not_composable",
                subject.clone(),
                format!("rng({}) != src({})", name1(e1), name2(e2)),
            ));
        }
        if g2[f2].1 != g1[f1].0 {
            violations.push(Violation::new(
                "not_composable",
                subject.clone(),
                format!("rng({}) != src({})", name2(f2), name1(f1)),
            ));
        }
        if g2[f2].0 != g1[e1].0 {
            violations.push(Violation::new(
                "endpoint",
                subject.clone(),
                format!("src({}) != src({})", name2(f2), name1(e1)),
            ));
        }
        if g1[f1].1 != g2[e2].1 {
            violations.push(Violation::new(
                "endpoint",
                subject.clone(),
                format!("rng({}) != rng({})", name1(f1), name2(e2)),
            ));
        }
        if domain.insert((e1, e2), f2).is_some() {
            violations.push(Violation::new(
                "not_a_function",
                subject.clone(),
                format!("({},{}) is paired twice", name1(e1), name2(e2)),
            ));
        }
        if image.insert((f2, f1), e1).is_some() {
            violations.push(Violation::new(
                "not_injective",
                subject,
                format!("({},{}) is hit twice", name2(f2), name1(f1)),
            ));
        }
    }

    for (a, &(_, r1)) in g1.iter().enumerate() {
        for (b, &(s2, _)) in g2.iter().enumerate() {
            if r1 == s2 && !domain.contains_key(&(a, b)) {
                violations.push(Violation::new(
                    "not_total",
                    format!("({},{})", name1(a), name2(b)),
                    "composable pair has no image",
                ));
            }
        }
    }
    for (b, &(_, r2)) in g2.iter().enumerate() {
        for (a, &(s1, _)) in g1.iter().enumerate() {
            if r2 == s1 && !image.contains_key(&(b, a)) {
                violations.push(Violation::new(
                    "not_surjective",
                    format!("({},{})", name2(b), name1(a)),
                    "composable pair is not in the image",
                ));
            }
        }
    }

    let m1 = spec.vertex_matrix(Layer::First)?;
    let m2 = spec.vertex_matrix(Layer::Second)?;
    let (a, b) = (&m1 * &m2, &m2 * &m1);
    if a != b {
        let n = m1.rows();
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| a[(i, j)] != b[(i, j)])
            .expect("matrices differ somewhere");
        violations.push(Violation::new(
            "matrices_do_not_commute",
            format!("({},{})", spec.vertices[i], spec.vertices[j]),
            format!("M1·M2 = {} but M2·M1 = {} there", a[(i, j)], b[(i, j)]),
        ));
    }
    Ok(ValidationReport::from_violations(violations))
}

/// `(e_i, f_j) -> (f_j, e_i)` on ids `e0..`, `f0..`.
pub fn chi_flip(m: usize, n: usize) -> Vec<ChiPair> {
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            out.push((
                (format!("e{i}"), format!("f{j}")),
                (format!("f{j}"), format!("e{i}")),
            ));
        }
    }
    out
}

/// Names an explicit index pairing `((e1, e2), (f2, f1))` by edge ids.
pub fn chi_from_pairing(
    edges1: &[Edge],
    edges2: &[Edge],
    pairing: &[IndexedChiPair],
) -> Result<Vec<ChiPair>> {
    let check = |i: usize, len: usize, layer: usize| {
        if i < len {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "pairing uses edge {i} of layer {layer}, which has {len} edges"
            )))
        }
    };
    pairing
        .iter()
        .map(|&((e1, e2), (f2, f1))| {
            check(e1, edges1.len(), 1)?;
            check(f1, edges1.len(), 1)?;
            check(e2, edges2.len(), 2)?;
            check(f2, edges2.len(), 2)?;
            Ok((
                (edges1[e1].id.clone(), edges2[e2].id.clone()),
                (edges2[f2].id.clone(), edges1[f1].id.clone()),
            ))
        })
        .collect()
}

/// One vertex, `m` blue loops `e*`, `n` red loops `f*`, and the given
/// pairing.
pub fn single_vertex_spec(m: usize, n: usize, pairing: &[IndexedChiPair]) -> Result<TwoGraphSpec> {
    let edges1: Vec<Edge> = (0..m).map(|i| Edge::new(format!("e{i}"), "v", "v")).collect();
    let edges2: Vec<Edge> = (0..n).map(|j| Edge::new(format!("f{j}"), "v", "v")).collect();
    if pairing.len() != m * n {
        return Err(Error::Invalid(format!(
            "a single-vertex pairing needs {} pairs, got {}",
            m * n,
            pairing.len()
        )));
    }
    let chi = chi_from_pairing(&edges1, &edges2, pairing)?;
    Ok(TwoGraphSpec {
        vertices: vec!["v".into()],
        edges1,
        edges2,
        chi,
    })
}

/// The flip spec for `O_m ⊗ O_n`.
pub fn flip_spec(m: usize, n: usize) -> TwoGraphSpec {
    let pairing: Vec<IndexedChiPair> = (0..m)
        .flat_map(|i| (0..n).map(move |j| ((i, j), (j, i))))
        .collect();
    single_vertex_spec(m, n, &pairing).expect("flip pairing is in range")
}

/// `(e_i, f_j) -> (f_i, e_j)` on one vertex with `n` loops per layer.
pub fn chi2_spec(n: usize) -> TwoGraphSpec {
    let pairing: Vec<IndexedChiPair> = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i, j), (i, j))))
        .collect();
    single_vertex_spec(n, n, &pairing).expect("pairing is in range")
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // a after b
    b.iter().map(|&x| a[x]).collect()
}

/// Layers made of permutation bimodules: layer 1 has an edge
/// `v -> sigma_k(v)` for every listed `sigma_k`, layer 2 likewise for the
/// `tau_l`. When every `sigma_k` commutes with every `tau_l` the pairing
/// `(sigma_k at v, tau_l) -> (tau_l at v, sigma_k)` is a valid `chi`.
pub fn commuting_permutations_spec(
    vertex_count: usize,
    layer1: &[Vec<usize>],
    layer2: &[Vec<usize>],
) -> Result<TwoGraphSpec> {
    for p in layer1.iter().chain(layer2) {
        if p.len() != vertex_count {
            return Err(Error::Invalid(format!(
                "permutation of length {} on {vertex_count} vertices",
                p.len()
            )));
        }
        ensure_permutation(p)?;
    }
    for (k, s) in layer1.iter().enumerate() {
        for (l, t) in layer2.iter().enumerate() {
            if compose(s, t) != compose(t, s) {
                return Err(Error::Invalid(format!(
                    "permutation {k} of layer 1 does not commute with permutation {l} of layer 2"
                )));
            }
        }
    }
    let vertices = numbered_vertices(vertex_count);
    let edges = |perms: &[Vec<usize>], tag: &str| -> Vec<Edge> {
        perms
            .iter()
            .enumerate()
            .flat_map(|(k, p)| {
                let vertices = &vertices;
                p.iter().enumerate().map(move |(v, &w)| {
                    Edge::new(format!("{tag}{k}_{v}"), vertices[v].clone(), vertices[w].clone())
                })
            })
            .collect()
    };
    let edges1 = edges(layer1, "a");
    let edges2 = edges(layer2, "b");
    let mut chi = Vec::new();
    for (k, s) in layer1.iter().enumerate() {
        for (l, t) in layer2.iter().enumerate() {
            for v in 0..vertex_count {
                chi.push((
                    (format!("a{k}_{v}"), format!("b{l}_{}", s[v])),
                    (format!("b{l}_{v}"), format!("a{k}_{}", t[v])),
                ));
            }
        }
    }
    Ok(TwoGraphSpec {
        vertices,
        edges1,
        edges2,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_and_chi2_are_valid() {
        for spec in [flip_spec(2, 2), chi2_spec(2), flip_spec(1, 1), flip_spec(3, 5)] {
            let r = spec.validate(true).unwrap();
            assert!(r.valid, "{:?}", r.violations);
        }
        assert_eq!(chi_flip(2, 2).len(), 4);
        assert_eq!(chi_flip(1, 1), vec![(("e0".into(), "f0".into()), ("f0".into(), "e0".into()))]);
        assert_eq!(flip_spec(2, 2).chi, chi_flip(2, 2));
    }

    #[test]
    fn endpoint_mismatch_is_pinpointed() {
        // two vertices, blue v->w and w->v, red loops at each vertex
        let mut spec = commuting_permutations_spec(2, &[vec![1, 0]], &[vec![0, 1]]).unwrap();
        assert!(validate_chi(&spec).unwrap().valid);
        // pair (a0_0, b0_1) with a red-blue path starting at v1 instead of v0
        let bad = spec
            .chi
            .iter()
            .position(|((e1, _), _)| e1 == "a0_0")
            .unwrap();
        spec.chi[bad].1 = ("b0_1".into(), "a0_1".into());
        let r = validate_chi(&spec).unwrap();
        assert!(!r.valid);
        assert!(r
            .violations
            .iter()
            .any(|v| v.code == "endpoint" && v.subject.starts_with("(a0_0,")));
    }

    #[test]
    fn missing_pairs_are_reported() {
        let mut spec = flip_spec(2, 2);
        spec.chi.pop();
        let r = validate_chi(&spec).unwrap();
        assert!(r.violations.iter().any(|v| v.code == "not_total"));
        assert!(r.violations.iter().any(|v| v.code == "not_surjective"));

        let mut spec = flip_spec(2, 2);
        spec.chi[1].1 = spec.chi[0].1.clone();
        let r = validate_chi(&spec).unwrap();
        assert!(r.violations.iter().any(|v| v.code == "not_injective"));
    }

    #[test]
    fn unknown_edge_in_chi_is_malformed() {
        let mut spec = flip_spec(1, 1);
        spec.chi[0].0 .0 = "nope".into();
        assert!(matches!(validate_chi(&spec), Err(Error::Malformed(_))));
    }

    #[test]
    fn swapping_twice_is_identity() {
        let spec = commuting_permutations_spec(3, &[vec![1, 2, 0]], &[vec![2, 0, 1], vec![0, 1, 2]])
            .unwrap();
        assert!(spec.validate(true).unwrap().valid);
        assert!(spec.swapped().validate(true).unwrap().valid);
        assert_eq!(spec.swapped().swapped(), spec);
    }

    #[test]
    fn non_commuting_permutations_rejected() {
        let err = commuting_permutations_spec(3, &[vec![1, 0, 2]], &[vec![0, 2, 1]]);
        assert!(matches!(err, Err(Error::Invalid(_))));
    }
}
