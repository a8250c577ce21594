use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::abelian::IntMatrix;
use crate::error::{Error, Result};

/// A directed edge `src -> rng`. Paths compose when `rng` of one edge is the
/// `src` of the next, so `s_e^* s_e = p_{rng(e)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub rng: String,
}

impl Edge {
    pub fn new(id: impl Into<String>, src: impl Into<String>, rng: impl Into<String>) -> Self {
        Edge {
            id: id.into(),
            src: src.into(),
            rng: rng.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

/// A semantic problem found by a validator. `subject` names the offending
/// vertex, edge or pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub subject: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: &str, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            code: code.to_string(),
            subject: subject.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.violations.extend(other.violations);
        self.valid = self.violations.is_empty();
        self
    }
}

impl FiniteGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Self {
        FiniteGraph { vertices, edges }
    }

    /// One vertex with `n` loops `e0, ..., e{n-1}`.
    pub fn rose(n: usize) -> Self {
        let v = "v".to_string();
        let edges = (0..n).map(|i| Edge::new(format!("e{i}"), "v", "v")).collect();
        FiniteGraph::new(vec![v], edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex positions by id. Assumes ids are unique.
    pub fn vertex_index(&self) -> HashMap<&str, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }

    /// Edges as `(src, rng)` vertex positions. Fails on dangling endpoints.
    pub fn indexed_edges(&self) -> Result<Vec<(usize, usize)>> {
        let index = self.vertex_index();
        self.edges
            .iter()
            .map(|e| {
                let find = |v: &str| {
                    index.get(v).copied().ok_or_else(|| {
                        Error::Malformed(format!("edge {:?} references unknown vertex {v:?}", e.id))
                    })
                };
                Ok((find(&e.src)?, find(&e.rng)?))
            })
            .collect()
    }
}

/// Checks referential integrity (always) and, under `strict`, that every
/// vertex emits and receives at least one edge. Duplicate ids and dangling
/// endpoints are malformed input rather than report entries.
pub fn validate_graph(g: &FiniteGraph, strict: bool) -> Result<ValidationReport> {
    let mut seen = BTreeSet::new();
    for v in &g.vertices {
        if !seen.insert(v.as_str()) {
            return Err(Error::Malformed(format!("duplicate vertex id {v:?}")));
        }
    }
    let mut ids = BTreeSet::new();
    for e in &g.edges {
        if !ids.insert(e.id.as_str()) {
            return Err(Error::Malformed(format!("duplicate edge id {:?}", e.id)));
        }
    }
    let edges = g.indexed_edges()?;

    let mut violations = Vec::new();
    if strict {
        let n = g.vertex_count();
        let mut out = vec![0usize; n];
        let mut inc = vec![0usize; n];
        for &(s, r) in &edges {
            out[s] += 1;
            inc[r] += 1;
        }
        for (i, v) in g.vertices.iter().enumerate() {
            if out[i] == 0 {
                violations.push(Violation::new(
                    "sink",
                    v.clone(),
                    format!("vertex {v:?} emits no edge"),
                ));
            }
            if inc[i] == 0 {
                violations.push(Violation::new(
                    "source",
                    v.clone(),
                    format!("vertex {v:?} receives no edge"),
                ));
            }
        }
    }
    Ok(ValidationReport::from_violations(violations))
}

/// `M(v, w)` = number of edges from `v` to `w`, in vertex order.
pub fn vertex_matrix(g: &FiniteGraph) -> Result<IntMatrix> {
    let n = g.vertex_count();
    let mut m = IntMatrix::zeros(n, n);
    for (s, r) in g.indexed_edges()? {
        m[(s, r)] += 1;
    }
    Ok(m)
}

/// The graph seen as a Hilbert bimodule over functions on its vertices,
/// with basis the edge indicators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphBimodule {
    pub graph: FiniteGraph,
}

impl GraphBimodule {
    pub fn new(graph: FiniteGraph) -> Self {
        GraphBimodule { graph }
    }

    pub fn vertex_matrix(&self) -> Result<IntMatrix> {
        vertex_matrix(&self.graph)
    }
}

/// Vertex ids `v0, v1, ...`.
pub fn numbered_vertices(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

pub(crate) fn ensure_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut hit = vec![false; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n {
            return Err(Error::Invalid(format!(
                "permutation sends {i} to {p}, outside 0..{n}"
            )));
        }
        if hit[p] {
            return Err(Error::Invalid(format!("permutation hits {p} twice")));
        }
        hit[p] = true;
    }
    Ok(())
}

/// The functional graph of a vertex permutation: one edge `i -> perm[i]`
/// per vertex, so the vertex matrix is the permutation matrix.
pub fn permutation_bimodule(perm: &[usize]) -> Result<GraphBimodule> {
    ensure_permutation(perm)?;
    let vertices = numbered_vertices(perm.len());
    let edges = perm
        .iter()
        .enumerate()
        .map(|(i, &p)| Edge::new(format!("e{i}"), vertices[i].clone(), vertices[p].clone()))
        .collect();
    Ok(GraphBimodule::new(FiniteGraph::new(vertices, edges)))
}

/// Pull-back along a cover `p: X -> V`, given as `(x, p(x))` pairs: the
/// vertices are `X` and there is one edge `(x, e, y)` from `x` to `y` for
/// every edge `e` with `src(e) = p(x)` and `rng(e) = p(y)`.
pub fn pullback_graph(g: &FiniteGraph, cover: &[(String, String)]) -> Result<FiniteGraph> {
    validate_graph(g, false)?;
    let index = g.vertex_index();
    let mut seen = BTreeSet::new();
    let mut over = Vec::with_capacity(cover.len());
    for (x, v) in cover {
        if !seen.insert(x.as_str()) {
            return Err(Error::Malformed(format!("cover vertex {x:?} listed twice")));
        }
        let &i = index
            .get(v.as_str())
            .ok_or_else(|| Error::Malformed(format!("cover maps {x:?} to unknown vertex {v:?}")))?;
        over.push(i);
    }
    let mut hit = vec![false; g.vertex_count()];
    for &i in &over {
        hit[i] = true;
    }
    if let Some(missed) = hit.iter().position(|h| !h) {
        return Err(Error::Invalid(format!(
            "cover is not surjective: nothing lies over {:?}",
            g.vertices[missed]
        )));
    }

    let edges = g.indexed_edges()?;
    let mut out = Vec::new();
    for (a, (x, _)) in cover.iter().enumerate() {
        for (e, &(s, r)) in g.edges.iter().zip(&edges) {
            if over[a] != s {
                continue;
            }
            for (b, (y, _)) in cover.iter().enumerate() {
                if over[b] == r {
                    out.push(Edge::new(format!("({x},{},{y})", e.id), x.clone(), y.clone()));
                }
            }
        }
    }
    Ok(FiniteGraph::new(
        cover.iter().map(|(x, _)| x.clone()).collect(),
        out,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn two_cycle() -> FiniteGraph {
        FiniteGraph::new(
            vec!["v".into(), "w".into()],
            vec![Edge::new("a", "v", "w"), Edge::new("b", "w", "v")],
        )
    }

    #[test]
    fn rose_is_strictly_valid() {
        let r = validate_graph(&FiniteGraph::rose(2), true).unwrap();
        assert!(r.valid);
        assert_eq!(vertex_matrix(&FiniteGraph::rose(2)).unwrap(), IntMatrix::from_i64(&[&[2]]));
        assert_eq!(vertex_matrix(&FiniteGraph::rose(5)).unwrap(), IntMatrix::from_i64(&[&[5]]));
    }

    #[test]
    fn sink_is_named() {
        let g = FiniteGraph::new(vec!["v".into(), "w".into()], vec![Edge::new("a", "v", "w")]);
        let r = validate_graph(&g, true).unwrap();
        assert!(!r.valid);
        assert!(r.violations.iter().any(|x| x.code == "sink" && x.subject == "w"));
        assert!(validate_graph(&g, false).unwrap().valid);
    }

    #[test]
    fn dangling_and_duplicate_ids_are_malformed() {
        let g = FiniteGraph::new(vec!["v".into()], vec![Edge::new("a", "v", "x")]);
        assert!(matches!(validate_graph(&g, false), Err(Error::Malformed(_))));
        let g = FiniteGraph::new(
            vec!["v".into()],
            vec![Edge::new("a", "v", "v"), Edge::new("a", "v", "v")],
        );
        assert!(matches!(validate_graph(&g, false), Err(Error::Malformed(_))));
    }

    #[test]
    fn two_cycle_matrix() {
        assert_eq!(
            vertex_matrix(&two_cycle()).unwrap(),
            IntMatrix::from_i64(&[&[0, 1], &[1, 0]])
        );
    }

    #[test]
    fn permutation_matrices() {
        let id = permutation_bimodule(&[0]).unwrap();
        assert_eq!(id.vertex_matrix().unwrap(), IntMatrix::from_i64(&[&[1]]));
        let swap = permutation_bimodule(&[1, 0]).unwrap();
        assert_eq!(swap.vertex_matrix().unwrap(), IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        let cyc = permutation_bimodule(&[1, 2, 0]).unwrap();
        assert_eq!(
            cyc.vertex_matrix().unwrap(),
            IntMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])
        );
        assert!(matches!(permutation_bimodule(&[0, 0]), Err(Error::Invalid(_))));
    }

    #[test]
    fn pullback_counts() {
        let g = two_cycle();
        let same = pullback_graph(&g, &cover(&[("v", "v"), ("w", "w")])).unwrap();
        assert_eq!(vertex_matrix(&same).unwrap(), vertex_matrix(&g).unwrap());

        let rose = FiniteGraph::rose(3);
        let double = pullback_graph(&rose, &cover(&[("x", "v"), ("y", "v")])).unwrap();
        assert_eq!(double.vertex_count(), 2);
        assert_eq!(double.edge_count(), 12);

        let c = cover(&[("v0", "v"), ("v1", "v"), ("w0", "w"), ("w1", "w")]);
        assert_eq!(pullback_graph(&g, &c).unwrap().edge_count(), 8);

        let partial = cover(&[("v0", "v")]);
        assert!(matches!(pullback_graph(&g, &partial), Err(Error::Invalid(_))));
    }
}
