//! JSON input documents, one per `kind`.

use serde::{Deserialize, Serialize};

use crate::abelian::{FgAbGroup, IntMatrix};
use crate::error::{Error, Result};
use crate::model::{
    commuting_permutations_spec, AbstractKData, BimoduleModel, ChiPair, Edge, FiniteGraph,
    TwoGraphSpec, UnitaryChi,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDocument {
    Graph {
        vertices: Vec<String>,
        edges: Vec<Edge>,
    },
    TwoGraph {
        vertices: Vec<String>,
        edges1: Vec<Edge>,
        edges2: Vec<Edge>,
        chi: Vec<ChiPair>,
    },
    /// Vertices `v0..v{n-1}`; each listed permutation contributes one edge
    /// per vertex. Without `layer2` this is a single graph.
    Permutation {
        n: usize,
        layer1: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layer2: Option<Vec<Vec<usize>>>,
    },
    AbstractKdata {
        #[serde(rename = "K0")]
        k0: FgAbGroup,
        #[serde(rename = "K1")]
        k1: FgAbGroup,
        action1: ActionDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        action2: Option<ActionDoc>,
    },
    UnitaryChi(UnitaryChi),
    /// `[cover vertex, base vertex]` pairs.
    Cover { cover: Vec<(String, String)> },
}

/// Matrices on canonical generators, one row per generator of the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    #[serde(rename = "K0")]
    pub k0: Vec<Vec<i64>>,
    #[serde(rename = "K1")]
    pub k1: Vec<Vec<i64>>,
}

fn matrix(rows: &[Vec<i64>], n: usize, what: &str) -> Result<IntMatrix> {
    if rows.len() != n {
        return Err(Error::Malformed(format!(
            "{what} needs {n} rows, got {}",
            rows.len()
        )));
    }
    IntMatrix::from_rows(rows, n).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

impl ActionDoc {
    fn matrices(&self, k0: &FgAbGroup, k1: &FgAbGroup, name: &str) -> Result<(IntMatrix, IntMatrix)> {
        Ok((
            matrix(&self.k0, k0.generator_count(), &format!("{name}.K0"))?,
            matrix(&self.k1, k1.generator_count(), &format!("{name}.K1"))?,
        ))
    }

    pub fn from_matrices(k0: &IntMatrix, k1: &IntMatrix) -> Self {
        let rows = |m: &IntMatrix| -> Vec<Vec<i64>> {
            m.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("small entries")).collect())
                .collect()
        };
        ActionDoc {
            k0: rows(k0),
            k1: rows(k1),
        }
    }
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpecDocument::Graph { .. } => "graph",
            SpecDocument::TwoGraph { .. } => "two_graph",
            SpecDocument::Permutation { .. } => "permutation",
            SpecDocument::AbstractKdata { .. } => "abstract_kdata",
            SpecDocument::UnitaryChi(_) => "unitary_chi",
            SpecDocument::Cover { .. } => "cover",
        }
    }

    pub fn from_graph(g: &FiniteGraph) -> Self {
        SpecDocument::Graph {
            vertices: g.vertices.clone(),
            edges: g.edges.clone(),
        }
    }

    pub fn from_two_graph(s: &TwoGraphSpec) -> Self {
        SpecDocument::TwoGraph {
            vertices: s.vertices.clone(),
            edges1: s.edges1.clone(),
            edges2: s.edges2.clone(),
            chi: s.chi.clone(),
        }
    }

    pub fn from_kdata(d: &AbstractKData) -> Self {
        SpecDocument::AbstractKdata {
            k0: d.k0.clone(),
            k1: d.k1.clone(),
            action1: ActionDoc::from_matrices(d.action1.k0.matrix(), d.action1.k1.matrix()),
            action2: d
                .action2
                .as_ref()
                .map(|a| ActionDoc::from_matrices(a.k0.matrix(), a.k1.matrix())),
        }
    }

    /// The bimodule data for the K-theory pipeline. Unitary matrices and
    /// covers have none.
    pub fn model(&self) -> Result<BimoduleModel> {
        match self {
            SpecDocument::Graph { vertices, edges } => {
                Ok(BimoduleModel::Graph(FiniteGraph::new(vertices.clone(), edges.clone())))
            }
            SpecDocument::TwoGraph {
                vertices,
                edges1,
                edges2,
                chi,
            } => Ok(BimoduleModel::TwoGraph(TwoGraphSpec {
                vertices: vertices.clone(),
                edges1: edges1.clone(),
                edges2: edges2.clone(),
                chi: chi.clone(),
            })),
            SpecDocument::Permutation { n, layer1, layer2 } => {
                let spec = commuting_permutations_spec(*n, layer1, layer2.as_deref().unwrap_or(&[]))?;
                Ok(match layer2 {
                    Some(_) => BimoduleModel::TwoGraph(spec),
                    None => BimoduleModel::Graph(spec.layer(crate::model::Layer::First)),
                })
            }
            SpecDocument::AbstractKdata {
                k0,
                k1,
                action1,
                action2,
            } => {
                let a1 = action1.matrices(k0, k1, "action1")?;
                let a2 = action2
                    .as_ref()
                    .map(|a| a.matrices(k0, k1, "action2"))
                    .transpose()?;
                Ok(BimoduleModel::Abstract(AbstractKData::from_matrices(
                    k0.clone(),
                    k1.clone(),
                    a1,
                    a2,
                )?))
            }
            SpecDocument::UnitaryChi(_) => Err(Error::Precondition(
                "a unitary chi only feeds the Fock checks; it has no K-theory route".into(),
            )),
            SpecDocument::Cover { .. } => Err(Error::Precondition(
                "a cover is not a bimodule; use it with `pullback`".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::flip_spec;

    #[test]
    fn round_trips() {
        let docs = [
            SpecDocument::from_two_graph(&flip_spec(2, 3)),
            SpecDocument::from_graph(&FiniteGraph::rose(2)),
            SpecDocument::UnitaryChi(UnitaryChi::rotation(0.5, 0.25)),
            SpecDocument::from_kdata(&AbstractKData::scalar(
                FgAbGroup::free(1),
                FgAbGroup::cyclic(2),
                (3, 1),
                None,
            )),
            SpecDocument::Permutation {
                n: 2,
                layer1: vec![vec![1, 0]],
                layer2: Some(vec![vec![1, 0]]),
            },
            SpecDocument::Cover {
                cover: vec![("x".into(), "v".into())],
            },
        ];
        for d in docs {
            let back = SpecDocument::parse(&d.to_json()).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn abstract_payload_shape() {
        let text = r#"{"kind": "abstract_kdata",
            "K0": {"rank": 1, "torsion": []}, "K1": {"rank": 1, "torsion": []},
            "action1": {"K0": [[2]], "K1": [[1]]}}"#;
        let d = SpecDocument::parse(text).unwrap();
        assert!(matches!(d.model().unwrap(), BimoduleModel::Abstract(_)));
        let bad = text.replace("[[2]]", "[[2, 1]]");
        assert!(matches!(SpecDocument::parse(&bad).unwrap().model(), Err(Error::Malformed(_))));
    }

    #[test]
    fn malformed_inputs() {
        for text in ["{", r#"{"kind": "torus"}"#, r#"{"kind": "graph", "vertices": []}"#] {
            assert!(matches!(SpecDocument::parse(text), Err(Error::Malformed(_))), "{text}");
        }
    }
}
