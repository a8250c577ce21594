//! Bundled desk-scale inputs, addressable as `builtin:<id>`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::document::SpecDocument;
use crate::abelian::FgAbGroup;
use crate::model::{chi2_spec, flip_spec, AbstractKData, Edge, FiniteGraph, UnitaryChi};

pub struct Fixture {
    pub id: &'static str,
    pub description: &'static str,
    build: fn() -> SpecDocument,
}

impl Fixture {
    pub fn document(&self) -> SpecDocument {
        (self.build)()
    }
}

fn two_cycle() -> FiniteGraph {
    FiniteGraph::new(
        vec!["a".into(), "b".into()],
        vec![Edge::new("ab", "a", "b"), Edge::new("ba", "b", "a")],
    )
}

fn scalar(p: i64, q: Option<i64>) -> SpecDocument {
    let z = FgAbGroup::free(1);
    SpecDocument::from_kdata(&AbstractKData::scalar(z.clone(), z, (p, 1), q.map(|q| (q, 1))))
}

fn swap_cycles() -> SpecDocument {
    SpecDocument::Permutation {
        n: 6,
        layer1: vec![(0..6).map(|v| (v + 3) % 6).collect()],
        layer2: Some(vec![(0..6).map(|v| v / 3 * 3 + (v % 3 + 1) % 3).collect()]),
    }
}

fn corrupted_unitary() -> SpecDocument {
    let mut m: DMatrix<Complex64> = UnitaryChi::rotation(FRAC_PI_4, 0.0).matrix().clone();
    m[(0, 0)] *= 1.25;
    SpecDocument::UnitaryChi(UnitaryChi::unchecked(2, 2, m))
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        id: "ex1.2.1-circle",
        description: "one vertex, one loop: the Toeplitz algebra over C(T)",
        build: || SpecDocument::from_graph(&FiniteGraph::rose(1)),
    },
    Fixture {
        id: "ex1.2.3-swap",
        description: "permutation bimodule of the swap on two vertices",
        build: || SpecDocument::Permutation {
            n: 2,
            layer1: vec![vec![1, 0]],
            layer2: None,
        },
    },
    Fixture {
        id: "ex1.2.4-rose-2",
        description: "rose with 2 loops (Cuntz algebra O_2)",
        build: || SpecDocument::from_graph(&FiniteGraph::rose(2)),
    },
    Fixture {
        id: "ex1.2.4-rose-3",
        description: "rose with 3 loops (Cuntz algebra O_3)",
        build: || SpecDocument::from_graph(&FiniteGraph::rose(3)),
    },
    Fixture {
        id: "ex2.2-two-cycle",
        description: "directed 2-cycle a -> b -> a",
        build: || SpecDocument::from_graph(&two_cycle()),
    },
    Fixture {
        id: "ex2.2-double-cover",
        description: "2-fold cover of the 2-cycle's vertices, for pullback",
        build: || SpecDocument::Cover {
            cover: [("a0", "a"), ("a1", "a"), ("b0", "b"), ("b1", "b")]
                .iter()
                .map(|(x, v)| (x.to_string(), v.to_string()))
                .collect(),
        },
    },
    Fixture {
        id: "ex3.4-commuting-swaps",
        description: "swap on two vertices in both layers",
        build: || SpecDocument::Permutation {
            n: 2,
            layer1: vec![vec![1, 0]],
            layer2: Some(vec![vec![1, 0]]),
        },
    },
    Fixture {
        id: "ex3.4-cycles-2x3",
        description: "commuting 2-cycle and 3-cycle on 6 vertices",
        build: swap_cycles,
    },
    Fixture {
        id: "ex3.5-flip-2-2",
        description: "one vertex, 2+2 loops, flip chi",
        build: || SpecDocument::from_two_graph(&flip_spec(2, 2)),
    },
    Fixture {
        id: "ex3.5-chi2-2",
        description: "one vertex, 2+2 loops, chi(e_i, f_j) = (f_i, e_j)",
        build: || SpecDocument::from_two_graph(&chi2_spec(2)),
    },
    Fixture {
        id: "ex3.5-unitary-chi",
        description: "rotation chi on C^2 x C^2 with alpha = pi/4, beta = 0",
        build: || SpecDocument::UnitaryChi(UnitaryChi::rotation(FRAC_PI_4, 0.0)),
    },
    Fixture {
        id: "ex3.5-unitary-corrupted",
        description: "the rotation chi with one entry scaled: not unitary, fock-check fails",
        build: corrupted_unitary,
    },
    Fixture {
        id: "ex4.6-loops-1-1",
        description: "one loop per layer: the 2-torus",
        build: || SpecDocument::from_two_graph(&flip_spec(1, 1)),
    },
    Fixture {
        id: "ex4.6-flip-2-2",
        description: "flip two-graph for O_2 x O_2",
        build: || SpecDocument::from_two_graph(&flip_spec(2, 2)),
    },
    Fixture {
        id: "ex4.6-flip-2-3",
        description: "flip two-graph for O_2 x O_3",
        build: || SpecDocument::from_two_graph(&flip_spec(2, 3)),
    },
    Fixture {
        id: "ex4.6-flip-3-3",
        description: "flip two-graph for O_3 x O_3",
        build: || SpecDocument::from_two_graph(&flip_spec(3, 3)),
    },
    Fixture {
        id: "ex4.6-flip-3-5",
        description: "flip two-graph for O_3 x O_5",
        build: || SpecDocument::from_two_graph(&flip_spec(3, 5)),
    },
    Fixture {
        id: "ex4.7-abstract-p2",
        description: "K(A) = (Z, Z), class x2 on K0 and x1 on K1",
        build: || scalar(2, None),
    },
    Fixture {
        id: "ex4.7-abstract-p3",
        description: "K(A) = (Z, Z), class x3 on K0 and x1 on K1",
        build: || scalar(3, None),
    },
    Fixture {
        id: "ex4.7-abstract-p5",
        description: "K(A) = (Z, Z), class x5 on K0 and x1 on K1",
        build: || scalar(5, None),
    },
    Fixture {
        id: "ex4.7-abstract-coprime-2-3",
        description: "K(A) = (Z, Z) with commuting classes x2 and x3 on K0",
        build: || scalar(2, Some(3)),
    },
    Fixture {
        id: "ext-ambiguous-z2-z2",
        description: "K(A) = (Z, Z_2), class x3 on K0: K0 is an extension of Z_2 by Z_2",
        build: || {
            SpecDocument::from_kdata(&AbstractKData::scalar(
                FgAbGroup::free(1),
                FgAbGroup::cyclic(2),
                (3, 1),
                None,
            ))
        },
    },
];

pub fn fixtures() -> &'static [Fixture] {
    FIXTURES
}

pub fn fixture(id: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_documents_round_trip() {
        let mut ids: Vec<&str> = fixtures().iter().map(|f| f.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), fixtures().len());
        for f in fixtures() {
            let d = f.document();
            assert_eq!(SpecDocument::parse(&d.to_json()).unwrap(), d, "{}", f.id);
        }
        assert!(fixture("ex4.6-flip-3-3").is_some());
        assert!(fixture("ex3.5-unitary-chi").is_some());
    }
}
