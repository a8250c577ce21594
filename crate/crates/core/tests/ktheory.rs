//! The Pimsner pipeline against independent answers: the Künneth formula
//! for flips, determinants for single graphs, and the order symmetry of
//! the two-stage computation.

use cpk_core::abelian::{FgAbGroup, IntMatrix};
use cpk_core::exactseq::{SolveOptions, SolveStatus};
use cpk_core::ktheory::{
    cuntz_pimsner_ktheory, diagram_report, iterated_report, kunneth_flip_oracle,
    pimsner_class_maps,
};
use cpk_core::model::{
    commuting_permutations_spec, flip_spec, BimoduleModel, Edge, FiniteGraph, Layer,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

fn opts() -> SolveOptions {
    SolveOptions {
        assume_split: false,
        bound: 1 << 16,
    }
}

#[test]
fn flip_family_matches_kunneth() {
    for m in 2..=6u64 {
        for n in 2..=6u64 {
            let model = BimoduleModel::TwoGraph(flip_spec(m as usize, n as usize));
            let r = iterated_report(&model, opts()).unwrap();
            let want = kunneth_flip_oracle(m, n);
            assert_eq!(r.result.groups(), want.groups(), "m = {m}, n = {n}");
            assert_eq!(r.forward.groups(), r.reverse.groups());
        }
    }
}

#[test]
fn flip_diagrams_are_exact() {
    for (m, n) in [(2, 2), (2, 5), (3, 3), (3, 5), (4, 4), (5, 3)] {
        let d = diagram_report(&flip_spec(m, n), opts()).unwrap();
        assert!(d.all_exact(), "m = {m}, n = {n}: {:?}", d.issues);
        // K1(I+J) = 0 and K0(I+J) has rank one for flips
        let (k0, k1) = d.sum_ideal.groups().unwrap();
        assert_eq!(k0.free_rank(), 1);
        assert!(k1.is_trivial());
    }
}

fn graph_pair(g: FiniteGraph) -> (FgAbGroup, FgAbGroup) {
    let p = pimsner_class_maps(&BimoduleModel::Graph(g), Layer::First).unwrap();
    let k = cuntz_pimsner_ktheory(&p, opts()).unwrap();
    let (a, b) = k.groups().expect("graph algebras are determined");
    (a.clone(), b.clone())
}

#[test]
fn roses() {
    assert_eq!(graph_pair(FiniteGraph::rose(1)), (FgAbGroup::free(1), FgAbGroup::free(1)));
    for n in 2..=12 {
        assert_eq!(
            graph_pair(FiniteGraph::rose(n)),
            (FgAbGroup::cyclic(n as i64 - 1), FgAbGroup::trivial())
        );
    }
}

/// Graph from a vertex matrix with every row and column sum positive.
fn graph_from(m: &[Vec<u8>]) -> FiniteGraph {
    let n = m.len();
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            for k in 0..c {
                edges.push(Edge::new(format!("e{i}_{j}_{k}"), vertices[i].clone(), vertices[j].clone()));
            }
        }
    }
    FiniteGraph::new(vertices, edges)
}

fn det(m: &[Vec<i64>]) -> BigInt {
    let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64(&rows).determinant()
}

fn arb_essential_matrix() -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1usize..=4)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u8..=3, n), n))
        .prop_filter("no sinks or sources", |m| {
            let n = m.len();
            (0..n).all(|i| m[i].iter().any(|&c| c > 0)) && (0..n).all(|j| m.iter().any(|r| r[j] > 0))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Free ranks of K0 and K1 agree (rank-nullity of the square 1 - M^t),
    /// and when `det(1 - M^t) != 0` the group K0 is finite of that order.
    #[test]
    fn single_graph_invariants(m in arb_essential_matrix()) {
        let (k0, k1) = graph_pair(graph_from(&m));
        prop_assert_eq!(k0.free_rank(), k1.free_rank());
        prop_assert!(k1.is_free());
        let n = m.len();
        let one_minus: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j) - i64::from(m[j][i])).collect())
            .collect();
        let d = det(&one_minus);
        if d.is_zero() {
            prop_assert!(k0.free_rank() > 0);
        } else {
            prop_assert_eq!(k0.free_rank(), 0);
            prop_assert_eq!(k0.torsion_order(), d.abs());
        }
    }
}

/// All permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn commutes(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| a[b[i]] == b[a[i]])
}

/// Layer 1 is random; layer 2 is drawn from the centralizer of layer 1.
fn random_spec(rng: &mut StdRng) -> (usize, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = rng.random_range(1..=5);
    let all = permutations(n);
    let k = rng.random_range(1..=3);
    let layer1: Vec<Vec<usize>> = (0..k).map(|_| all.choose(rng).unwrap().clone()).collect();
    let centralizer: Vec<&Vec<usize>> = all
        .iter()
        .filter(|p| layer1.iter().all(|s| commutes(s, p)))
        .collect();
    let l = rng.random_range(1..=3);
    let layer2: Vec<Vec<usize>> = (0..l).map(|_| (*centralizer.choose(rng).unwrap()).clone()).collect();
    (n, layer1, layer2)
}

#[test]
fn orders_agree_on_random_permutation_layers() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut determined = 0;
    for _ in 0..100 {
        let (n, l1, l2) = random_spec(&mut rng);
        let spec = commuting_permutations_spec(n, &l1, &l2).unwrap();
        let r = iterated_report(&BimoduleModel::TwoGraph(spec.clone()), opts())
            .unwrap_or_else(|e| panic!("{l1:?} / {l2:?}: {e}"));
        for d in 0..2 {
            let (f, b) = (r.forward.degree(d), r.reverse.degree(d));
            if let (Some(x), Some(y)) = (f.group(), b.group()) {
                assert_eq!(x, y, "{l1:?} / {l2:?}");
            }
        }
        if r.result.status() == SolveStatus::Determined {
            determined += 1;
            let d = diagram_report(&spec, opts()).unwrap();
            assert!(d.all_exact(), "{l1:?} / {l2:?}: {:?}", d.issues);
        }
    }
    assert!(determined > 50);
}

#[test]
fn commuting_cycles_give_a_torus() {
    // a 2-cycle and a 3-cycle acting on Z_2 x Z_3
    let two: Vec<usize> = (0..6).map(|v| (v + 3) % 6).collect();
    let three: Vec<usize> = (0..6).map(|v| v / 3 * 3 + (v % 3 + 1) % 3).collect();
    for (a, b) in [(vec![1, 0], vec![1, 0]), (two, three)] {
        let spec = commuting_permutations_spec(a.len(), &[a], &[b]).unwrap();
        let r = iterated_report(&BimoduleModel::TwoGraph(spec.clone()), opts()).unwrap();
        assert_eq!(
            r.result.groups().unwrap(),
            (&FgAbGroup::free(2), &FgAbGroup::free(2))
        );
        assert!(diagram_report(&spec, opts()).unwrap().all_exact());
    }
}
