//! Extension candidates against brute force over finite groups, plus
//! properties of the six-term solver.

use std::collections::{BTreeSet, HashSet, VecDeque};

use cpk_core::abelian::{FgAbGroup, GroupHom, IntMatrix};
use cpk_core::exactseq::{
    extension_candidates_with_bound, is_exact, realize, solve_six_term_with, ExactSequence,
    SolveOptions, SolveOutcome, SolveStatus,
};
use num_traits::ToPrimitive;
use proptest::prelude::*;

// ---- finite abelian groups as plain tuples -------------------------------

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(k: u32, max: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=k.min(max)).rev() {
        for mut rest in partitions(k - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All abelian groups of order `n`, as lists of cyclic orders.
fn groups_of_order(n: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    for (p, k) in factorize(n) {
        let mut next = Vec::new();
        for g in &out {
            for part in partitions(k, k) {
                let mut h = g.clone();
                h.extend(part.iter().map(|&e| p.pow(e)));
                next.push(h);
            }
        }
        out = next;
    }
    out
}

/// Invariant factors of a product of cyclic groups of prime-power order.
fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
    for &q in orders {
        if q == 1 {
            continue;
        }
        let p = factorize(q)[0].0;
        match by_prime.iter_mut().find(|(r, _)| *r == p) {
            Some((_, v)) => v.push(q),
            None => by_prime.push((p, vec![q])),
        }
    }
    let len = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (_, v) in &mut by_prime {
        v.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in v.iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out
}

struct Finite {
    orders: Vec<u64>,
}

impl Finite {
    fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in &self.orders {
            out = out
                .into_iter()
                .flat_map(|e| {
                    (0..d).map(move |x| {
                        let mut e = e.clone();
                        e.push(x);
                        e
                    })
                })
                .collect();
        }
        out
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    fn times(&self, k: u64, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.orders).map(|(x, d)| (k * x) % d).collect()
    }

    fn span(&self, gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
        let zero = vec![0; self.orders.len()];
        let mut seen = HashSet::from([zero.clone()]);
        let mut queue = VecDeque::from([zero]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// `#{x : kx = 0}` for every `k` dividing `m`.
    fn torsion_counts(&self, m: u64) -> Vec<usize> {
        let els = self.elements();
        (1..=m)
            .filter(|k| m.is_multiple_of(*k))
            .map(|k| els.iter().filter(|x| self.times(k, x).iter().all(|&c| c == 0)).count())
            .collect()
    }
}

/// Does `g` contain a copy `H` of `n` with `g / H ≅ q`?
fn realizable(g: &Finite, n: &Finite, q: &Finite) -> bool {
    let els = g.elements();
    let m = g.size();
    let target = q.torsion_counts(m);
    let choices: Vec<Vec<&Vec<u64>>> = n
        .orders
        .iter()
        .map(|&d| els.iter().filter(|x| g.times(d, x).iter().all(|&c| c == 0)).collect())
        .collect();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let gens: Vec<Vec<u64>> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        let h = g.span(&gens);
        if h.len() as u64 == n.size() {
            let counts: Vec<usize> = (1..=m)
                .filter(|k| m.is_multiple_of(*k))
                .map(|k| els.iter().filter(|x| h.contains(&g.times(k, x))).count() / h.len())
                .collect();
            if counts == target {
                return true;
            }
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return false;
        }
    }
}

fn to_group(orders: &[u64]) -> FgAbGroup {
    FgAbGroup::new(0, invariant_factors(orders))
}

fn canonical_orders(g: &FgAbGroup) -> Vec<u64> {
    g.torsion().iter().map(|d| d.to_u64().unwrap()).collect()
}

#[test]
fn candidates_match_brute_force_on_finite_groups() {
    let mut checked = 0;
    for n_order in 1..=16u64 {
        for q_order in 1..=16u64 {
            if n_order * q_order > 32 {
                continue;
            }
            for n_orders in groups_of_order(n_order) {
                if n_orders.len() > 3 {
                    continue;
                }
                for q_orders in groups_of_order(q_order) {
                    let n = Finite { orders: n_orders.clone() };
                    let q = Finite { orders: q_orders.clone() };
                    let expected: BTreeSet<Vec<u64>> = groups_of_order(n_order * q_order)
                        .into_iter()
                        .filter(|g| realizable(&Finite { orders: g.clone() }, &n, &q))
                        .map(|g| invariant_factors(&g))
                        .collect();
                    let got: BTreeSet<Vec<u64>> = extension_candidates_with_bound(
                        &to_group(&n_orders),
                        &to_group(&q_orders),
                        4096,
                    )
                    .unwrap()
                    .iter()
                    .map(canonical_orders)
                    .collect();
                    assert_eq!(got, expected, "N = {n_orders:?}, Q = {q_orders:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn order_four_enumeration() {
    let got = extension_candidates_with_bound(&FgAbGroup::cyclic(2), &FgAbGroup::cyclic(2), 4096)
        .unwrap();
    let set: BTreeSet<_> = got.into_iter().collect();
    let expected: BTreeSet<_> = [FgAbGroup::cyclic(4), FgAbGroup::new(0, [2, 2])].into();
    assert_eq!(set, expected);
}

// ---- six-term properties -------------------------------------------------

fn arb_group() -> impl Strategy<Value = FgAbGroup> {
    (0usize..=2, prop::collection::vec(2i64..=6, 0..=2))
        .prop_map(|(r, t)| FgAbGroup::new(r, t))
}

/// A well-defined hom: entries into torsion rows are scaled so that the
/// domain relations land in the codomain relations, and torsion columns
/// have no free component.
fn arb_hom(dom: FgAbGroup, cod: FgAbGroup) -> impl Strategy<Value = GroupHom> {
    let (m, n) = (cod.generator_count(), dom.generator_count());
    prop::collection::vec(-3i64..=3, m * n).prop_map(move |raw| {
        let mut mat = IntMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let x = num_bigint::BigInt::from(raw[i * n + j]);
                mat[(i, j)] = match (cod.generator_order(i), dom.generator_order(j)) {
                    (_, None) => x,
                    (None, Some(_)) => num_bigint::BigInt::from(0),
                    (Some(e), Some(d)) => {
                        let g = num_integer::Integer::gcd(d, e);
                        x * (e / g)
                    }
                };
            }
        }
        GroupHom::new(dom.clone(), cod.clone(), mat).unwrap()
    })
}

fn arb_six_term() -> impl Strategy<Value = ExactSequence> {
    (arb_group(), arb_group(), arb_group(), arb_group())
        .prop_flat_map(|(a, b, c, d)| (arb_hom(a, b), arb_hom(c, d)))
        .prop_map(|(f0, f3)| ExactSequence::six_term(f0, f3).unwrap())
}

fn solve(seq: &ExactSequence) -> SolveOutcome {
    let opts = SolveOptions {
        assume_split: false,
        bound: 1 << 20,
    };
    solve_six_term_with(seq, opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_extension_is_always_a_candidate(n in arb_group(), q in arb_group()) {
        let c = extension_candidates_with_bound(&n, &q, 1 << 20).unwrap();
        prop_assert!(c.contains(&n.direct_sum(&q)));
        let ranks: BTreeSet<usize> = c.iter().map(FgAbGroup::free_rank).collect();
        prop_assert_eq!(ranks.into_iter().collect::<Vec<_>>(), vec![n.free_rank() + q.free_rank()]);
    }

    #[test]
    fn coprime_cyclic_groups_extend_uniquely(a in 1i64..40, b in 1i64..40) {
        prop_assume!(num_integer::Integer::gcd(&a, &b) == 1);
        let c = extension_candidates_with_bound(&FgAbGroup::cyclic(a), &FgAbGroup::cyclic(b), 4096)
            .unwrap();
        prop_assert_eq!(c, vec![FgAbGroup::cyclic(a * b)]);
    }

    #[test]
    fn solutions_realize_to_exact_sequences(seq in arb_six_term()) {
        let out = solve(&seq);
        prop_assert_ne!(out.status, SolveStatus::Underdetermined);
        let (a, b) = (out.nodes[0].candidates.len(), out.nodes[1].candidates.len());
        for i in 0..a {
            for j in 0..b {
                let filled = realize(&seq, &out, &[i, j]).unwrap();
                prop_assert!(is_exact(&filled).unwrap());
            }
        }
    }

    #[test]
    fn rotating_by_three_swaps_the_unknowns(seq in arb_six_term()) {
        let out = solve(&seq);
        let rotated = solve(&seq.rotate(3));
        prop_assert_eq!(out.status, rotated.status);
        prop_assert_eq!(&out.node(2).unwrap().candidates, &rotated.node(5).unwrap().candidates);
        prop_assert_eq!(&out.node(5).unwrap().candidates, &rotated.node(2).unwrap().candidates);
    }
}
