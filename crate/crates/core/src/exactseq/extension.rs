//! Iso-classes of extensions `0 -> N -> G -> Q -> 0`.
//!
//! Every extension is a pushout of the presentation of `Q`: pick for each
//! torsion generator `e_i` of `Q` (of order `q_i`) the element
//! `c_i = q_i * lift(e_i)` of `N`, well defined modulo `q_i N`. Then
//! `G = (N ⊕ Z^{gens Q}) / <q_i e_i - c_i>`. Running `c` over a full set of
//! representatives of `⊕_i N / q_i N` reaches every extension class, so
//! collecting the resulting `G` up to isomorphism gives the candidate list.
//! Free summands of `Q` always split and contribute nothing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{cokernel, FgAbGroup, GroupHom, IntMatrix, Subquotient};
use crate::error::{Error, Result};

/// Default cap on `|N_tors| * |Q_tors|`.
pub const DEFAULT_EXTENSION_BOUND: u64 = 4096;

/// Hard cap on the number of extension classes walked, independent of the
/// torsion bound (free summands of `N` multiply the count).
const MAX_CLASSES: u128 = 2_000_000;

/// The bound from `CPK_EXT_BOUND`, or [`DEFAULT_EXTENSION_BOUND`].
pub fn default_bound() -> u64 {
    std::env::var("CPK_EXT_BOUND")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_EXTENSION_BOUND)
}

/// One explicit extension `0 -> sub -> middle -> quotient -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub sub: FgAbGroup,
    pub middle: FgAbGroup,
    pub quotient: FgAbGroup,
    pub inclusion: GroupHom,
    pub projection: GroupHom,
    /// `c_i` for each torsion generator of the quotient, in the canonical
    /// coordinates of `sub`. All zero for the split extension.
    #[serde(with = "crate::abelian::serde_int::grid")]
    pub class: Vec<Vec<BigInt>>,
}

impl Extension {
    pub fn is_split_class(&self) -> bool {
        self.class.iter().flatten().all(Zero::is_zero)
    }

    /// The split extension `N ⊕ Q`.
    pub fn split(sub: &FgAbGroup, quotient: &FgAbGroup) -> Self {
        let zero = vec![vec![BigInt::zero(); sub.generator_count()]; quotient.torsion().len()];
        build(sub, quotient, &zero)
    }
}

fn presentation(sub: &FgAbGroup, quotient: &FgAbGroup, class: &[Vec<BigInt>]) -> IntMatrix {
    let a = sub.generator_count();
    let b = quotient.generator_count();
    let free_q = quotient.free_rank();
    let rel_n = sub.relation_matrix();
    let mut rel = IntMatrix::zeros(a + b, rel_n.cols() + class.len());
    for i in 0..a {
        for j in 0..rel_n.cols() {
            rel[(i, j)] = rel_n[(i, j)].clone();
        }
    }
    for (k, (c, q)) in class.iter().zip(quotient.torsion()).enumerate() {
        let col = rel_n.cols() + k;
        for (i, x) in c.iter().enumerate() {
            rel[(i, col)] = -x;
        }
        rel[(a + free_q + k, col)] = q.clone();
    }
    rel
}

fn build(sub: &FgAbGroup, quotient: &FgAbGroup, class: &[Vec<BigInt>]) -> Extension {
    let a = sub.generator_count();
    let b = quotient.generator_count();
    let rel = presentation(sub, quotient, class);
    let g = Subquotient::cokernel_of(&rel);

    let mut into = IntMatrix::zeros(a + b, a);
    for i in 0..a {
        into[(i, i)] = BigInt::from(1);
    }
    let mut onto = IntMatrix::zeros(b, a + b);
    for i in 0..b {
        onto[(i, a + i)] = BigInt::from(1);
    }
    let inclusion = Subquotient::canonical(sub)
        .induced_hom(&into, &g)
        .expect("sub relations are relations of the middle group");
    let projection = g
        .induced_hom(&onto, &Subquotient::canonical(quotient))
        .expect("extension relations map to quotient relations");
    Extension {
        sub: sub.clone(),
        middle: g.group().clone(),
        quotient: quotient.clone(),
        inclusion,
        projection,
        class: class.to_vec(),
    }
}

/// For each torsion generator of `quotient`, the per-coordinate sizes of
/// `N / q_i N`: `q_i` on free generators, `gcd(q_i, n_j)` on torsion ones.
fn class_ranges(sub: &FgAbGroup, quotient: &FgAbGroup) -> Vec<Vec<BigInt>> {
    quotient
        .torsion()
        .iter()
        .map(|q| {
            (0..sub.generator_count())
                .map(|j| match sub.generator_order(j) {
                    None => q.clone(),
                    Some(n) => q.gcd(n),
                })
                .collect()
        })
        .collect()
}

/// One explicit extension per iso-class of middle group, sorted by middle
/// group. The split extension represents its own class.
pub fn extensions(sub: &FgAbGroup, quotient: &FgAbGroup, bound: u64) -> Result<Vec<Extension>> {
    let weight = sub.torsion_order() * quotient.torsion_order();
    if weight > BigInt::from(bound) {
        return Err(Error::Resource(format!(
            "extension search for 0 -> {sub} -> ? -> {quotient} -> 0 needs torsion order \
             {weight}, above the bound {bound}; raise it (CPK_EXT_BOUND or --ext-bound)"
        )));
    }

    let mut seen = if sub.is_free() {
        free_sub_classes(sub, quotient)
    } else {
        walk_classes(sub, quotient)?
    };
    seen.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(seen
        .iter()
        .map(|(_, class)| build(sub, quotient, class))
        .collect())
}

type Found = Vec<(FgAbGroup, Vec<Vec<BigInt>>)>;

/// Every class in `⊕_i N / q_i N`, one representative per middle group.
fn walk_classes(sub: &FgAbGroup, quotient: &FgAbGroup) -> Result<Found> {
    let ranges = class_ranges(sub, quotient);
    let flat: Vec<u64> = ranges
        .iter()
        .flatten()
        .map(|r| r.to_u64().unwrap_or(u64::MAX))
        .collect();
    let count = flat
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
        .unwrap_or(u128::MAX);
    if count > MAX_CLASSES {
        return Err(Error::Resource(format!(
            "extension search for 0 -> {sub} -> ? -> {quotient} -> 0 would walk {count} classes"
        )));
    }

    let width = sub.generator_count();
    let mut seen: Vec<(FgAbGroup, Vec<Vec<BigInt>>)> = Vec::new();
    let mut digits = vec![0u64; flat.len()];
    loop {
        let class: Vec<Vec<BigInt>> = (0..ranges.len())
            .map(|i| {
                digits[i * width..(i + 1) * width]
                    .iter()
                    .map(|&d| BigInt::from(d))
                    .collect()
            })
            .collect();
        let middle = cokernel(&presentation(sub, quotient, &class));
        if !seen.iter().any(|(g, _)| *g == middle) {
            seen.push((middle, class));
        }

        // odometer over the class coordinates
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < flat[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
    }

    Ok(seen)
}

/// All elements of the torsion part of `q`, in canonical torsion coordinates.
fn torsion_elements(q: &FgAbGroup) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for d in q.torsion() {
        let d = d.to_u64().expect("torsion order is below the search bound");
        out = out
            .into_iter()
            .flat_map(|e| {
                (0..d).map(move |x| {
                    let mut e = e.clone();
                    e.push(BigInt::from(x));
                    e
                })
            })
            .collect();
    }
    out
}

/// `N = Z^r` free. Writing the class as an `r x t` matrix `C`, the middle
/// group is `Z^r ⊕ Q_free ⊕ Q_tors / <rows of C>`, so the candidates are the
/// quotients of `Q_tors` by subgroups with at most `r` generators. Those are
/// reached one cyclic quotient at a time, and the next step depends only
/// on the iso-type reached so far, which keeps the walk small even when
/// `⊕ N / q_i N` is huge.
fn free_sub_classes(sub: &FgAbGroup, quotient: &FgAbGroup) -> Found {
    let r = sub.free_rank();
    let t = quotient.torsion().len();
    let class_of = |rows: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..t)
            .map(|i| {
                (0..r)
                    .map(|j| rows.get(j).map_or_else(BigInt::zero, |h| h[i].clone()))
                    .collect()
            })
            .collect()
    };
    let elements = torsion_elements(quotient);
    let split = class_of(&[]);
    let mut states: Vec<(FgAbGroup, Vec<Vec<BigInt>>)> =
        vec![(cokernel(&presentation(sub, quotient, &split)), Vec::new())];
    // any subgroup of Q_tors needs at most t generators
    for _ in 0..r.min(t) {
        let mut next = states.clone();
        for (_, rows) in &states {
            for h in &elements {
                let mut more = rows.clone();
                more.push(h.clone());
                let middle = cokernel(&presentation(sub, quotient, &class_of(&more)));
                if !next.iter().any(|(g, _)| *g == middle) {
                    next.push((middle, more));
                }
            }
        }
        if next.len() == states.len() {
            break;
        }
        states = next;
    }
    states
        .into_iter()
        .map(|(g, rows)| (g, class_of(&rows)))
        .collect()
}

pub fn extension_candidates_with_bound(
    sub: &FgAbGroup,
    quotient: &FgAbGroup,
    bound: u64,
) -> Result<Vec<FgAbGroup>> {
    Ok(extensions(sub, quotient, bound)?
        .into_iter()
        .map(|e| e.middle)
        .collect())
}

/// Every `G` (up to isomorphism) with a subgroup `≅ sub` and quotient
/// `≅ quotient`, using [`default_bound`].
pub fn extension_candidates(sub: &FgAbGroup, quotient: &FgAbGroup) -> Result<Vec<FgAbGroup>> {
    extension_candidates_with_bound(sub, quotient, default_bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::hom_well_defined;

    fn g(rank: usize, torsion: &[i64]) -> FgAbGroup {
        FgAbGroup::new(rank, torsion.iter().copied())
    }

    #[test]
    fn two_by_two_is_ambiguous() {
        let c = extension_candidates_with_bound(&g(0, &[2]), &g(0, &[2]), 4096).unwrap();
        assert_eq!(c, vec![g(0, &[2, 2]), g(0, &[4])]);
    }

    #[test]
    fn trivial_sub_gives_the_quotient() {
        let q = g(1, &[2, 6]);
        assert_eq!(
            extension_candidates_with_bound(&g(0, &[]), &q, 4096).unwrap(),
            vec![q]
        );
    }

    #[test]
    fn free_quotient_splits() {
        let c = extension_candidates_with_bound(&g(0, &[3]), &g(1, &[]), 4096).unwrap();
        assert_eq!(c, vec![g(1, &[3])]);
    }

    #[test]
    fn free_sub_absorbs_torsion() {
        // 0 -> Z -> G -> Z_2 -> 0: Z (via ×2) or Z ⊕ Z_2
        let c = extension_candidates_with_bound(&g(1, &[]), &g(0, &[2]), 4096).unwrap();
        assert_eq!(c, vec![g(1, &[]), g(1, &[2])]);
    }

    #[test]
    fn free_sub_shortcut_matches_the_full_walk() {
        let subs = [g(1, &[]), g(2, &[]), g(3, &[])];
        let quotients = [
            g(0, &[2, 2]),
            g(0, &[2, 4]),
            g(1, &[2, 2, 2]),
            g(0, &[3, 9]),
            g(0, &[2, 6]),
            g(0, &[4, 4]),
        ];
        for n in &subs {
            for q in &quotients {
                let mut fast: Vec<FgAbGroup> = free_sub_classes(n, q).into_iter().map(|x| x.0).collect();
                let mut slow: Vec<FgAbGroup> =
                    walk_classes(n, q).unwrap().into_iter().map(|x| x.0).collect();
                fast.sort();
                slow.sort();
                assert_eq!(fast, slow, "{n} by {q}");
            }
        }
    }

    #[test]
    fn free_sub_with_large_class_space() {
        // 2^35 classes, but only the quotients of Z_2^7 by at most 5 elements
        let mut c = extension_candidates_with_bound(&g(5, &[]), &g(0, &[2; 7]), 4096).unwrap();
        c.sort();
        let mut expected: Vec<FgAbGroup> = (2..=7).map(|k| g(5, &vec![2; k])).collect();
        expected.sort();
        assert_eq!(c, expected);
    }

    #[test]
    fn bound_is_enforced() {
        let err = extensions(&g(0, &[64]), &g(0, &[128]), 4096).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(extensions(&g(0, &[64]), &g(0, &[128]), 8192).is_ok());
    }

    #[test]
    fn certificates_are_short_exact() {
        for e in extensions(&g(1, &[2]), &g(0, &[2, 4]), 4096).unwrap() {
            assert!(hom_well_defined(&e.inclusion).unwrap());
            assert!(hom_well_defined(&e.projection).unwrap());
            let seq = crate::exactseq::ExactSequence::known(vec![
                GroupHom::zero(&FgAbGroup::trivial(), &e.sub),
                e.inclusion.clone(),
                e.projection.clone(),
                GroupHom::zero(&e.quotient, &FgAbGroup::trivial()),
            ])
            .unwrap();
            assert!(crate::exactseq::is_exact(&seq).unwrap(), "{e:?}");
        }
    }
}
