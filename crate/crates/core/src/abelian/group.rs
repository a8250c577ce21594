use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::serde_int;
use super::snf::smith_normal_form;
use super::subquotient::lattice_contains;
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^r ⊕ Z_{d_1} ⊕ ... ⊕ Z_{d_t}` with
/// `2 <= d_1 | d_2 | ... | d_t`. The representation is canonical, so
/// structural equality is isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "RawGroup", into = "RawGroup")]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawGroup {
    rank: usize,
    #[serde(with = "serde_int::vec", default)]
    torsion: Vec<BigInt>,
}

impl From<RawGroup> for FgAbGroup {
    fn from(raw: RawGroup) -> Self {
        FgAbGroup::new(raw.rank, raw.torsion)
    }
}

impl From<FgAbGroup> for RawGroup {
    fn from(g: FgAbGroup) -> Self {
        RawGroup {
            rank: g.free_rank,
            torsion: g.torsion,
        }
    }
}

impl FgAbGroup {
    /// `Z^free_rank ⊕ ⊕_i Z/orders[i]`, normalised: an order of 0 adds a free
    /// summand, orders of ±1 vanish, and the rest are recombined into
    /// invariant factors.
    pub fn new<I, T>(free_rank: usize, orders: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut rank = free_rank;
        let mut finite = Vec::new();
        for d in orders {
            let d: BigInt = d.into();
            if d.is_zero() {
                rank += 1;
            } else if !d.abs().is_one() {
                finite.push(d.abs());
            }
        }
        let already_canonical = finite
            .windows(2)
            .all(|w| w[1].is_multiple_of(&w[0]));
        let torsion = if already_canonical {
            finite
        } else {
            let n = finite.len();
            let snf = smith_normal_form(&IntMatrix::diagonal(n, n, &finite));
            snf.invariant_factors()
                .into_iter()
                .filter(|d| !d.is_one())
                .collect()
        };
        FgAbGroup {
            free_rank: rank,
            torsion,
        }
    }

    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z/n`; `cyclic(0)` is `Z` and `cyclic(1)` is trivial.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::new(0, [n.into()])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Number of canonical generators (free first, then torsion).
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Order of canonical generator `i`, `None` for free generators.
    pub fn generator_order(&self, i: usize) -> Option<&BigInt> {
        i.checked_sub(self.free_rank).map(|k| &self.torsion[k])
    }

    /// Relations as columns: `d_k` times the `k`-th torsion generator.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.generator_count();
        let mut m = IntMatrix::zeros(n, self.torsion.len());
        for (k, d) in self.torsion.iter().enumerate() {
            m[(self.free_rank + k, k)] = d.clone();
        }
        m
    }

    /// Canonical representative of a coordinate vector: torsion coordinates
    /// reduced into `0..d`.
    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.generator_count(), "coordinate length");
        coords
            .iter()
            .enumerate()
            .map(|(i, x)| match self.generator_order(i) {
                Some(d) => x.mod_floor(d),
                None => x.clone(),
            })
            .collect()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        FgAbGroup::new(
            self.free_rank + other.free_rank,
            self.torsion.iter().chain(&other.torsion).cloned(),
        )
    }

    /// Canonical form is a fixed point of normalisation.
    pub fn normalized(&self) -> FgAbGroup {
        FgAbGroup::new(self.free_rank, self.torsion.clone())
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z_{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A homomorphism between canonical groups, given by its action on the
/// canonical generators: column `j` holds the image of generator `j`.
/// Rows belonging to torsion generators of the codomain are stored reduced.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHom", into = "RawHom")]
pub struct GroupHom {
    dom: FgAbGroup,
    cod: FgAbGroup,
    matrix: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawHom {
    dom: FgAbGroup,
    cod: FgAbGroup,
    #[serde(with = "serde_int::matrix")]
    matrix: IntMatrix,
}

impl TryFrom<RawHom> for GroupHom {
    type Error = Error;
    fn try_from(raw: RawHom) -> Result<Self> {
        GroupHom::new(raw.dom, raw.cod, raw.matrix)
    }
}

impl From<GroupHom> for RawHom {
    fn from(h: GroupHom) -> Self {
        RawHom {
            dom: h.dom,
            cod: h.cod,
            matrix: h.matrix,
        }
    }
}

impl GroupHom {
    /// Checks shapes only; see [`hom_well_defined`] for relations.
    pub fn new(dom: FgAbGroup, cod: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != cod.generator_count() || matrix.cols() != dom.generator_count() {
            return Err(Error::Malformed(format!(
                "hom matrix is {}x{} but {} -> {} needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                dom,
                cod,
                cod.generator_count(),
                dom.generator_count()
            )));
        }
        let mut matrix = matrix;
        for i in 0..cod.generator_count() {
            if let Some(d) = cod.generator_order(i) {
                for j in 0..matrix.cols() {
                    let r = matrix[(i, j)].mod_floor(d);
                    matrix[(i, j)] = r;
                }
            }
        }
        Ok(GroupHom { dom, cod, matrix })
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        GroupHom::new(g.clone(), g.clone(), IntMatrix::identity(g.generator_count()))
            .expect("square identity")
    }

    pub fn zero(dom: &FgAbGroup, cod: &FgAbGroup) -> Self {
        GroupHom::new(
            dom.clone(),
            cod.clone(),
            IntMatrix::zeros(cod.generator_count(), dom.generator_count()),
        )
        .expect("zero shape")
    }

    /// Multiplication by `k` on `g`.
    pub fn scalar(g: &FgAbGroup, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let n = g.generator_count();
        GroupHom::new(
            g.clone(),
            g.clone(),
            IntMatrix::diagonal(n, n, &vec![k; n]),
        )
        .expect("square scalar")
    }

    pub fn dom(&self) -> &FgAbGroup {
        &self.dom
    }

    pub fn cod(&self) -> &FgAbGroup {
        &self.cod
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_endomorphism(&self) -> bool {
        self.dom == self.cod
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.cod.reduce(&self.matrix.mul_vec(x))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        if self.cod != next.dom {
            return Err(Error::Malformed(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.dom, self.cod, next.dom, next.cod
            )));
        }
        GroupHom::new(
            self.dom.clone(),
            next.cod.clone(),
            next.matrix.checked_mul(&self.matrix)?,
        )
    }

    /// `1 - self` for an endomorphism.
    pub fn one_minus(&self) -> Result<GroupHom> {
        if !self.is_endomorphism() {
            return Err(Error::Malformed(format!(
                "1 - f needs an endomorphism, got {} -> {}",
                self.dom, self.cod
            )));
        }
        GroupHom::new(self.dom.clone(), self.cod.clone(), self.matrix.one_minus())
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({} -> {}, {:?})", self.dom, self.cod, self.matrix)
    }
}

/// True iff every relation of the domain lands in the relation lattice of
/// the codomain, tested by lattice membership through Smith normal form.
pub fn hom_well_defined(f: &GroupHom) -> Result<bool> {
    let (dom, cod, m) = (&f.dom, &f.cod, &f.matrix);
    if m.rows() != cod.generator_count() || m.cols() != dom.generator_count() {
        return Err(Error::Malformed("hom matrix shape does not match groups".into()));
    }
    let relations = cod.relation_matrix();
    for (k, d) in dom.torsion().iter().enumerate() {
        let j = dom.free_rank() + k;
        let image: Vec<BigInt> = m.column(j).into_iter().map(|x| x * d).collect();
        if !lattice_contains(&relations, &image) {
            return Ok(false);
        }
    }
    Ok(true)
}
