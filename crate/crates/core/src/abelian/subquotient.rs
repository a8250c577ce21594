//! Groups presented as `L / R` for lattices `R ⊆ L ⊆ Z^n`.
//!
//! A [`Subquotient`] remembers how its canonical generators lift to the
//! ambient `Z^n` and how to read canonical coordinates off an ambient
//! vector. That is what lets an integer matrix on `Z^n` descend to a
//! [`GroupHom`] between presented groups, e.g. a second bimodule acting on
//! `coker(1 - M_1^t)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::group::{FgAbGroup, GroupHom};
use super::matrix::IntMatrix;
use super::snf::{smith_column_transform, smith_invariants, smith_normal_form, solve, solve_with, SnfResult};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Subquotient {
    ambient: usize,
    /// Columns form a Z-basis of the numerator lattice.
    basis: IntMatrix,
    basis_snf: SnfResult,
    /// Generators of the relation lattice, as ambient columns.
    relations: IntMatrix,
    /// Basis coordinates -> canonical coordinates (before reduction).
    to_canonical: IntMatrix,
    /// Canonical generators lifted to the ambient lattice.
    lifts: IntMatrix,
    group: FgAbGroup,
}

impl Subquotient {
    /// `span(numerator) / span(relations)`; fails if a relation is not in
    /// the numerator lattice.
    pub fn new(numerator: &IntMatrix, relations: &IntMatrix) -> Result<Self> {
        let ambient = numerator.rows();
        if relations.rows() != ambient {
            return Err(Error::Malformed(format!(
                "relations live in Z^{} but the numerator in Z^{ambient}",
                relations.rows()
            )));
        }
        let num_snf = smith_normal_form(numerator);
        let l = num_snf.rank;
        let cols: Vec<usize> = (0..l).collect();
        let basis = numerator.checked_mul(&num_snf.v.select_columns(&cols))?;
        let basis_snf = smith_normal_form(&basis);

        let mut rel_coords = Vec::with_capacity(relations.cols());
        for (j, r) in relations.columns().into_iter().enumerate() {
            match solve_with(&basis_snf, &r) {
                Some(c) => rel_coords.push(c),
                None => {
                    return Err(Error::Precondition(format!(
                        "relation column {j} is not in the numerator lattice"
                    )))
                }
            }
        }
        let rel_matrix = IntMatrix::from_columns(l, &rel_coords);
        let rel_snf = smith_normal_form(&rel_matrix);
        let diag = rel_snf.diagonal();
        let factor = |i: usize| diag.get(i).cloned().unwrap_or_else(BigInt::zero);

        let free: Vec<usize> = (0..l).filter(|&i| factor(i).is_zero()).collect();
        let torsion: Vec<usize> = (0..l)
            .filter(|&i| {
                let d = factor(i);
                !d.is_zero() && !d.is_one()
            })
            .collect();
        let order: Vec<usize> = free.iter().chain(&torsion).copied().collect();

        let to_canonical = rel_snf.u.select_rows(&order);
        let lifts = basis.checked_mul(&rel_snf.u_inv.select_columns(&order))?;
        let group = FgAbGroup::new(free.len(), torsion.iter().map(|&i| factor(i)));
        debug_assert_eq!(group.generator_count(), order.len());

        Ok(Subquotient {
            ambient,
            basis,
            basis_snf,
            relations: relations.clone(),
            to_canonical,
            lifts,
            group,
        })
    }

    /// A canonical group presented on its own generators, with identity
    /// lifts and coordinates.
    pub fn canonical(group: &FgAbGroup) -> Self {
        let n = group.generator_count();
        let id = IntMatrix::identity(n);
        Subquotient {
            ambient: n,
            basis_snf: smith_normal_form(&id),
            basis: id.clone(),
            relations: group.relation_matrix(),
            to_canonical: id.clone(),
            lifts: id,
            group: group.clone(),
        }
    }

    /// `Z^rows / im(m)`.
    pub fn cokernel_of(m: &IntMatrix) -> Self {
        Self::new(&IntMatrix::identity(m.rows()), m).expect("image lies in the ambient lattice")
    }

    /// `ker(m) ⊆ Z^cols` with no relations.
    pub fn kernel_of(m: &IntMatrix) -> Self {
        let k = kernel_basis(m);
        Self::new(&k, &IntMatrix::zeros(m.cols(), 0)).expect("empty relations")
    }

    /// `coker(f)` presented on the codomain's generators.
    pub fn cokernel_of_hom(f: &GroupHom) -> Self {
        let rel = f.matrix().hstack(&f.cod().relation_matrix());
        Self::new(&IntMatrix::identity(f.cod().generator_count()), &rel)
            .expect("image lies in the ambient lattice")
    }

    /// `ker(f)` presented on the domain's generators: vectors `x` with
    /// `f(x)` a relation of the codomain, modulo relations of the domain.
    pub fn kernel_of_hom(f: &GroupHom) -> Self {
        let n = f.dom().generator_count();
        let stacked = f.matrix().hstack(&f.cod().relation_matrix());
        let k = kernel_basis(&stacked);
        let top: Vec<usize> = (0..n).collect();
        let preimage = k.select_rows(&top);
        Self::new(&preimage, &f.dom().relation_matrix())
            .expect("domain relations map to codomain relations for a well-defined hom")
    }

    pub fn direct_sum(&self, other: &Subquotient) -> Self {
        Self::new(
            &IntMatrix::block_diagonal(&self.basis, &other.basis),
            &IntMatrix::block_diagonal(&self.relations, &other.relations),
        )
        .expect("blockwise relations stay inside the numerator")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn lifts(&self) -> &IntMatrix {
        &self.lifts
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn numerator_basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Canonical (reduced) coordinates of an ambient vector, or `None` if it
    /// is outside the numerator lattice.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient {
            return None;
        }
        let c = solve_with(&self.basis_snf, v)?;
        Some(self.group.reduce(&self.to_canonical.mul_vec(&c)))
    }

    /// The homomorphism induced by an ambient matrix `b: Z^n -> Z^m`. Fails
    /// unless `b` maps the numerator into the target numerator and the
    /// relations into the target relations.
    pub fn induced_hom(&self, b: &IntMatrix, target: &Subquotient) -> Result<GroupHom> {
        if b.rows() != target.ambient || b.cols() != self.ambient {
            return Err(Error::Malformed(format!(
                "ambient map is {}x{}, expected {}x{}",
                b.rows(),
                b.cols(),
                target.ambient,
                self.ambient
            )));
        }
        for (j, r) in self.relations.columns().iter().enumerate() {
            match target.coords(&b.mul_vec(r)) {
                Some(c) if c.iter().all(Zero::is_zero) => {}
                _ => {
                    return Err(Error::Precondition(format!(
                        "map sends relation {j} outside the target relations"
                    )))
                }
            }
        }
        let mut cols = Vec::with_capacity(self.lifts.cols());
        for (j, lift) in self.lifts.columns().iter().enumerate() {
            match target.coords(&b.mul_vec(lift)) {
                Some(c) => cols.push(c),
                None => {
                    return Err(Error::Precondition(format!(
                        "image of generator {j} leaves the target lattice"
                    )))
                }
            }
        }
        GroupHom::new(
            self.group.clone(),
            target.group.clone(),
            IntMatrix::from_columns(target.group.generator_count(), &cols),
        )
    }

    /// The map from the ambient group (with the given canonical structure)
    /// onto this quotient; only meaningful when the numerator is everything.
    pub fn projection_from(&self, ambient_group: &FgAbGroup) -> Result<GroupHom> {
        Subquotient::canonical(ambient_group)
            .induced_hom(&IntMatrix::identity(self.ambient), self)
    }

    /// The inclusion of this subgroup into the ambient group.
    pub fn inclusion_into(&self, ambient_group: &FgAbGroup) -> Result<GroupHom> {
        self.induced_hom(
            &IntMatrix::identity(self.ambient),
            &Subquotient::canonical(ambient_group),
        )
    }
}

/// Whether `v` lies in the lattice spanned by the columns of `gens`.
pub fn lattice_contains(gens: &IntMatrix, v: &[BigInt]) -> bool {
    solve(gens, v).is_some()
}

/// `Z^rows / im(m)` in canonical form.
pub fn cokernel(m: &IntMatrix) -> FgAbGroup {
    let (rank, factors) = smith_invariants(m);
    FgAbGroup::new(m.rows() - rank, factors)
}

/// A basis of `ker(m) ⊆ Z^cols`, as columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (rank, v) = smith_column_transform(m);
    let cols: Vec<usize> = (rank..m.cols()).collect();
    v.select_columns(&cols)
}

fn check_commute(b: &IntMatrix, m: &IntMatrix) -> Result<()> {
    if !b.is_square() || !m.is_square() || b.rows() != m.rows() {
        return Err(Error::Malformed(format!(
            "need square matrices of equal size, got {}x{} and {}x{}",
            b.rows(),
            b.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let bm = b * m;
    let mb = m * b;
    for i in 0..bm.rows() {
        for j in 0..bm.cols() {
            if bm[(i, j)] != mb[(i, j)] {
                return Err(Error::Precondition(format!(
                    "B·M and M·B differ at entry ({i}, {j}): {} vs {}",
                    bm[(i, j)],
                    mb[(i, j)]
                )));
            }
        }
    }
    Ok(())
}

/// The endomorphism of `coker(M)` induced by a matrix commuting with `M`.
pub fn induced_on_cokernel(b: &IntMatrix, m: &IntMatrix) -> Result<GroupHom> {
    check_commute(b, m)?;
    let sq = Subquotient::cokernel_of(m);
    sq.induced_hom(b, &sq)
}

/// The restriction of `B` to `ker(M)`, in kernel-basis coordinates.
pub fn induced_on_kernel(b: &IntMatrix, m: &IntMatrix) -> Result<GroupHom> {
    check_commute(b, m)?;
    let sq = Subquotient::kernel_of(m);
    sq.induced_hom(b, &sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::hom_well_defined;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&IntMatrix::from_i64(&[&[-2]])), FgAbGroup::cyclic(2));
        assert_eq!(cokernel(&IntMatrix::from_i64(&[&[0]])), FgAbGroup::free(1));
        assert_eq!(
            cokernel(&IntMatrix::from_i64(&[&[1, -1], &[-1, 1]])),
            FgAbGroup::free(1)
        );
        // a map out of Z^0 has the whole target as cokernel
        assert_eq!(cokernel(&IntMatrix::zeros(3, 0)), FgAbGroup::free(3));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&IntMatrix::from_i64(&[&[1, -1], &[-1, 1]]));
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert_eq!(col[0], col[1]);
        assert!(col[0] == BigInt::from(1) || col[0] == BigInt::from(-1));

        assert_eq!(kernel_basis(&IntMatrix::identity(3)).cols(), 0);
        let k = kernel_basis(&IntMatrix::zeros(1, 2));
        assert_eq!(k.cols(), 2);
        assert_eq!(k.determinant().magnitude(), BigInt::one().magnitude());
    }

    #[test]
    fn induced_on_cokernel_examples() {
        let f = induced_on_cokernel(&IntMatrix::from_i64(&[&[3]]), &IntMatrix::from_i64(&[&[-2]]))
            .unwrap();
        assert_eq!(f.dom(), &FgAbGroup::cyclic(2));
        // 3 = 1 mod 2
        assert_eq!(f.matrix(), &IntMatrix::from_i64(&[&[1]]));
        assert!(hom_well_defined(&f).unwrap());

        let b = IntMatrix::from_i64(&[&[2, 1], &[5, 3]]);
        let f = induced_on_cokernel(&b, &IntMatrix::zeros(2, 2)).unwrap();
        assert_eq!(f.dom(), &FgAbGroup::free(2));
        assert_eq!(f.matrix(), &b);

        let f = induced_on_cokernel(&IntMatrix::from_i64(&[&[2]]), &IntMatrix::from_i64(&[&[-1]]))
            .unwrap();
        assert!(f.dom().is_trivial());
        assert!(f.is_zero());
    }

    #[test]
    fn induced_on_kernel_examples() {
        let m = IntMatrix::from_i64(&[&[1, -1], &[-1, 1]]);
        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let f = induced_on_kernel(&swap, &m).unwrap();
        assert_eq!(f.dom(), &FgAbGroup::free(1));
        assert_eq!(f.matrix(), &IntMatrix::from_i64(&[&[1]]));

        let f = induced_on_kernel(&IntMatrix::from_i64(&[&[5]]), &IntMatrix::from_i64(&[&[3]]))
            .unwrap();
        assert!(f.dom().is_trivial());

        let b = IntMatrix::from_i64(&[&[2, 1], &[5, 3]]);
        let f = induced_on_kernel(&b, &IntMatrix::zeros(2, 2)).unwrap();
        // the kernel basis of the zero map is unimodular, so f is conjugate to b
        assert_eq!(f.matrix().determinant(), b.determinant());
        assert_eq!(f.dom(), &FgAbGroup::free(2));
    }

    #[test]
    fn non_commuting_inputs_name_the_entry() {
        let b = IntMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let m = IntMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        match induced_on_cokernel(&b, &m) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("(0, 1)"), "{msg}"),
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn kernel_of_hom_on_torsion() {
        // ×2 on Z_4 has kernel {0, 2} ≅ Z_2
        let z4 = FgAbGroup::cyclic(4);
        let f = GroupHom::scalar(&z4, 2);
        let k = Subquotient::kernel_of_hom(&f);
        assert_eq!(k.group(), &FgAbGroup::cyclic(2));
        let c = Subquotient::cokernel_of_hom(&f);
        assert_eq!(c.group(), &FgAbGroup::cyclic(2));
        let incl = k.inclusion_into(&z4).unwrap();
        assert_eq!(incl.apply(&big(&[1])), big(&[2]));
    }

    #[test]
    fn coordinates_respect_relations() {
        let sq = Subquotient::cokernel_of(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(sq.group(), &FgAbGroup::new(0, [2, 4]));
        let zero = sq.coords(&big(&[2, 6])).unwrap();
        assert!(zero.iter().all(Zero::is_zero));
        for j in 0..sq.lifts().cols() {
            let mut unit = vec![BigInt::zero(); sq.group().generator_count()];
            unit[j] = BigInt::one();
            assert_eq!(sq.coords(&sq.lifts().column(j)).unwrap(), unit);
        }
    }
}
