//! A commutation isomorphism `E ⊗ F -> F ⊗ E` for `E = C^m`, `F = C^n`
//! over the scalars, given by an arbitrary unitary matrix. Such a `chi`
//! need not come from a 2-graph.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the unitarity check.
pub const UNITARY_TOL: f64 = 1e-12;

/// Column `i * n + j` is the image of `e_i ⊗ f_j`; row `k * m + l` is the
/// coefficient of `f_k ⊗ e_l`. With this indexing the identity matrix is
/// the pairing `e_i ⊗ f_j -> f_i ⊗ e_j` (for `m = n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUnitary", into = "RawUnitary")]
pub struct UnitaryChi {
    m: usize,
    n: usize,
    matrix: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawUnitary {
    m: usize,
    n: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<RawUnitary> for UnitaryChi {
    type Error = Error;
    fn try_from(raw: RawUnitary) -> Result<Self> {
        let size = raw.m * raw.n;
        if raw.matrix.len() != size || raw.matrix.iter().any(|r| r.len() != size) {
            return Err(Error::Malformed(format!(
                "unitary chi for m = {}, n = {} needs a {size}x{size} matrix",
                raw.m, raw.n
            )));
        }
        let matrix = DMatrix::from_fn(size, size, |i, j| {
            let [re, im] = raw.matrix[i][j];
            Complex64::new(re, im)
        });
        Ok(UnitaryChi::unchecked(raw.m, raw.n, matrix))
    }
}

impl From<UnitaryChi> for RawUnitary {
    fn from(u: UnitaryChi) -> Self {
        let size = u.size();
        RawUnitary {
            m: u.m,
            n: u.n,
            matrix: (0..size)
                .map(|i| (0..size).map(|j| [u.matrix[(i, j)].re, u.matrix[(i, j)].im]).collect())
                .collect(),
        }
    }
}

impl UnitaryChi {
    /// Checked constructor: shape must be `mn x mn`, and the matrix unitary
    /// to [`UNITARY_TOL`].
    pub fn new(m: usize, n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != m * n || matrix.ncols() != m * n {
            return Err(Error::Malformed(format!(
                "unitary chi for m = {m}, n = {n} needs a {0}x{0} matrix, got {1}x{2}",
                m * n,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let u = UnitaryChi::unchecked(m, n, matrix);
        let d = u.unitarity_defect();
        if d > UNITARY_TOL {
            return Err(Error::Invalid(format!(
                "matrix is not unitary: max |U*U - 1| entry is {d:e}"
            )));
        }
        Ok(u)
    }

    /// No unitarity check; negative controls need this.
    pub fn unchecked(m: usize, n: usize, matrix: DMatrix<Complex64>) -> Self {
        UnitaryChi { m, n, matrix }
    }

    /// The rotation family on `C^2 ⊗ C^2`: a rotation by `alpha` on the
    /// first two coordinates and by `beta` on the last two.
    pub fn rotation(alpha: f64, beta: f64) -> Self {
        let mut u = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let (cb, sb) = (beta.cos(), beta.sin());
        u[(0, 0)] = ca.into();
        u[(0, 1)] = (-sa).into();
        u[(1, 0)] = sa.into();
        u[(1, 1)] = ca.into();
        u[(2, 2)] = cb.into();
        u[(2, 3)] = (-sb).into();
        u[(3, 2)] = sb.into();
        u[(3, 3)] = cb.into();
        UnitaryChi::unchecked(2, 2, u)
    }

    /// A permutation `chi` written as a 0/1 matrix: `pairing[(i, j)] = (k, l)`
    /// sends `e_i ⊗ f_j` to `f_k ⊗ e_l`.
    pub fn from_pairing(m: usize, n: usize, pairing: &[((usize, usize), (usize, usize))]) -> Result<Self> {
        let size = m * n;
        let mut u = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
        for &((i, j), (k, l)) in pairing {
            if i >= m || j >= n || k >= n || l >= m {
                return Err(Error::Invalid(format!(
                    "pair ({i},{j}) -> ({k},{l}) out of range for m = {m}, n = {n}"
                )));
            }
            u[(k * m + l, i * n + j)] = Complex64::new(1.0, 0.0);
        }
        UnitaryChi::new(m, n, u)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m * self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Column of `e_i ⊗ f_j`.
    pub fn source_index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Row of `f_k ⊗ e_l`.
    pub fn target_index(&self, k: usize, l: usize) -> usize {
        k * self.m + l
    }

    /// `max |(U* U - 1)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotations_are_unitary() {
        for a in [0.0, PI / 6.0, PI / 4.0, 1.0] {
            for b in [0.0, PI / 3.0, -2.0] {
                assert!(UnitaryChi::rotation(a, b).unitarity_defect() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_angles_give_the_identity_pairing() {
        let u = UnitaryChi::rotation(0.0, 0.0);
        let pairing: Vec<_> = (0..2)
            .flat_map(|i| (0..2).map(move |j| ((i, j), (i, j))))
            .collect();
        assert_eq!(u, UnitaryChi::from_pairing(2, 2, &pairing).unwrap());
    }

    #[test]
    fn non_unitary_rejected() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(UnitaryChi::new(2, 2, m), Err(Error::Invalid(_))));
        assert!(matches!(
            UnitaryChi::new(2, 2, DMatrix::identity(3, 3)),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let u = UnitaryChi::rotation(PI / 4.0, 0.0);
        let text = serde_json::to_string(&u).unwrap();
        let back: UnitaryChi = serde_json::from_str(&text).unwrap();
        assert_eq!(u, back);
    }
}
