//! Smith normal form by unimodular row and column operations.
//!
//! The reduction always pivots on the nonzero entry of least absolute value
//! in the remaining block. It runs first on checked `i64` arithmetic and
//! restarts on `BigInt` if any intermediate value would overflow, so results
//! are always exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::IntMatrix;

/// `U * M * V = S` with `U`, `V` unimodular and `S` diagonal, nonnegative,
/// each diagonal entry dividing the next and zeros trailing. The inverses
/// of `U` and `V` are tracked alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SnfResult {
    /// Diagonal entries `s_ii` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Nonzero invariant factors `d_1 | d_2 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().take(self.rank).collect()
    }
}

trait Scalar: Clone + PartialEq + Sized {
    fn scalar_zero() -> Self;
    fn scalar_one() -> Self;
    fn nil(&self) -> bool;
    fn neg_sign(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn quot(&self, d: &Self) -> Option<Self>;
    fn divides(&self, n: &Self) -> bool;
    /// `self - q * b`
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
}

impl Scalar for i64 {
    fn scalar_zero() -> Self {
        0
    }
    fn scalar_one() -> Self {
        1
    }
    fn nil(&self) -> bool {
        *self == 0
    }
    fn neg_sign(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn divides(&self, n: &Self) -> bool {
        match n.checked_rem(*self) {
            Some(r) => r == 0,
            // i64::MIN % -1
            None => true,
        }
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
}

impl Scalar for BigInt {
    fn scalar_zero() -> Self {
        Zero::zero()
    }
    fn scalar_one() -> Self {
        One::one()
    }
    fn nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg_sign(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn divides(&self, n: &Self) -> bool {
        n.is_multiple_of(self)
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self.clone())
    }
}

type Grid<T> = Vec<Vec<T>>;

fn identity<T: Scalar>(n: usize) -> Grid<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::scalar_one() } else { T::scalar_zero() }).collect())
        .collect()
}

/// Which transforms a reduction keeps up to date.
#[derive(Clone, Copy)]
struct Track {
    rows: bool,
    cols: bool,
}

const TRACK_ALL: Track = Track { rows: true, cols: true };

struct Reduction<T> {
    track: Track,
    a: Grid<T>,
    u: Grid<T>,
    u_inv: Grid<T>,
    v: Grid<T>,
    v_inv: Grid<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> Reduction<T> {
    fn new(a: Grid<T>, rows: usize, cols: usize, track: Track) -> Self {
        let id = |on: bool, n: usize| if on { identity(n) } else { Vec::new() };
        Reduction {
            track,
            a,
            u: id(track.rows, rows),
            u_inv: id(track.rows, rows),
            v: id(track.cols, cols),
            v_inv: id(track.cols, cols),
            rows,
            cols,
        }
    }

    /// row[dst] -= q * row[src]
    fn row_op(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            self.a[dst][j] = self.a[dst][j].mul_sub(q, &self.a[src][j])?;
        }
        if !self.track.rows {
            return Some(());
        }
        for j in 0..self.rows {
            self.u[dst][j] = self.u[dst][j].mul_sub(q, &self.u[src][j])?;
        }
        let neg_q = q.neg()?;
        for i in 0..self.rows {
            self.u_inv[i][src] = self.u_inv[i][src].mul_sub(&neg_q, &self.u_inv[i][dst])?;
        }
        Some(())
    }

    /// col[dst] -= q * col[src]
    fn col_op(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            self.a[i][dst] = self.a[i][dst].mul_sub(q, &self.a[i][src])?;
        }
        if !self.track.cols {
            return Some(());
        }
        for i in 0..self.cols {
            self.v[i][dst] = self.v[i][dst].mul_sub(q, &self.v[i][src])?;
        }
        let neg_q = q.neg()?;
        for j in 0..self.cols {
            self.v_inv[src][j] = self.v_inv[src][j].mul_sub(&neg_q, &self.v_inv[dst][j])?;
        }
        Some(())
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            self.a.swap(i, k);
            if self.track.rows {
                self.u.swap(i, k);
                for row in &mut self.u_inv {
                    row.swap(i, k);
                }
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j != k {
            for row in &mut self.a {
                row.swap(j, k);
            }
            if self.track.cols {
                for row in &mut self.v {
                    row.swap(j, k);
                }
                self.v_inv.swap(j, k);
            }
        }
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.cols {
            self.a[i][j] = self.a[i][j].neg()?;
        }
        if !self.track.rows {
            return Some(());
        }
        for j in 0..self.rows {
            self.u[i][j] = self.u[i][j].neg()?;
        }
        for r in 0..self.rows {
            self.u_inv[r][i] = self.u_inv[r][i].neg()?;
        }
        Some(())
    }

    fn min_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.nil() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(&self.a[bi][bj]) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<usize> {
        let limit = self.rows.min(self.cols);
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.min_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                // clear column t below the pivot
                let mut smallest: Option<usize> = None;
                for i in t + 1..self.rows {
                    if self.a[i][t].nil() {
                        continue;
                    }
                    let q = self.a[i][t].quot(&self.a[t][t])?;
                    self.row_op(i, t, &q)?;
                    if !self.a[i][t].nil()
                        && smallest.is_none_or(|s| self.a[i][t].abs_lt(&self.a[s][t]))
                    {
                        smallest = Some(i);
                    }
                }
                if let Some(i) = smallest {
                    self.swap_rows(t, i);
                    continue;
                }
                // clear row t right of the pivot
                let mut smallest: Option<usize> = None;
                for j in t + 1..self.cols {
                    if self.a[t][j].nil() {
                        continue;
                    }
                    let q = self.a[t][j].quot(&self.a[t][t])?;
                    self.col_op(j, t, &q)?;
                    if !self.a[t][j].nil()
                        && smallest.is_none_or(|s| self.a[t][j].abs_lt(&self.a[t][s]))
                    {
                        smallest = Some(j);
                    }
                }
                if let Some(j) = smallest {
                    self.swap_cols(t, j);
                    continue;
                }
                // the pivot must divide the remaining block
                let offender = (t + 1..self.rows).find(|&i| {
                    (t + 1..self.cols).any(|j| !self.a[t][t].divides(&self.a[i][j]))
                });
                match offender {
                    Some(i) => {
                        let minus_one = T::scalar_one().neg()?;
                        self.row_op(t, i, &minus_one)?;
                    }
                    None => break,
                }
            }
            if self.a[t][t].neg_sign() {
                self.negate_row(t)?;
            }
            t += 1;
        }
        Some(t)
    }
}

fn to_matrix<T: Scalar>(g: &Grid<T>, rows: usize, cols: usize, conv: impl Fn(&T) -> BigInt) -> IntMatrix {
    let data = g.iter().flat_map(|r| r.iter().map(&conv)).collect();
    IntMatrix::from_vec(rows, cols, data).expect("grid shape")
}

fn finish<T: Scalar>(r: Reduction<T>, rank: usize, conv: impl Fn(&T) -> BigInt + Copy) -> SnfResult {
    let (rows, cols) = (r.rows, r.cols);
    SnfResult {
        u: to_matrix(&r.u, rows, rows, conv),
        s: to_matrix(&r.a, rows, cols, conv),
        v: to_matrix(&r.v, cols, cols, conv),
        u_inv: to_matrix(&r.u_inv, rows, rows, conv),
        v_inv: to_matrix(&r.v_inv, cols, cols, conv),
        rank,
    }
}

/// Runs the reduction, on `i64` when the input fits and it does not
/// overflow, otherwise on `BigInt`.
fn reduce<R>(
    m: &IntMatrix,
    track: Track,
    small: impl FnOnce(Reduction<i64>, usize) -> R,
    big: impl FnOnce(Reduction<BigInt>, usize) -> R,
) -> R {
    let (rows, cols) = (m.rows(), m.cols());
    let grid: Option<Grid<i64>> = (0..rows)
        .map(|i| m.row(i).iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect();
    if let Some(grid) = grid {
        let mut r = Reduction::new(grid, rows, cols, track);
        if let Some(rank) = r.run() {
            return small(r, rank);
        }
    }
    let mut r = Reduction::new(m.to_rows(), rows, cols, track);
    let rank = r.run().expect("bigint reduction cannot overflow");
    big(r, rank)
}

/// Smith normal form of any integer matrix, including empty shapes.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    reduce(
        m,
        TRACK_ALL,
        |r, rank| finish(r, rank, |x: &i64| BigInt::from(*x)),
        |r, rank| finish(r, rank, |x: &BigInt| x.clone()),
    )
}

/// Rank and nonzero invariant factors only; no transforms are tracked.
pub(crate) fn smith_invariants(m: &IntMatrix) -> (usize, Vec<BigInt>) {
    let none = Track { rows: false, cols: false };
    reduce(
        m,
        none,
        |r, rank| (rank, (0..rank).map(|i| BigInt::from(r.a[i][i])).collect()),
        |r, rank| (rank, (0..rank).map(|i| r.a[i][i].clone()).collect()),
    )
}

/// Rank and the column transform `V` only.
pub(crate) fn smith_column_transform(m: &IntMatrix) -> (usize, IntMatrix) {
    let cols_only = Track { rows: false, cols: true };
    let n = m.cols();
    reduce(
        m,
        cols_only,
        |r, rank| (rank, to_matrix(&r.v, n, n, |x: &i64| BigInt::from(*x))),
        |r, rank| (rank, to_matrix(&r.v, n, n, |x: &BigInt| x.clone())),
    )
}

/// Some integer solution of `a * x = b`, or `None` if there is none.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_with(&smith_normal_form(a), b)
}

/// As [`solve`], reusing a precomputed normal form of `a`.
pub(crate) fn solve_with(snf: &SnfResult, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let y = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let cols = snf.v.rows();
    let mut z = vec![BigInt::zero(); cols];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = yi.div_rem(&diag[i]);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(m);
        assert_eq!(&(&r.u * m) * &r.v, r.s, "U M V != S for {m:?}");
        assert_eq!(&r.u * &r.u_inv, IntMatrix::identity(m.rows()));
        assert_eq!(&r.v * &r.v_inv, IntMatrix::identity(m.cols()));
        let d = r.diagonal();
        for i in 0..d.len() {
            assert!(!d[i].is_negative());
            if i + 1 < d.len() && !d[i].is_zero() {
                assert!(d[i + 1].is_multiple_of(&d[i]));
            }
            if d[i].is_zero() {
                assert!(d[i..].iter().all(|x| x.is_zero()), "zeros must trail");
            }
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    assert!(r.s[(i, j)].is_zero());
                }
            }
        }
        r
    }

    #[test]
    fn partial_tracking_agrees_with_the_full_form() {
        let ms = [
            IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]),
            IntMatrix::from_i64(&[&[0, 3], &[2, 0], &[1, 1]]),
            IntMatrix::from_i64(&[&[i64::MAX, 2], &[3, i64::MAX]]),
            IntMatrix::zeros(2, 0),
        ];
        for m in &ms {
            let full = smith_normal_form(m);
            assert_eq!(smith_invariants(m), (full.rank, full.invariant_factors()));
            assert_eq!(smith_column_transform(m), (full.rank, full.v.clone()));
        }
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries is 2 and |det| = 8, so the factors are 2 and 4
        let r = check(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(r.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn identity_is_fixed() {
        let id = IntMatrix::identity(3);
        let r = check(&id);
        assert_eq!(r.s, id);
        assert_eq!(r.u, id);
        assert_eq!(r.v, id);
    }

    #[test]
    fn zero_and_empty_shapes() {
        let r = check(&IntMatrix::zeros(2, 3));
        assert_eq!(r.s, IntMatrix::zeros(2, 3));
        assert_eq!(r.rank, 0);
        check(&IntMatrix::zeros(0, 4));
        check(&IntMatrix::zeros(3, 0));
        check(&IntMatrix::zeros(0, 0));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 3;
        let m = IntMatrix::from_i64(&[&[big, big - 1], &[big - 7, big + 5]]);
        let r = check(&m);
        let det: BigInt = r.diagonal().iter().product();
        assert_eq!(det, m.determinant().abs());
    }

    #[test]
    fn solve_detects_non_membership() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert!(solve(&m, &[BigInt::from(1), BigInt::from(0)]).is_none());
        let x = solve(&m, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![BigInt::from(4), BigInt::from(9)]);
    }
}
