use num_complex::Complex64;

/// Square sparse matrix stored by columns; entries inside a column are kept
/// sorted by row so sums run in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    dim: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

fn merge(entries: impl IntoIterator<Item = (usize, Complex64)>) -> Vec<(usize, Complex64)> {
    let mut v: Vec<(usize, Complex64)> = entries.into_iter().collect();
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(v.len());
    for (r, x) in v {
        match out.last_mut() {
            Some((last, acc)) if *last == r => *acc += x,
            _ => out.push((r, x)),
        }
    }
    out.retain(|e| e.1 != Complex64::new(0.0, 0.0));
    out
}

impl SparseOp {
    pub fn zero(dim: usize) -> Self {
        SparseOp {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![true; dim])
    }

    /// 0/1 diagonal.
    pub fn diagonal(mask: &[bool]) -> Self {
        SparseOp {
            dim: mask.len(),
            cols: mask
                .iter()
                .enumerate()
                .map(|(i, &on)| if on { vec![(i, Complex64::new(1.0, 0.0))] } else { Vec::new() })
                .collect(),
        }
    }

    pub fn from_columns(dim: usize, cols: Vec<Vec<(usize, Complex64)>>) -> Self {
        assert_eq!(cols.len(), dim);
        SparseOp {
            dim,
            cols: cols.into_iter().map(merge).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &[(usize, Complex64)] {
        &self.cols[j]
    }

    pub fn set_column(&mut self, j: usize, col: Vec<(usize, Complex64)>) {
        self.cols[j] = merge(col);
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.cols[j]
            .iter()
            .find(|e| e.0 == i)
            .map_or(Complex64::new(0.0, 0.0), |e| e.1)
    }

    pub fn adjoint(&self) -> Self {
        let mut cols = vec![Vec::new(); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, x) in col {
                cols[i].push((j, x.conj()));
            }
        }
        Self::from_columns(self.dim, cols)
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseOp) -> Self {
        let cols = rhs
            .cols
            .iter()
            .map(|col| {
                merge(col.iter().flat_map(|&(k, y)| self.cols[k].iter().map(move |&(i, x)| (i, x * y))))
            })
            .collect();
        SparseOp { dim: self.dim, cols }
    }

    pub fn add_scaled(&self, rhs: &SparseOp, s: Complex64) -> Self {
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| merge(a.iter().copied().chain(b.iter().map(|&(i, x)| (i, x * s)))))
            .collect();
        SparseOp { dim: self.dim, cols }
    }

    pub fn sub(&self, rhs: &SparseOp) -> Self {
        self.add_scaled(rhs, Complex64::new(-1.0, 0.0))
    }

    /// Schur bound `sqrt(max row sum * max column sum)` of `|entries|`,
    /// over the columns selected by `cols` and (if given) the rows in
    /// `rows`. An upper bound on the operator norm of that block, and zero
    /// exactly when the block is.
    pub fn block_norm_bound(&self, cols: &[bool], rows: Option<&[bool]>) -> f64 {
        let mut row_sums = vec![0.0f64; self.dim];
        let mut max_col = 0.0f64;
        for (j, col) in self.cols.iter().enumerate() {
            if !cols[j] {
                continue;
            }
            let mut s = 0.0;
            for &(i, x) in col {
                if rows.is_none_or(|r| r[i]) {
                    s += x.norm();
                    row_sums[i] += x.norm();
                }
            }
            max_col = max_col.max(s);
        }
        let max_row = row_sums.into_iter().fold(0.0f64, f64::max);
        (max_row * max_col).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn products_and_adjoints() {
        // shift on C^3
        let s = SparseOp::from_columns(3, vec![vec![(1, c(1.0))], vec![(2, c(1.0))], vec![]]);
        let p = s.adjoint().mul(&s);
        assert_eq!(p, SparseOp::diagonal(&[true, true, false]));
        let q = s.mul(&s.adjoint());
        assert_eq!(q, SparseOp::diagonal(&[false, true, true]));
        assert_eq!(s.get(1, 0), c(1.0));
    }

    #[test]
    fn schur_bound_of_a_rotation_block() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = SparseOp::from_columns(2, vec![vec![(0, c(h)), (1, c(h))], vec![(0, c(-h)), (1, c(h))]]);
        let b = r.block_norm_bound(&[true, true], None);
        assert!((b - 2.0 * h).abs() < 1e-15);
        assert_eq!(r.sub(&r).block_norm_bound(&[true, true], None), 0.0);
        assert_eq!(SparseOp::identity(4).block_norm_bound(&[true, false, true, false], None), 1.0);
    }
}
