//! Compressed-row operators acting on dense column-major matrices.

use nalgebra::DMatrix;

use crate::C64;

/// Square sparse matrix in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    /// Builds from (row, col, value) triplets. Duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut op = Self {
            n,
            row_ptr,
            cols,
            vals,
        };
        op.prune();
        op
    }

    fn prune(&mut self) {
        let zero = C64::new(0.0, 0.0);
        if self.vals.iter().all(|v| *v != zero) {
            return;
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                if v != zero {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        *self = Self {
            n: self.n,
            row_ptr,
            cols,
            vals,
        };
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzeros (col, value) of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// A + diag(d).
    pub fn add_diagonal(&self, diag: &[C64]) -> Self {
        let mut t: Vec<(usize, usize, C64)> = Vec::with_capacity(self.nnz() + self.n);
        for (r, &d) in diag.iter().enumerate().take(self.n) {
            t.extend(self.row(r).map(|(c, v)| (r, c, v)));
            t.push((r, r, d));
        }
        Self::from_triplets(self.n, t)
    }

    /// y = A x.
    #[inline]
    pub fn mul_vec(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            *yr = acc;
        }
    }

    /// out += s · Σ_k conj(A[j, k]) · cols_k, where `cols_k` is column k of
    /// the column-major matrix `x` with `nrows` rows. This is column j of
    /// s · X A†.
    #[inline]
    pub fn right_adjoint_column(&self, j: usize, x: &[C64], nrows: usize, s: C64, out: &mut [C64]) {
        for (k, v) in self.row(j) {
            let w = s * v.conj();
            let col = &x[k * nrows..(k + 1) * nrows];
            for (o, xi) in out.iter_mut().zip(col) {
                *o += w * xi;
            }
        }
    }
}
