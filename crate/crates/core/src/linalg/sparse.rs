use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Compressed sparse row matrix of `f64`. Column indices within a row are
/// strictly increasing and explicit zeros are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows, ncols, indptr, indices, values }.pruned(0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    /// Entries with `|a| > tol` of a dense matrix.
    pub fn from_dense(m: &DMatrix<f64>, tol: f64) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].abs() > tol {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let cols = &self.indices[self.indptr[r]..self.indptr[r + 1]];
        cols.binary_search(&c).map(|k| self.values[self.indptr[r] + k]).unwrap_or(0.0)
    }

    /// Drops entries with `|a| ≤ tol`.
    pub fn pruned(self, tol: f64) -> Self {
        if self.values.iter().all(|v| v.abs() > tol) {
            return self;
        }
        let mut indptr = vec![0; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                if v.abs() > tol {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr[r + 1] = values.len();
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, indptr, indices, values }
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *out = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn checked_mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        Ok(self.mul_vec(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= s);
        self.pruned(0.0)
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, other: &CsrMatrix, s: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self.iter().chain(other.iter().map(|(r, c, v)| (r, c, s * v))).collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Row scaling `diag(d) · self`.
    pub fn scale_rows(mut self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.nrows);
        for (r, &dr) in d.iter().enumerate() {
            for k in self.indptr[r]..self.indptr[r + 1] {
                self.values[k] *= dr;
            }
        }
        self.pruned(0.0)
    }

    /// Kronecker product `a ⊗ b`: entry `((ia, ib), (ja, jb)) = a[ia, ja] · b[ib, jb]`
    /// with the row index `ia · b.nrows + ib`.
    pub fn kron(a: &CsrMatrix, b: &CsrMatrix) -> Self {
        let mut t = Vec::with_capacity(a.nnz() * b.nnz());
        for (ra, ca, va) in a.iter() {
            for (rb, cb, vb) in b.iter() {
                t.push((ra * b.nrows + rb, ca * b.ncols + cb, va * vb));
            }
        }
        Self::from_triplets(a.nrows * b.nrows, a.ncols * b.ncols, t)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum of a symmetric matrix.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.nrows {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    diag = v;
                } else {
                    off += v.abs();
                }
            }
            lo = lo.min(diag - off);
            hi = hi.max(diag + off);
        }
        (lo, hi)
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.add_scaled(&self.transpose(), -1.0).iter().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        self.add_scaled(&self.transpose(), 1.0).scale(0.5)
    }
}
