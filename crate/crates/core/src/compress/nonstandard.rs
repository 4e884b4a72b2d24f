use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::wavelet::{analysis_step, synthesis_step, WaveletBasis};

/// One level of the nonstandard form: `A = G T Gᵀ`, `B = G T Hᵀ`, `Γ = H T Gᵀ`,
/// where `T` is the operator on the level's scaling space.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelBlocks {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub gamma: CsrMatrix,
}

/// Operator in nonstandard (telescoped) form. `levels[0]` is the finest split.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBlockMatrix {
    pub basis: WaveletBasis,
    pub dim: usize,
    pub levels: Vec<LevelBlocks>,
    pub coarse: CsrMatrix,
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionStats {
    /// Stored entries over `dim²`.
    pub retained_fraction: f64,
    pub epsilon: f64,
    pub dense_dim: usize,
    /// Bound on `‖(M − M̃) v‖` for unit `v`: sum of Frobenius norms of dropped entries.
    pub max_apply_error_bound: f64,
}

/// `[H; G] · X` applied to columns, returned as `(H X, G X)`.
fn split_columns(x: &DMatrix<f64>, basis: &WaveletBasis) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, c) = x.shape();
    let half = n / 2;
    let mut lo = DMatrix::zeros(half, c);
    let mut hi = DMatrix::zeros(half, c);
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for j in 0..c {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        analysis_step(&col, basis, &mut a, &mut d);
        lo.column_mut(j).copy_from_slice(&a);
        hi.column_mut(j).copy_from_slice(&d);
    }
    (lo, hi)
}

/// `Hᵀ L + Gᵀ D` column by column.
fn merge_columns(lo: &DMatrix<f64>, hi: &DMatrix<f64>, basis: &WaveletBasis) -> DMatrix<f64> {
    let (half, c) = lo.shape();
    let mut out = DMatrix::zeros(2 * half, c);
    let mut buf = vec![0.0; 2 * half];
    for j in 0..c {
        let a: Vec<f64> = lo.column(j).iter().copied().collect();
        let d: Vec<f64> = hi.column(j).iter().copied().collect();
        synthesis_step(&a, &d, basis, &mut buf);
        out.column_mut(j).copy_from_slice(&buf);
    }
    out
}

pub fn to_nonstandard_form(m: &DMatrix<f64>, basis: &WaveletBasis, levels: usize) -> Result<OperatorBlockMatrix> {
    let (n, c) = m.shape();
    if n != c {
        return Err(Error::DimensionMismatch { expected: n, got: c });
    }
    if n == 0 || levels >= usize::BITS as usize || n % (1 << levels) != 0 {
        return Err(Error::LengthMismatch { len: n, levels });
    }
    let mut t = m.clone();
    let mut blocks = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (ht, gt) = split_columns(&t, basis);
        // right multiplication by Hᵀ, Gᵀ = column split of the transpose
        let (hth, htg) = split_columns(&ht.transpose(), basis);
        let (gth, gtg) = split_columns(&gt.transpose(), basis);
        blocks.push(LevelBlocks {
            a: CsrMatrix::from_dense(&gtg.transpose(), 0.0),
            b: CsrMatrix::from_dense(&gth.transpose(), 0.0),
            gamma: CsrMatrix::from_dense(&htg.transpose(), 0.0),
        });
        t = hth.transpose();
    }
    Ok(OperatorBlockMatrix {
        basis: basis.clone(),
        dim: n,
        levels: blocks,
        coarse: CsrMatrix::from_dense(&t, 0.0),
        threshold: 0.0,
    })
}

fn drop_small(m: &CsrMatrix, eps: f64) -> (CsrMatrix, f64) {
    let dropped: f64 = m.iter().filter(|(_, _, v)| v.abs() < eps).map(|(_, _, v)| v * v).sum();
    let kept = CsrMatrix::from_triplets(
        m.nrows(),
        m.ncols(),
        m.iter().filter(|(_, _, v)| v.abs() >= eps).collect(),
    );
    (kept, dropped.sqrt())
}

impl OperatorBlockMatrix {
    pub fn nnz(&self) -> usize {
        self.coarse.nnz() + self.levels.iter().map(|l| l.a.nnz() + l.b.nnz() + l.gamma.nnz()).sum::<usize>()
    }

    pub fn stats(&self, bound: f64) -> CompressionStats {
        CompressionStats {
            retained_fraction: self.nnz() as f64 / (self.dim as f64).powi(2),
            epsilon: self.threshold,
            dense_dim: self.dim,
            max_apply_error_bound: bound,
        }
    }

    /// Drops every entry with `|a| < eps`.
    pub fn threshold_compress(&self, eps: f64) -> Result<(OperatorBlockMatrix, CompressionStats)> {
        if !(eps >= 0.0) {
            return Err(Error::param("epsilon", format!("must be nonnegative, got {eps}")));
        }
        let mut bound = 0.0;
        let mut keep = |m: &CsrMatrix| {
            let (k, e) = drop_small(m, eps);
            bound += e;
            k
        };
        let levels = self
            .levels
            .iter()
            .map(|l| LevelBlocks { a: keep(&l.a), b: keep(&l.b), gamma: keep(&l.gamma) })
            .collect();
        let coarse = keep(&self.coarse);
        let out = OperatorBlockMatrix {
            basis: self.basis.clone(),
            dim: self.dim,
            levels,
            coarse,
            threshold: eps,
        };
        let stats = out.stats(bound);
        Ok((out, stats))
    }

    /// Applies the operator to point-space coefficients.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut s = v.to_vec();
        let mut parts = Vec::with_capacity(self.levels.len());
        for _ in &self.levels {
            let half = s.len() / 2;
            let mut a = vec![0.0; half];
            let mut d = vec![0.0; half];
            analysis_step(&s, &self.basis, &mut a, &mut d);
            parts.push((a.clone(), d));
            s = a;
        }
        let mut out = self.coarse.mul_vec(&s);
        for (blk, (s_next, d)) in self.levels.iter().zip(&parts).rev() {
            let ad = blk.a.mul_vec(d);
            let bs = blk.b.mul_vec(s_next);
            let gd = blk.gamma.mul_vec(d);
            let approx: Vec<f64> = out.iter().zip(&gd).map(|(x, y)| x + y).collect();
            let detail: Vec<f64> = ad.iter().zip(&bs).map(|(x, y)| x + y).collect();
            let mut next = vec![0.0; 2 * approx.len()];
            synthesis_step(&approx, &detail, &self.basis, &mut next);
            out = next;
        }
        Ok(out)
    }

    /// Dense matrix represented by the blocks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut t = self.coarse.to_dense();
        for blk in self.levels.iter().rev() {
            // T = [H; G]ᵀ [[T, Γ], [B, A]] [H; G]
            let top_left = merge_columns(&t, &blk.b.to_dense(), &self.basis);
            let top_right = merge_columns(&blk.gamma.to_dense(), &blk.a.to_dense(), &self.basis);
            t = merge_columns(&top_left.transpose(), &top_right.transpose(), &self.basis).transpose();
        }
        t
    }
}
