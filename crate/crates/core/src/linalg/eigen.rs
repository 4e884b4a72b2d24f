use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CsrMatrix;
use crate::error::{Error, Result};

/// Matrices up to this size are diagonalized densely.
const DENSE_LIMIT: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Converged when `‖A x − θ x‖ ≤ tol · ‖A‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Chebyshev filter degree per sweep.
    pub degree: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-11, max_iter: 300, degree: 16, seed: 0x5eed }
    }
}

/// Lowest eigenpairs of a symmetric matrix, ascending.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn block_apply(a: &CsrMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut y = DMatrix::zeros(n, x.ncols());
    for (xc, yc) in x.as_slice().chunks(n).zip(y.as_mut_slice().chunks_mut(n)) {
        a.mul_vec_into(xc, yc);
    }
    y
}

/// Orthonormal basis of the column span (thin QR).
fn orthonormalize(x: DMatrix<f64>) -> DMatrix<f64> {
    x.qr().q()
}

/// Rayleigh–Ritz on span(q): returns Ritz values, vectors and residual norms.
fn rayleigh_ritz(a: &CsrMatrix, q: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
    let aq = block_apply(a, q);
    let h = q.transpose() * &aq;
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let x = q * &v;
    let ax = aq * &v;
    let res = (0..theta.len())
        .map(|j| (ax.column(j) - x.column(j) * theta[j]).norm())
        .collect();
    (theta, x, res)
}

/// Scaled Chebyshev filter damping `[cut, upper]` and amplifying below `cut`.
fn chebyshev_filter(a: &CsrMatrix, x: &DMatrix<f64>, degree: usize, low: f64, cut: f64, upper: f64) -> DMatrix<f64> {
    let e = (upper - cut) / 2.0;
    let c = (upper + cut) / 2.0;
    let mut sigma = e / (low - c);
    let tau = 2.0 / sigma;
    let mut prev = x.clone();
    let mut cur = (block_apply(a, x) - x * c) * (sigma / e);
    for _ in 1..degree {
        let sigma_new = 1.0 / (tau - sigma);
        let next = (block_apply(a, &cur) - &cur * c) * (2.0 * sigma_new / e) - &prev * (sigma * sigma_new);
        prev = cur;
        cur = next;
        sigma = sigma_new;
    }
    cur
}

fn dense_lowest(a: &CsrMatrix, k: usize) -> EigenPairs {
    let n = a.nrows();
    let q = DMatrix::identity(n, n);
    let (theta, x, res) = rayleigh_ritz(a, &q);
    EigenPairs {
        values: theta[..k].to_vec(),
        vectors: (0..k).map(|j| x.column(j).iter().copied().collect()).collect(),
        residuals: res[..k].to_vec(),
        iterations: 1,
    }
}

/// The `k` smallest eigenpairs of the symmetric matrix `a` by Chebyshev-filtered
/// subspace iteration. `start` vectors, if given, seed the search block.
pub fn lowest_eigenpairs(a: &CsrMatrix, k: usize, opts: &EigenOptions, start: &[Vec<f64>]) -> Result<EigenPairs> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if k == 0 || k > n {
        return Err(Error::param("n_modes", format!("must be in 1..={n}, got {k}")));
    }
    if n <= DENSE_LIMIT {
        return Ok(dense_lowest(a, k));
    }
    let m = (k + (k / 2).max(12)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    for (j, s) in start.iter().take(m).enumerate() {
        if s.len() == n {
            x.column_mut(j).copy_from_slice(s);
        }
    }
    let (lo, hi) = a.gershgorin();
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let tol = opts.tol * scale;

    let (mut theta, mut x, mut res) = rayleigh_ritz(a, &orthonormalize(x));
    let mut low = theta[0];
    for it in 0..=opts.max_iter {
        let worst = res[..k].iter().copied().fold(0.0, f64::max);
        let converged = res[..k].iter().filter(|&&r| r <= tol).count();
        if converged == k {
            return Ok(EigenPairs {
                values: theta[..k].to_vec(),
                vectors: (0..k).map(|j| x.column(j).iter().copied().collect()).collect(),
                residuals: res[..k].to_vec(),
                iterations: it,
            });
        }
        let cut = theta[m - 1];
        if it == opts.max_iter || hi - cut <= 1e-12 * scale {
            return Err(Error::NonConvergence { iterations: it, residual: worst, converged, wanted: k });
        }
        low = low.min(theta[0]);
        let y = chebyshev_filter(a, &x, opts.degree, low, cut, hi);
        (theta, x, res) = rayleigh_ritz(a, &orthonormalize(y));
    }
    unreachable!()
}
