use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{operator_matrix, Grid, WignerField};
use crate::error::{Error, Result};
use crate::linalg::{lowest_eigenpairs, CsrMatrix, EigenOptions};
use crate::symbol::{stargen_operator, Hamiltonian};
use crate::wavelet::WaveletBasis;

/// Discretized `W ↦ H ⋆ W` split into real and imaginary parts.
#[derive(Clone, Debug)]
pub struct StationaryOperators {
    pub grid: Grid,
    pub hbar: f64,
    /// Symmetrized real part.
    pub l_real: CsrMatrix,
    pub l_imag: CsrMatrix,
    /// Largest `|a_ij − a_ji|` of the real part before symmetrization.
    pub asymmetry: f64,
}

pub fn assemble_stationary(h: &Hamiltonian, basis: &WaveletBasis, grid: &Grid) -> Result<StationaryOperators> {
    if h.is_kicked() {
        return Err(Error::param("hamiltonian", "stationary problems need a time-independent Hamiltonian"));
    }
    let op = stargen_operator(h.base(), h.hbar());
    let raw = operator_matrix(&op.real_part(), basis, grid)?;
    let l_imag = operator_matrix(&op.imag_part(), basis, grid)?;
    Ok(StationaryOperators {
        grid: *grid,
        hbar: h.hbar(),
        asymmetry: raw.asymmetry(),
        l_real: raw.symmetrized(),
        l_imag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryOptions {
    /// Eigenvalues closer than `cluster_tol · (1 + |ε|)` form one cluster.
    pub cluster_tol: f64,
    /// A cluster yields a mode only if its best `‖L_imag W‖/‖W‖` is at most this.
    pub constraint_tol: f64,
    /// Modes whose residuals exceed this are flagged.
    pub residual_tol: f64,
    pub eigen_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            cluster_tol: 5e-3,
            constraint_tol: 0.2,
            residual_tol: 1e-6,
            eigen_tol: 1e-11,
            max_iter: 300,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StationaryResult {
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<WignerField>,
    /// `‖L_real W − εW‖/‖W‖`.
    pub residuals: Vec<f64>,
    /// `‖L_imag W‖/‖W‖`.
    pub imag_residuals: Vec<f64>,
    /// True where either residual exceeds `residual_tol`.
    pub flagged: Vec<bool>,
    /// Number of real-part eigenvectors merged into each mode.
    pub cluster_sizes: Vec<usize>,
    /// Real-part eigenpairs computed in the final sweep.
    pub eigenpairs_computed: usize,
}

struct Candidate {
    value: f64,
    vector: Vec<f64>,
    imag: f64,
    size: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Picks the combination of `vectors` with the smallest imaginary residual.
fn best_in_cluster(l_imag: &CsrMatrix, vectors: &[&Vec<f64>]) -> (Vec<f64>, f64) {
    let c = vectors.len();
    let images: Vec<Vec<f64>> = vectors.iter().map(|v| l_imag.mul_vec(v)).collect();
    let gram = DMatrix::<f64>::from_fn(c, c, |i, j| images[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum());
    let eig = SymmetricEigen::new(gram);
    let k = (0..c).min_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).unwrap();
    let y = eig.eigenvectors.column(k);
    let n = vectors[0].len();
    let mut w = vec![0.0; n];
    for (v, &coef) in vectors.iter().zip(y.iter()) {
        for (wi, vi) in w.iter_mut().zip(v.iter()) {
            *wi += coef * vi;
        }
    }
    let nrm = norm(&w);
    w.iter_mut().for_each(|x| *x /= nrm);
    let imag = norm(&l_imag.mul_vec(&w));
    (w, imag)
}

/// Solves `H ⋆ W = εW` for the `n_modes` lowest real solutions.
///
/// Eigenvectors of the symmetrized real part are grouped into clusters of
/// nearly equal eigenvalue; within each cluster the combination minimizing the
/// imaginary-part residual is taken, and the cluster is kept when that residual
/// passes `constraint_tol`. Clusters are only judged once a larger eigenvalue
/// has been seen, so none is cut in half.
pub fn solve_stationary(ops: &StationaryOperators, n_modes: usize, opts: &StationaryOptions) -> Result<StationaryResult> {
    let n = ops.grid.len();
    if n_modes == 0 || n_modes > n {
        return Err(Error::param("n_modes", format!("must be in 1..={n}, got {n_modes}")));
    }
    let eopts = EigenOptions { tol: opts.eigen_tol, max_iter: opts.max_iter, seed: opts.seed, ..Default::default() };
    let mut k = (4 * n_modes).max(16).min(n);
    let mut start: Vec<Vec<f64>> = Vec::new();
    loop {
        let pairs = lowest_eigenpairs(&ops.l_real, k, &eopts, &start)?;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in pairs.values.iter().enumerate() {
            match clusters.last_mut() {
                Some(c) if v - pairs.values[*c.last().unwrap()] <= opts.cluster_tol * (1.0 + v.abs()) => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        let complete = if k == n { clusters.len() } else { clusters.len() - 1 };
        let mut accepted: Vec<Candidate> = Vec::new();
        let mut best_rejected = f64::INFINITY;
        for c in clusters.iter().take(complete) {
            let vecs: Vec<&Vec<f64>> = c.iter().map(|&i| &pairs.vectors[i]).collect();
            let (w, imag) = best_in_cluster(&ops.l_imag, &vecs);
            if imag <= opts.constraint_tol {
                let lw = ops.l_real.mul_vec(&w);
                let value = lw.iter().zip(&w).map(|(a, b)| a * b).sum();
                accepted.push(Candidate { value, vector: w, imag, size: c.len() });
                if accepted.len() == n_modes {
                    break;
                }
            } else {
                best_rejected = best_rejected.min(imag);
            }
        }
        if accepted.len() == n_modes {
            return finish(ops, accepted, opts, k);
        }
        if k == n {
            return Err(Error::InsufficientModes { found: accepted.len(), wanted: n_modes, best_rejected });
        }
        start = pairs.vectors;
        k = (2 * k).min(n);
    }
}

fn finish(ops: &StationaryOperators, accepted: Vec<Candidate>, opts: &StationaryOptions, computed: usize) -> Result<StationaryResult> {
    let area = ops.grid.cell_area();
    let mut out = StationaryResult {
        eigenvalues: Vec::new(),
        modes: Vec::new(),
        residuals: Vec::new(),
        imag_residuals: Vec::new(),
        flagged: Vec::new(),
        cluster_sizes: Vec::new(),
        eigenpairs_computed: computed,
    };
    for c in accepted {
        let lw = ops.l_real.mul_vec(&c.vector);
        let res = norm(&lw.iter().zip(&c.vector).map(|(a, b)| a - c.value * b).collect::<Vec<_>>());
        let mass: f64 = c.vector.iter().sum::<f64>() * area;
        let scale = if mass.abs() > 1e-8 * norm(&c.vector) * area.sqrt() {
            1.0 / mass
        } else {
            // no mass to normalize: fall back to unit L2 norm
            1.0 / area.sqrt()
        };
        let values = c.vector.iter().map(|v| v * scale).collect();
        out.eigenvalues.push(c.value);
        out.modes.push(WignerField::new(ops.grid, values, ops.hbar, 0.0)?);
        out.residuals.push(res);
        out.imag_residuals.push(c.imag);
        out.flagged.push(res > opts.residual_tol || c.imag > opts.residual_tol);
        out.cluster_sizes.push(c.size);
    }
    Ok(out)
}
