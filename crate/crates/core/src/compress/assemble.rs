use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::connection_coefficients;
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::wavelet::WaveletBasis;

/// Uniform periodic grid `x_i = min + i·Δ`, `Δ = (max − min)/points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::param("axis", format!("need finite min < max, got [{min}, {max}]")));
        }
        if points < 2 {
            return Err(Error::param("points", format!("need at least 2, got {points}")));
        }
        Ok(Axis { min, max, points })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / self.points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Dyadic level: number of trailing factors of two in `points`.
    pub fn level(&self) -> usize {
        self.points.trailing_zeros() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Derivative(usize),
    MultiplyByX,
    /// Multiplication by `Σ_k c_k x^k`.
    MultiplyByPoly(Vec<f64>),
}

fn convolve(a: &[(i64, f64)], b: &[(i64, f64)]) -> Vec<(i64, f64)> {
    let mut out = std::collections::BTreeMap::new();
    for &(i, x) in a {
        for &(j, y) in b {
            *out.entry(i + j).or_insert(0.0) += x * y;
        }
    }
    out.into_iter().collect()
}

/// Unit-spacing stencil `(l, s_l)` of `d/dx^order`: `(Df)_m = Σ_l s_l f_{m−l}`.
///
/// Orders the basis cannot resolve directly (`order ≥ genus/2`) are built as
/// products of lower-order stencils.
pub fn derivative_stencil(basis: &WaveletBasis, order: usize) -> Result<Vec<(i64, f64)>> {
    if order == 0 {
        return Ok(vec![(0, 1.0)]);
    }
    let max_direct = (basis.genus() / 2).saturating_sub(1);
    if max_direct == 0 {
        return Err(Error::InsufficientGenus { genus: basis.genus(), d1: 0, d2: order });
    }
    let first = order.min(max_direct);
    let table = connection_coefficients(basis, 0, first)?;
    let stencil: Vec<(i64, f64)> = table.iter().filter(|(_, v)| *v != 0.0).collect();
    if first == order {
        Ok(stencil)
    } else {
        Ok(convolve(&stencil, &derivative_stencil(basis, order - first)?))
    }
}

/// Periodic circulant derivative matrix on `axis`.
pub fn derivative_matrix(basis: &WaveletBasis, order: usize, axis: &Axis) -> Result<CsrMatrix> {
    let n = axis.points as i64;
    let scale = axis.step().powi(-(order as i32));
    let stencil = derivative_stencil(basis, order)?;
    let mut t = Vec::with_capacity(axis.points * stencil.len());
    for m in 0..n {
        for &(l, s) in &stencil {
            t.push((m as usize, (m - l).rem_euclid(n) as usize, s * scale));
        }
    }
    Ok(CsrMatrix::from_triplets(axis.points, axis.points, t))
}

/// Diagonal multiplication by `Σ_k c_k x^k` at the grid nodes.
pub fn multiplication_matrix(coeffs: &[f64], axis: &Axis) -> CsrMatrix {
    let d: Vec<f64> = axis
        .nodes()
        .iter()
        .map(|&x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
        .collect();
    CsrMatrix::from_diagonal(&d)
}

/// Sparse form of a 1-D operator on the point-value basis of `axis`.
pub fn assemble_1d_sparse(kind: &OperatorKind, basis: &WaveletBasis, axis: &Axis) -> Result<CsrMatrix> {
    match kind {
        OperatorKind::Derivative(d) => derivative_matrix(basis, *d, axis),
        OperatorKind::MultiplyByX => Ok(multiplication_matrix(&[0.0, 1.0], axis)),
        OperatorKind::MultiplyByPoly(c) => Ok(multiplication_matrix(c, axis)),
    }
}

/// Dense level-space matrix of a 1-D operator.
pub fn assemble_1d_operator(kind: &OperatorKind, basis: &WaveletBasis, axis: &Axis) -> Result<DMatrix<f64>> {
    Ok(assemble_1d_sparse(kind, basis, axis)?.to_dense())
}
