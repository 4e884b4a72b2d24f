use std::collections::HashMap;

use super::Grid;
use crate::compress::{derivative_matrix, multiplication_matrix, Axis};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::symbol::PhaseSpaceOperator;
use crate::wavelet::WaveletBasis;

struct AxisFactors<'a> {
    basis: &'a WaveletBasis,
    axis: Axis,
    derivatives: HashMap<u32, CsrMatrix>,
}

impl<'a> AxisFactors<'a> {
    fn new(basis: &'a WaveletBasis, axis: Axis) -> Self {
        AxisFactors { basis, axis, derivatives: HashMap::new() }
    }

    /// `diag(x^power) · D^order` on this axis.
    fn factor(&mut self, power: u32, order: u32) -> Result<CsrMatrix> {
        let d = match self.derivatives.get(&order) {
            Some(d) => d.clone(),
            None => {
                let d = if order == 0 {
                    CsrMatrix::identity(self.axis.points)
                } else {
                    derivative_matrix(self.basis, order as usize, &self.axis)?
                };
                self.derivatives.insert(order, d.clone());
                d
            }
        };
        let mut mono = vec![0.0; power as usize + 1];
        mono[power as usize] = 1.0;
        let m = multiplication_matrix(&mono, &self.axis);
        Ok(d.scale_rows(&(0..self.axis.points).map(|i| m.get(i, i)).collect::<Vec<_>>()))
    }
}

/// Collocation matrix of a phase-space operator with real coefficients: each
/// term `c p^i q^j ∂_q^a ∂_p^b` becomes `c (q^j D_q^a) ⊗ (p^i D_p^b)`.
pub fn operator_matrix(op: &PhaseSpaceOperator, basis: &WaveletBasis, grid: &Grid) -> Result<CsrMatrix> {
    if !op.is_real(0.0) {
        return Err(Error::param("operator", "coefficients must be real; split real and imaginary parts first"));
    }
    let mut fq = AxisFactors::new(basis, grid.q);
    let mut fp = AxisFactors::new(basis, grid.p);
    let mut total = CsrMatrix::zeros(grid.len(), grid.len());
    for term in op.terms() {
        for ((i, j), c) in term.coeff.terms() {
            if c.re == 0.0 {
                continue;
            }
            let kq = fq.factor(j, term.dq)?;
            let kp = fp.factor(i, term.dp)?;
            total = total.add_scaled(&CsrMatrix::kron(&kq, &kp), c.re);
        }
    }
    Ok(total)
}
