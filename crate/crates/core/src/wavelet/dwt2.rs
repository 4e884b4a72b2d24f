use super::dwt::{analysis_step, check_levels, synthesis_step};
use super::WaveletBasis;
use crate::error::Result;

/// Separable periodic 2-D transform in the Mallat layout: after `levels` steps
/// the top-left `(rows >> levels) × (cols >> levels)` block holds the coarse
/// approximation and each L-shaped shell holds the three detail bands of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct Dwt2 {
    pub rows: usize,
    pub cols: usize,
    pub levels: usize,
    /// Row-major coefficients, same shape as the input.
    pub data: Vec<f64>,
}

impl Dwt2 {
    /// Block `(r, c)` dimensions of level `k` counted from the coarsest (`k = 0`).
    fn block(&self, k: usize) -> (usize, usize) {
        let shift = self.levels - k;
        (self.rows >> shift, self.cols >> shift)
    }

    pub fn approx_energy(&self) -> f64 {
        let (r, c) = self.block(0);
        (0..r).map(|i| self.data[i * self.cols..i * self.cols + c].iter().map(|x| x * x).sum::<f64>()).sum()
    }

    /// Squared norm of the detail shell `k` (`k = 0` is the coarsest detail level).
    pub fn detail_energy(&self, k: usize) -> f64 {
        let (r0, c0) = self.block(k);
        let (r1, c1) = (2 * r0, 2 * c0);
        let mut e = 0.0;
        for i in 0..r1 {
            let start = if i < r0 { c0 } else { 0 };
            e += self.data[i * self.cols + start..i * self.cols + c1].iter().map(|x| x * x).sum::<f64>();
        }
        e
    }

    /// Coefficient counts: approximation first, then each detail shell coarse to fine.
    pub fn band_sizes(&self) -> Vec<usize> {
        let (r, c) = self.block(0);
        let mut sizes = vec![r * c];
        sizes.extend((0..self.levels).map(|k| {
            let (r, c) = self.block(k);
            3 * r * c
        }));
        sizes
    }

    /// Energies in the same order as [`Dwt2::band_sizes`]; they sum to the input's squared norm.
    pub fn band_energies(&self) -> Vec<f64> {
        let mut out = vec![self.approx_energy()];
        out.extend((0..self.levels).map(|k| self.detail_energy(k)));
        out
    }
}

fn transform_rows(data: &mut [f64], stride: usize, r: usize, c: usize, basis: &WaveletBasis, forward: bool) {
    let half = c / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    let mut buf = vec![0.0; c];
    for i in 0..r {
        let row = &mut data[i * stride..i * stride + c];
        if forward {
            analysis_step(row, basis, &mut a, &mut d);
            row[..half].copy_from_slice(&a);
            row[half..].copy_from_slice(&d);
        } else {
            synthesis_step(&row[..half], &row[half..], basis, &mut buf);
            row.copy_from_slice(&buf);
        }
    }
}

fn transform_cols(data: &mut [f64], stride: usize, r: usize, c: usize, basis: &WaveletBasis, forward: bool) {
    let half = r / 2;
    let mut col = vec![0.0; r];
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    let mut buf = vec![0.0; r];
    for j in 0..c {
        for i in 0..r {
            col[i] = data[i * stride + j];
        }
        if forward {
            analysis_step(&col, basis, &mut a, &mut d);
            buf[..half].copy_from_slice(&a);
            buf[half..].copy_from_slice(&d);
        } else {
            synthesis_step(&col[..half], &col[half..], basis, &mut buf);
        }
        for i in 0..r {
            data[i * stride + j] = buf[i];
        }
    }
}

pub fn dwt2_forward(data: &[f64], rows: usize, cols: usize, basis: &WaveletBasis, levels: usize) -> Result<Dwt2> {
    if data.len() != rows * cols {
        return Err(crate::Error::DimensionMismatch { expected: rows * cols, got: data.len() });
    }
    check_levels(rows, levels)?;
    check_levels(cols, levels)?;
    let mut out = data.to_vec();
    for l in 0..levels {
        let (r, c) = (rows >> l, cols >> l);
        transform_rows(&mut out, cols, r, c, basis, true);
        transform_cols(&mut out, cols, r, c, basis, true);
    }
    Ok(Dwt2 { rows, cols, levels, data: out })
}

pub fn dwt2_inverse(t: &Dwt2, basis: &WaveletBasis) -> Vec<f64> {
    let mut out = t.data.clone();
    for l in (0..t.levels).rev() {
        let (r, c) = (t.rows >> l, t.cols >> l);
        transform_cols(&mut out, t.cols, r, c, basis, false);
        transform_rows(&mut out, t.cols, r, c, basis, false);
    }
    out
}
