use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::wavelet::WaveletBasis;

/// Connection coefficients `Λ^{d1,d2}_l = ∫ φ^{(d1)}(x) φ^{(d2)}(x + l) dx`
/// for shifts `|l| ≤ genus − 2`.
///
/// With this orientation the first-derivative table obeys `Σ l Λ^{0,1}_l = −1`
/// and the derivative of `f = Σ c_k φ(· − k)` has coefficients
/// `(Df)_m = Σ_l Λ^{0,1}_l c_{m−l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionTable {
    basis: WaveletBasis,
    d1: usize,
    d2: usize,
    values: Vec<f64>,
}

impl ConnectionTable {
    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    /// Largest shift with a possibly nonzero value.
    pub fn max_shift(&self) -> i64 {
        (self.values.len() as i64 - 1) / 2
    }

    pub fn get(&self, l: i64) -> f64 {
        let m = self.max_shift();
        if l.abs() > m {
            0.0
        } else {
            self.values[(l + m) as usize]
        }
    }

    /// `(l, Λ_l)` for every stored shift, ascending in `l`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.max_shift();
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - m, v))
    }

    /// Moment `Σ_l l^k Λ_l`.
    pub fn moment(&self, k: u32) -> f64 {
        self.iter().map(|(l, v)| (l as f64).powi(k as i32) * v).sum()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Λ^{0,d}` from the two-scale relation `Λ_l = 2^d Σ_{i,j} h_i h_j Λ_{2l+i−j}`,
/// normalized by `Σ_l l^d Λ_l = (−1)^d d!`.
fn base_table(basis: &WaveletBasis, d: usize) -> Result<Vec<f64>> {
    let h = basis.lowpass();
    let n = h.len();
    let m = n as i64 - 2;
    let size = (2 * m + 1) as usize;
    let mut a = DMatrix::<f64>::zeros(size + 1, size);
    let scale = (d as f64).exp2();
    for r in 0..size {
        let l = r as i64 - m;
        for (i, &hi) in h.iter().enumerate() {
            for (j, &hj) in h.iter().enumerate() {
                let s = 2 * l + i as i64 - j as i64;
                if s.abs() <= m {
                    a[(r, (s + m) as usize)] += scale * hi * hj;
                }
            }
        }
        a[(r, r)] -= 1.0;
    }
    for c in 0..size {
        a[(size, c)] = ((c as i64 - m) as f64).powi(d as i32);
    }
    let mut rhs = DVector::zeros(size + 1);
    rhs[size] = if d.is_multiple_of(2) { 1.0 } else { -1.0 } * factorial(d);
    let sol = a
        .svd(true, true)
        .solve(&rhs, 1e-15)
        .map_err(|e| Error::Degenerate { name: "connection system", reason: e.to_string() })?;
    Ok(sol.iter().copied().collect())
}

pub fn connection_coefficients(basis: &WaveletBasis, d1: usize, d2: usize) -> Result<ConnectionTable> {
    let genus = basis.genus();
    if 2 * (d1 + d2) >= genus {
        return Err(Error::InsufficientGenus { genus, d1, d2 });
    }
    // ∫ φ^{(d1)} φ^{(d2)}(· + l) = (−1)^{d1} ∫ φ φ^{(d1+d2)}(· + l)
    let sign = if d1.is_multiple_of(2) { 1.0 } else { -1.0 };
    let values = base_table(basis, d1 + d2)?.into_iter().map(|v| sign * v).collect();
    Ok(ConnectionTable { basis: basis.clone(), d1, d2, values })
}
