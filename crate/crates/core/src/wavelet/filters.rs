use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Daubechies,
}

/// An orthonormal, compactly supported wavelet filter pair.
///
/// `lowpass` has `genus` taps with `Σ h = √2` and `Σ_k h_k h_{k+2m} = δ_{m0}`;
/// the high-pass filter is the alternating flip `g_k = (−1)^k h_{genus−1−k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletBasis {
    family: WaveletFamily,
    genus: usize,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletBasis {
    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    /// Number of filter taps.
    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Vanishing moments of the wavelet, `genus / 2`.
    pub fn vanishing_moments(&self) -> usize {
        self.genus / 2
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    /// Largest `|Σ_k h_k h_{k+2m} − δ_{m0}|` over all shifts, plus the
    /// deviation of `Σ h` from `√2`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = &self.lowpass;
        let n = h.len();
        let mut worst = (h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs();
        for m in 0..n.div_ceil(2) {
            let s: f64 = (0..n - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
            let target = if m == 0 { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
        worst
    }
}

/// Minimal-phase Daubechies filters with `genus` taps (`genus / 2` vanishing moments).
///
/// Built by spectral factorization: the roots of the Daubechies polynomial
/// `P(y) = Σ_{k<p} C(p−1+k, k) y^k` are mapped through `y = (2 − z − 1/z)/4`
/// and the root inside the unit circle of each reciprocal pair is kept.
pub fn daubechies_filters(genus: usize) -> Result<WaveletBasis> {
    if !(2..=20).contains(&genus) || !genus.is_multiple_of(2) {
        return Err(Error::UnsupportedGenus(genus));
    }
    let p = genus / 2;
    let poly: Vec<Complex64> = (0..p)
        .map(|k| Complex64::new(binomial(p - 1 + k, k), 0.0))
        .collect();
    let y_roots = polynomial_roots(&poly);

    // (1 + z)^p · Π (z − z_r), coefficients in ascending powers of z
    let mut h = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..p {
        h = poly_mul(&h, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }
    for y in y_roots {
        let b = Complex64::new(2.0, 0.0) - y * 4.0;
        let disc = (b * b - 4.0).sqrt();
        let (z1, z2) = ((b + disc) / 2.0, (b - disc) / 2.0);
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        h = poly_mul(&h, &[-z, Complex64::new(1.0, 0.0)]);
    }
    let mut lowpass: Vec<f64> = h.iter().rev().map(|c| c.re).collect();
    let scale = std::f64::consts::SQRT_2 / lowpass.iter().sum::<f64>();
    lowpass.iter_mut().for_each(|x| *x *= scale);

    let highpass = (0..genus)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * lowpass[genus - 1 - k]
        })
        .collect();
    Ok(WaveletBasis {
        family: WaveletFamily::Daubechies,
        genus,
        lowpass,
        highpass,
    })
}

/// Builds the basis for a `(family, genus)` pair.
pub fn wavelet_basis(family: WaveletFamily, genus: usize) -> Result<WaveletBasis> {
    match family {
        WaveletFamily::Daubechies => daubechies_filters(genus),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        d = d * x + v;
        v = v * x + a;
    }
    (v, d)
}

/// Roots of `Σ c_k x^k` by Aberth–Ehrlich iteration followed by Newton polishing.
fn polynomial_roots(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|&a| a / lead).collect();
    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..deg {
            let (v, d) = poly_eval(&monic, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(step.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = poly_eval(&monic, *r);
            if d.norm() > 0.0 {
                *r -= v / d;
            }
        }
    }
    z
}
