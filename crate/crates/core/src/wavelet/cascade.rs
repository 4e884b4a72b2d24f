use nalgebra::DMatrix;

use super::WaveletBasis;
use crate::error::{Error, Result};

/// Scaling function `φ` and wavelet `ψ` sampled on the dyadic grid
/// `x_i = i · 2^{−level}` over their common support `[0, genus − 1]`.
#[derive(Clone, Debug)]
pub struct CascadeSamples {
    pub level: usize,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl CascadeSamples {
    pub fn step(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    fn trapezoid(&self, f: &[f64]) -> f64 {
        let n = f.len();
        if n < 2 {
            return 0.0;
        }
        self.step() * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
    }

    pub fn integral_phi(&self) -> f64 {
        self.trapezoid(&self.phi)
    }

    pub fn integral_psi(&self) -> f64 {
        self.trapezoid(&self.psi)
    }

    /// `φ(x)` at a dyadic point of this grid, zero outside the support.
    pub fn phi_at_index(&self, i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.phi.get(i as usize).copied().unwrap_or(0.0)
        }
    }

    /// Largest `|φ(x) − √2 Σ_k h_k φ(2x − k)|` over the grid.
    pub fn refinement_residual(&self, basis: &WaveletBasis) -> f64 {
        let per_unit = 1isize << self.level;
        let s = std::f64::consts::SQRT_2;
        (0..self.phi.len())
            .map(|i| {
                let rhs: f64 = basis
                    .lowpass()
                    .iter()
                    .enumerate()
                    .map(|(k, &h)| s * h * self.phi_at_index(2 * i as isize - k as isize * per_unit))
                    .sum();
                (self.phi[i] - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Evaluates `φ` and `ψ` by the cascade algorithm: exact values at the integers
/// from the eigenvector of the refinement matrix, then repeated refinement
/// `φ(x) = √2 Σ h_k φ(2x − k)` down to spacing `2^{−level}`.
pub fn cascade_evaluate(basis: &WaveletBasis, level: usize) -> Result<CascadeSamples> {
    if level > 12 {
        return Err(Error::param("resolution_level", format!("must be at most 12, got {level}")));
    }
    let h = basis.lowpass();
    let g = basis.highpass();
    let n = h.len();
    let s = std::f64::consts::SQRT_2;

    let mut phi = vec![0.0; n];
    if n == 2 {
        // Haar: right-continuous indicator of [0, 1)
        phi[0] = 1.0;
    } else {
        // φ(0) = φ(n−1) = 0; interior values solve φ(k) = √2 Σ_m h_{2k−m} φ(m).
        let m = n - 2;
        let mut a = DMatrix::<f64>::zeros(m + 1, m);
        for r in 0..m {
            let k = r + 1;
            for c in 0..m {
                let idx = 2 * k as isize - (c + 1) as isize;
                if idx >= 0 && (idx as usize) < n {
                    a[(r, c)] += s * h[idx as usize];
                }
            }
            a[(r, r)] -= 1.0;
        }
        for c in 0..m {
            a[(m, c)] = 1.0;
        }
        let mut rhs = nalgebra::DVector::<f64>::zeros(m + 1);
        rhs[m] = 1.0;
        let sol = a
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::param("basis", format!("refinement system is singular: {e}")))?;
        phi[1..=m].copy_from_slice(sol.as_slice());
    }

    for lev in 1..=level {
        let half = 1usize << (lev - 1);
        let count = (n - 1) * (1 << lev) + 1;
        let old = phi;
        phi = (0..count)
            .map(|i| {
                h.iter()
                    .enumerate()
                    .filter_map(|(k, &hk)| {
                        let idx = i as isize - (k * half) as isize;
                        (idx >= 0 && (idx as usize) < old.len()).then(|| s * hk * old[idx as usize])
                    })
                    .sum()
            })
            .collect();
    }

    // ψ(x) = √2 Σ g_k φ(2x − k): 2x − k on this grid is index 2i − k·2^level.
    let per_unit = 1isize << level;
    let psi = (0..phi.len())
        .map(|i| {
            g.iter()
                .enumerate()
                .map(|(k, &gk)| {
                    let idx = 2 * i as isize - k as isize * per_unit;
                    if idx >= 0 && (idx as usize) < phi.len() {
                        s * gk * phi[idx as usize]
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    let step = (-(level as f64)).exp2();
    let x = (0..phi.len()).map(|i| i as f64 * step).collect();
    Ok(CascadeSamples { level, x, phi, psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::daubechies_filters;

    #[test]
    fn haar_is_an_indicator() {
        let b = daubechies_filters(2).unwrap();
        let c = cascade_evaluate(&b, 6).unwrap();
        assert_eq!(c.phi.len(), 65);
        assert!(c.phi[..64].iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(c.phi[64], 0.0);
    }

    #[test]
    fn d4_support_and_integrals() {
        let b = daubechies_filters(4).unwrap();
        let c = cascade_evaluate(&b, 10).unwrap();
        assert_eq!(*c.x.last().unwrap(), 3.0);
        assert!(c.phi[0].abs() < 1e-14 && c.phi.last().unwrap().abs() < 1e-14);
        // φ(1) = (1+√3)/2 for D4
        let one = c.phi[1 << 10];
        assert!((one - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((c.integral_phi() - 1.0).abs() < 1e-6);
        assert!(c.integral_psi().abs() < 1e-6);
    }

    #[test]
    fn refinement_holds_for_several_genera() {
        for genus in [4, 6, 8, 12] {
            let b = daubechies_filters(genus).unwrap();
            let c = cascade_evaluate(&b, 8).unwrap();
            assert!(c.refinement_residual(&b) < 1e-8);
            assert!((c.integral_phi() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn level_cap() {
        let b = daubechies_filters(4).unwrap();
        assert!(cascade_evaluate(&b, 13).is_err());
    }
}
