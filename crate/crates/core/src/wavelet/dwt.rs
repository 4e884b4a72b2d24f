use serde::{Deserialize, Serialize};

use super::WaveletBasis;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
}

/// Multiresolution split of a signal: approximation coefficients at the
/// coarse level plus detail coefficients for every level up to the fine one.
///
/// A signal of length `N = 2^J · n0` (`n0` odd) sits at level `J`. After
/// `levels` steps the approximation lives at `J − levels`. `details[k]`
/// belongs to level `coarse_level + k`, so the last entry is the finest.
#[derive(Clone, Debug, PartialEq)]
pub struct MraDecomposition {
    pub coarse_level: usize,
    pub fine_level: usize,
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub boundary: Boundary,
}

impl MraDecomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn len(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of squared coefficients.
    pub fn energy(&self) -> f64 {
        self.approx.iter().chain(self.details.iter().flatten()).map(|x| x * x).sum()
    }
}

/// Level of a signal of length `len`: the number of times it halves evenly.
pub fn signal_level(len: usize) -> usize {
    if len == 0 {
        0
    } else {
        len.trailing_zeros() as usize
    }
}

pub(crate) fn check_levels(len: usize, levels: usize) -> Result<()> {
    if len == 0 || levels >= usize::BITS as usize || !len.is_multiple_of(1usize << levels) {
        return Err(Error::LengthMismatch { len, levels });
    }
    Ok(())
}

/// One periodic analysis step: `a_k = Σ h_n x_{2k+n}`, `d_k = Σ g_n x_{2k+n}`.
pub fn analysis_step(x: &[f64], basis: &WaveletBasis, approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    let (h, g) = (basis.lowpass(), basis.highpass());
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (t, (&hc, &gc)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * k + t) % n];
            a += hc * v;
            d += gc * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Adjoint of [`analysis_step`]; overwrites `out` (length `2 · approx.len()`).
pub fn synthesis_step(approx: &[f64], detail: &[f64], basis: &WaveletBasis, out: &mut [f64]) {
    let n = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    let (h, g) = (basis.lowpass(), basis.highpass());
    for k in 0..approx.len() {
        let (a, d) = (approx[k], detail[k]);
        for (t, (&hc, &gc)) in h.iter().zip(g).enumerate() {
            out[(2 * k + t) % n] += hc * a + gc * d;
        }
    }
}

/// Periodic fast wavelet transform over `levels` scales.
pub fn dwt_forward(signal: &[f64], basis: &WaveletBasis, levels: usize) -> Result<MraDecomposition> {
    check_levels(signal.len(), levels)?;
    let fine_level = signal_level(signal.len());
    let mut current = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let half = current.len() / 2;
        let mut approx = vec![0.0; half];
        let mut detail = vec![0.0; half];
        analysis_step(&current, basis, &mut approx, &mut detail);
        details.push(detail);
        current = approx;
    }
    details.reverse();
    Ok(MraDecomposition {
        coarse_level: fine_level - levels,
        fine_level,
        approx: current,
        details,
        boundary: Boundary::Periodic,
    })
}

/// Inverse of [`dwt_forward`].
pub fn dwt_inverse(mra: &MraDecomposition, basis: &WaveletBasis) -> Vec<f64> {
    let mut current = mra.approx.clone();
    for detail in &mra.details {
        let mut out = vec![0.0; 2 * current.len()];
        synthesis_step(&current, detail, basis, &mut out);
        current = out;
    }
    current
}

/// Projections of `signal` onto each space of the ladder
/// `V_c ⊕ W_c ⊕ W_{c+1} ⊕ … ⊕ W_{J−1}`, each returned at full length.
///
/// Entry 0 is the approximation at `coarse_level`, entry `k ≥ 1` the detail
/// component of level `coarse_level + k − 1`. The components sum to the input.
pub fn mra_components(signal: &[f64], basis: &WaveletBasis, coarse_level: usize) -> Result<Vec<Vec<f64>>> {
    let fine = signal_level(signal.len());
    if coarse_level > fine {
        return Err(Error::param(
            "coarse_level",
            format!("{coarse_level} exceeds the signal level {fine}"),
        ));
    }
    let mra = dwt_forward(signal, basis, fine - coarse_level)?;
    let zeroed = MraDecomposition {
        approx: vec![0.0; mra.approx.len()],
        details: mra.details.iter().map(|d| vec![0.0; d.len()]).collect(),
        ..mra.clone()
    };
    let mut out = Vec::with_capacity(mra.levels() + 1);
    let mut only = zeroed.clone();
    only.approx.copy_from_slice(&mra.approx);
    out.push(dwt_inverse(&only, basis));
    for k in 0..mra.levels() {
        let mut only = zeroed.clone();
        only.details[k].copy_from_slice(&mra.details[k]);
        out.push(dwt_inverse(&only, basis));
    }
    Ok(out)
}
