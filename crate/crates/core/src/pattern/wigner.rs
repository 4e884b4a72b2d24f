use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::compress::Axis;
use crate::error::{Error, Result};
use crate::galerkin::{Grid, WignerField};

/// Result of [`wigner_transform`].
#[derive(Clone, Debug)]
pub struct WignerTransform {
    pub field: WignerField,
    /// Set when the input was not normalized and had to be rescaled.
    pub renormalized: bool,
    /// `Σ |ψ|² Δq` of the input.
    pub input_norm: f64,
}

/// Band-limited 2× upsampling: the result interpolates `x` at half steps.
fn upsample(x: &[Complex64], planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let n = x.len();
    let mut spec = x.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut wide = vec![Complex64::default(); 2 * n];
    let half = n / 2;
    wide[..half].copy_from_slice(&spec[..half]);
    wide[2 * n - half + 1..].copy_from_slice(&spec[half + 1..]);
    // split the Nyquist bin between ±n/2
    wide[half] = spec[half] * 0.5;
    wide[2 * n - half] = spec[half] * 0.5;
    planner.plan_fft_inverse(2 * n).process(&mut wide);
    wide.iter().map(|v| v / n as f64).collect()
}

/// Discrete Wigner function `W(q,p) = (1/πħ) ∫ ψ*(q+y) ψ(q−y) e^{2ipy/ħ} dy`
/// of a wavefunction sampled on a periodic `q` grid.
///
/// Offsets `y` run over half steps of the grid, so the momentum grid has
/// `2N` points with spacing `πħ/(NΔq)` covering `[−πħ/Δq, πħ/Δq)`. The
/// wavefunction is treated as zero outside the grid, not as periodic.
pub fn wigner_transform(psi: &[Complex64], q: Axis, hbar: f64) -> Result<WignerTransform> {
    let n = psi.len();
    if n != q.points {
        return Err(Error::DimensionMismatch { expected: q.points, got: n });
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::param("hbar", format!("must be positive and finite, got {hbar}")));
    }
    if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::param("psi", "wavefunction contains non-finite values"));
    }
    let dq = q.step();
    let input_norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq;
    if input_norm <= 0.0 {
        return Err(Error::Degenerate { name: "psi", reason: "wavefunction is identically zero".into() });
    }
    let renormalized = (input_norm - 1.0).abs() > 1e-10;
    let scale = input_norm.sqrt().recip();
    let psi: Vec<Complex64> = psi.iter().map(|z| z * scale).collect();

    let pmax = std::f64::consts::PI * hbar / dq;
    let grid = Grid::new((q.min, q.max), (-pmax, pmax), (n, 2 * n))?;
    let mut planner = FftPlanner::new();
    // Zero-pad to twice the domain before upsampling so that q + y and q − y
    // never alias onto the same point; offsets are then folded onto one period
    // of the momentum phase.
    let mut padded = psi;
    padded.resize(2 * n, Complex64::default());
    let fine = upsample(&padded, &mut planner);
    let m2 = 2 * n;
    let m4 = 4 * n;
    let fft = planner.plan_fft_inverse(m2);
    let pref = dq / 2.0 / (std::f64::consts::PI * hbar);
    let mut values = Vec::with_capacity(n * m2);
    let mut buf = vec![Complex64::default(); m2];
    for iq in 0..n {
        let c = 2 * iq;
        buf.iter_mut().for_each(|b| *b = Complex64::default());
        // r_m = ψ*(q + y_m) ψ(q − y_m), y_m = m Δq/2
        for m in 0..m4 {
            buf[m % m2] += fine[(c + m) % m4].conj() * fine[(c + m4 - m) % m4];
        }
        // W(p_k) = pref Σ_m r_m e^{i p_k m Δq/ħ} with p_k = −πħ/Δq + kΔp
        for (m, b) in buf.iter_mut().enumerate() {
            if m % 2 == 1 {
                *b = -*b;
            }
        }
        fft.process(&mut buf);
        values.extend(buf.iter().map(|b| b.re * pref));
    }
    Ok(WignerTransform { field: WignerField::new(grid, values, hbar, 0.0)?, renormalized, input_norm })
}
