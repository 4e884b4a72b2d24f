use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::compress::Axis;
use crate::error::Result;
use crate::galerkin::{Grid, WignerField};

fn one() -> f64 {
    1.0
}

fn unit_weight() -> [f64; 2] {
    [1.0, 0.0]
}

/// A Gaussian wavepacket `ψ ∝ exp(−(x−q0)²/(4σ²) + i p0 x/ħ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub q0: f64,
    pub p0: f64,
    /// Position standard deviation; defaults to `√(ħ/2)`.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Complex amplitude `[re, im]`.
    #[serde(default = "unit_weight")]
    pub weight: [f64; 2],
}

impl GaussianComponent {
    fn sigma(&self, hbar: f64) -> f64 {
        self.sigma.unwrap_or((hbar / 2.0).sqrt())
    }

    fn psi(&self, x: f64, hbar: f64) -> Complex64 {
        let s = self.sigma(hbar);
        let amp = (2.0 * PI * s * s).powf(-0.25) * (-(x - self.q0).powi(2) / (4.0 * s * s)).exp();
        Complex64::new(self.weight[0], self.weight[1]) * Complex64::from_polar(amp, self.p0 * x / hbar)
    }
}

/// An initial state or input field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Gaussian wavepacket centred at `(q0, p0)`.
    Coherent {
        q0: f64,
        p0: f64,
        #[serde(default)]
        sigma: Option<f64>,
    },
    /// Eigenstate `n` of `p²/2 + q²/2`.
    Oscillator { n: usize },
    /// Normalized sum of Gaussian wavepackets.
    Superposition { components: Vec<GaussianComponent> },
    /// I.i.d. uniform values in `[−amplitude, amplitude]`, drawn from the run seed.
    WhiteNoise {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// A field previously written as header JSON plus `.f64` payload. Relative
    /// paths resolve against the config file's directory.
    Field { path: PathBuf },
}

fn bad(field: &str, message: String) -> CliError {
    CliError::config(Some(format!("params.state.{field}")), message)
}

/// Normalized Hermite function `φ_n(ξ)`.
fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * xi * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = ((2 * k + 1) as f64 - x) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

impl StateSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let check_sigma = |field: &str, s: Option<f64>| match s {
            Some(s) if !(s > 0.0 && s.is_finite()) => Err(bad(field, format!("must be positive, got {s}"))),
            _ => Ok(()),
        };
        match self {
            StateSpec::Coherent { q0, p0, sigma } => {
                if !(q0.is_finite() && p0.is_finite()) {
                    return Err(bad("q0", "centre must be finite".into()));
                }
                check_sigma("sigma", *sigma)
            }
            StateSpec::Oscillator { n } => {
                if *n > 64 {
                    return Err(bad("n", format!("must be at most 64, got {n}")));
                }
                Ok(())
            }
            StateSpec::Superposition { components } => {
                if components.is_empty() {
                    return Err(bad("components", "must not be empty".into()));
                }
                for (k, c) in components.iter().enumerate() {
                    let finite = [c.q0, c.p0, c.weight[0], c.weight[1]].iter().all(|v| v.is_finite());
                    if !finite {
                        return Err(bad(&format!("components[{k}]"), "entries must be finite".into()));
                    }
                    check_sigma(&format!("components[{k}].sigma"), c.sigma)?;
                }
                if components.iter().all(|c| c.weight == [0.0, 0.0]) {
                    return Err(bad("components", "all weights are zero".into()));
                }
                Ok(())
            }
            StateSpec::WhiteNoise { amplitude } => {
                if !(*amplitude > 0.0 && amplitude.is_finite()) {
                    return Err(bad("amplitude", format!("must be positive, got {amplitude}")));
                }
                Ok(())
            }
            StateSpec::Field { .. } => Ok(()),
        }
    }

    /// True for states given by a wavefunction.
    pub fn has_wavefunction(&self) -> bool {
        matches!(self, StateSpec::Coherent { .. } | StateSpec::Oscillator { .. } | StateSpec::Superposition { .. })
    }

    fn components(&self) -> Option<Vec<GaussianComponent>> {
        match self {
            StateSpec::Coherent { q0, p0, sigma } => {
                Some(vec![GaussianComponent { q0: *q0, p0: *p0, sigma: *sigma, weight: unit_weight() }])
            }
            StateSpec::Superposition { components } => Some(components.clone()),
            _ => None,
        }
    }

    /// `ψ(x)`, not normalized for superpositions.
    pub fn psi(&self, x: f64, hbar: f64) -> Option<Complex64> {
        match self {
            StateSpec::Oscillator { n } => Some(Complex64::from(hermite_function(*n, x / hbar.sqrt()) * hbar.powf(-0.25))),
            _ => self.components().map(|cs| cs.iter().map(|c| c.psi(x, hbar)).sum()),
        }
    }

    /// The wavefunction sampled on `axis`.
    pub fn wavefunction(&self, axis: &Axis, hbar: f64) -> Option<Vec<Complex64>> {
        axis.nodes().into_iter().map(|x| self.psi(x, hbar)).collect()
    }

    /// The state's Wigner function on `grid`. File states are not handled here.
    pub fn wigner_field(&self, grid: &Grid, hbar: f64, seed: u64) -> Result<WignerField> {
        match self {
            StateSpec::Coherent { q0, p0, sigma } => {
                let s = sigma.unwrap_or((hbar / 2.0).sqrt());
                WignerField::from_fn(*grid, hbar, |q, p| {
                    (-(q - q0).powi(2) / (2.0 * s * s) - 2.0 * s * s * (p - p0).powi(2) / (hbar * hbar)).exp() / (PI * hbar)
                })
            }
            StateSpec::Oscillator { n } => {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                WignerField::from_fn(*grid, hbar, |q, p| {
                    let e = 0.5 * (q * q + p * p);
                    sign * (-2.0 * e / hbar).exp() * laguerre(*n, 4.0 * e / hbar) / (PI * hbar)
                })
            }
            StateSpec::Superposition { components } => superposition_wigner(components, grid, hbar),
            StateSpec::WhiteNoise { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values = (0..grid.len()).map(|_| amplitude * rng.random_range(-1.0..=1.0)).collect();
                WignerField::new(*grid, values, hbar, 0.0)
            }
            StateSpec::Field { .. } => unreachable!("file states are loaded by the runner"),
        }
    }
}

/// `W(q,p) = (1/πħ) ∫ ψ*(q+y) ψ(q−y) e^{2ipy/ħ} dy` by the trapezoid rule on
/// a lattice refining the `q` grid, normalized to unit mass.
fn superposition_wigner(components: &[GaussianComponent], grid: &Grid, hbar: f64) -> Result<WignerField> {
    let sig_min = components.iter().map(|c| c.sigma(hbar)).fold(f64::INFINITY, f64::min);
    let sig_max = components.iter().map(|c| c.sigma(hbar)).fold(0.0, f64::max);
    let p_reach = components.iter().map(|c| c.p0.abs()).fold(0.0, f64::max) + grid.p.max.abs().max(grid.p.min.abs());
    let (q_lo, q_hi) = components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.q0), hi.max(c.q0)));
    // fine enough for both the packet width and the fastest phase
    let h_target = (sig_min / 4.0).min(PI * hbar / (4.0 * (p_reach + hbar / sig_min)));
    let dq = grid.q.step();
    let m = (dq / (2.0 * h_target)).ceil().max(1.0) as usize;
    let h = dq / (2 * m) as f64;
    let reach = 0.5 * (q_hi - q_lo) + 12.0 * sig_max + 0.5 * (grid.q.max - grid.q.min);
    let k_max = (reach / h).ceil() as usize;
    let nq = grid.nq();
    let lattice: Vec<Complex64> = (0..(nq - 1) * 2 * m + 2 * k_max + 1)
        .map(|j| {
            let x = grid.q.min + (j as f64 - k_max as f64) * h;
            components.iter().map(|c| c.psi(x, hbar)).sum()
        })
        .collect();
    let norm: f64 = lattice.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let ps = grid.p.nodes();
    let phases: Vec<Vec<Complex64>> = ps
        .iter()
        .map(|p| (0..=k_max).map(|k| Complex64::from_polar(1.0, 2.0 * p * k as f64 * h / hbar)).collect())
        .collect();
    let mut values = vec![0.0; grid.len()];
    for iq in 0..nq {
        let c = iq * 2 * m + k_max;
        let r: Vec<Complex64> = (0..=k_max).map(|k| lattice[c + k].conj() * lattice[c - k]).collect();
        for (ip, ph) in phases.iter().enumerate() {
            // the integrand at −y is the conjugate of the one at +y
            let mut s = r[0].re;
            for k in 1..=k_max {
                s += 2.0 * (r[k] * ph[k]).re;
            }
            values[grid.index(iq, ip)] = s * h / (PI * hbar * norm);
        }
    }
    WignerField::new(*grid, values, hbar, 0.0)
}
