use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{operator_matrix, WignerField};
use crate::error::{Error, Result};
use crate::linalg::{bicgstab_shifted, CsrMatrix};
use crate::symbol::{evolution_operator, Hamiltonian, Kick, PolySymbol};
use crate::wavelet::WaveletBasis;

/// Largest `dt · ‖L‖_∞` accepted by the RK4 scheme.
pub const RK4_STABILITY_BOUND: f64 = 2.8;
/// Relative norm growth that aborts a run.
pub const MAX_GROWTH: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4,
    #[default]
    ImplicitMidpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagateOptions {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Store every `stride`-th step (the initial and final fields are always kept).
    pub stride: usize,
    /// Target relative residual of each implicit solve.
    pub linear_tol: f64,
    /// A solve that stalls above `linear_tol` is still accepted at or below this.
    pub linear_floor: f64,
}

impl PropagateOptions {
    pub fn new(t_end: f64, dt: f64, scheme: Scheme) -> Self {
        PropagateOptions { t_end, dt, scheme, stride: 1, linear_tol: 1e-13, linear_floor: 1e-8 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub frames: Vec<WignerField>,
    pub steps: usize,
    /// Step actually used (`t_end / steps`).
    pub dt: f64,
    /// Largest `|mass(t) − mass(0)|` over all steps.
    pub max_mass_drift: f64,
    /// Largest relative residual of the implicit solves (zero for RK4).
    pub max_linear_residual: f64,
    pub kicks_applied: usize,
}

impl Trajectory {
    pub fn last(&self) -> &WignerField {
        self.frames.last().expect("trajectory has frames")
    }
}

/// Exact or sub-stepped map for one kick `W ↦ exp(L_K) W`.
enum KickMap {
    /// `K(q)` only: multiply by `exp(−i(K(q+y) − K(q−y))/ħ)` in the variable conjugate to `p`.
    Position(Vec<Vec<Complex64>>),
    Flow { op: CsrMatrix, substeps: usize },
}

fn kick_map(kick: &Kick, basis: &WaveletBasis, field: &WignerField) -> Result<KickMap> {
    let grid = field.grid;
    let hbar = field.hbar;
    let k = &kick.symbol;
    if k.degree_in_p() == 0 {
        let np = grid.np();
        let period = grid.p.max - grid.p.min;
        let phases = (0..grid.nq())
            .map(|iq| {
                let q = grid.q.node(iq);
                (0..np)
                    .map(|m| {
                        let signed = if m < np / 2 { m as f64 } else { m as f64 - np as f64 };
                        // forward FFT bin m pairs with offset y = −πħ m / P
                        let y = -std::f64::consts::PI * hbar * signed / period;
                        let dk = k.eval_real(q + y, 0.0) - k.eval_real(q - y, 0.0);
                        Complex64::from_polar(1.0, -dk / hbar)
                    })
                    .collect()
            })
            .collect();
        Ok(KickMap::Position(phases))
    } else {
        let op = operator_matrix(&evolution_operator(k, hbar), basis, &grid)?;
        let substeps = (op.norm_inf() / 2.0).ceil().max(1.0) as usize;
        Ok(KickMap::Flow { op, substeps })
    }
}

fn apply_kick(map: &KickMap, w: &mut [f64], np: usize, planner: &mut FftPlanner<f64>) {
    match map {
        KickMap::Position(phases) => {
            let fwd = planner.plan_fft_forward(np);
            let inv = planner.plan_fft_inverse(np);
            let mut buf = vec![Complex64::default(); np];
            for (row, ph) in w.chunks_mut(np).zip(phases) {
                for (b, v) in buf.iter_mut().zip(row.iter()) {
                    *b = Complex64::new(*v, 0.0);
                }
                fwd.process(&mut buf);
                for (b, f) in buf.iter_mut().zip(ph) {
                    *b *= f;
                }
                inv.process(&mut buf);
                for (v, b) in row.iter_mut().zip(&buf) {
                    *v = b.re / np as f64;
                }
            }
        }
        KickMap::Flow { op, substeps } => {
            let h = 1.0 / *substeps as f64;
            for _ in 0..*substeps {
                rk4_step(op, w, h);
            }
        }
    }
}

fn rk4_step(l: &CsrMatrix, w: &mut [f64], dt: f64) {
    let n = w.len();
    let k1 = l.mul_vec(w);
    let tmp: Vec<f64> = (0..n).map(|i| w[i] + 0.5 * dt * k1[i]).collect();
    let k2 = l.mul_vec(&tmp);
    let tmp: Vec<f64> = (0..n).map(|i| w[i] + 0.5 * dt * k2[i]).collect();
    let k3 = l.mul_vec(&tmp);
    let tmp: Vec<f64> = (0..n).map(|i| w[i] + dt * k3[i]).collect();
    let k4 = l.mul_vec(&tmp);
    for i in 0..n {
        w[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrates `∂W/∂t = (H ⋆ W − W ⋆ H)/(iħ)` by the method of lines.
///
/// Kicks of period `T` act at `t = T, 2T, …` as instantaneous maps, applied at
/// the first step boundary not earlier than the kick time.
pub fn propagate(w0: &WignerField, h: &Hamiltonian, basis: &WaveletBasis, opts: &PropagateOptions) -> Result<Trajectory> {
    if (h.hbar() - w0.hbar).abs() > 1e-12 * h.hbar() {
        return Err(Error::param("hbar", format!("field has ħ = {}, Hamiltonian has ħ = {}", w0.hbar, h.hbar())));
    }
    if !(opts.t_end >= 0.0 && opts.t_end.is_finite()) {
        return Err(Error::param("t_end", format!("must be nonnegative, got {}", opts.t_end)));
    }
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {}", opts.dt)));
    }
    if opts.stride == 0 {
        return Err(Error::param("stride", "must be at least 1"));
    }
    let steps = (opts.t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { opts.t_end / steps as f64 };
    let l = operator_matrix(&evolution_operator(h.base(), h.hbar()), basis, &w0.grid)?;
    if opts.scheme == Scheme::Rk4 && dt * l.norm_inf() > RK4_STABILITY_BOUND {
        return Err(Error::param(
            "dt",
            format!(
                "rk4 needs dt·‖L‖ ≤ {RK4_STABILITY_BOUND}; dt = {dt:.3e} gives {:.3}",
                dt * l.norm_inf()
            ),
        ));
    }
    let kicks: Vec<(f64, KickMap)> = h
        .kicks()
        .iter()
        .map(|k| Ok((k.period, kick_map(k, basis, w0)?)))
        .collect::<Result<_>>()?;
    let mut planner = FftPlanner::new();

    let np = w0.grid.np();
    let area = w0.grid.cell_area();
    let mut w = w0.values.clone();
    let norm0 = l2(&w).max(f64::MIN_POSITIVE);
    let mass0 = w.iter().sum::<f64>() * area;
    let mut traj = Trajectory {
        frames: vec![w0.clone()],
        steps,
        dt,
        max_mass_drift: 0.0,
        max_linear_residual: 0.0,
        kicks_applied: 0,
    };
    let mut next_kick: Vec<usize> = vec![1; kicks.len()];
    let mut rhs = vec![0.0; w.len()];
    for step in 1..=steps {
        let t = step as f64 * dt;
        match opts.scheme {
            Scheme::Rk4 => rk4_step(&l, &mut w, dt),
            Scheme::ImplicitMidpoint => {
                l.mul_vec_into(&w, &mut rhs);
                for (r, wi) in rhs.iter_mut().zip(&w) {
                    *r = wi + 0.5 * dt * *r;
                }
                let info = bicgstab_shifted(&l, 1.0, -0.5 * dt, &rhs, &mut w, opts.linear_tol, 1000);
                if !info.converged && !(info.relative_residual <= opts.linear_floor) {
                    return Err(Error::LinearSolve { step, residual: info.relative_residual });
                }
                traj.max_linear_residual = traj.max_linear_residual.max(info.relative_residual);
            }
        }
        for ((period, map), n) in kicks.iter().zip(next_kick.iter_mut()) {
            while *n as f64 * period <= t + 1e-9 * dt {
                apply_kick(map, &mut w, np, &mut planner);
                traj.kicks_applied += 1;
                *n += 1;
            }
        }
        let growth = l2(&w) / norm0;
        if !growth.is_finite() || growth > MAX_GROWTH {
            return Err(Error::Instability { time: t, growth });
        }
        let mass = w.iter().sum::<f64>() * area;
        traj.max_mass_drift = traj.max_mass_drift.max((mass - mass0).abs());
        if step % opts.stride == 0 || step == steps {
            traj.frames.push(WignerField { grid: w0.grid, values: w.clone(), hbar: w0.hbar, time: w0.time + t });
        }
    }
    Ok(traj)
}

/// Convenience: a position kick `κ q²` with the given period.
pub fn quadratic_kick(kappa: f64, period: f64) -> Kick {
    Kick { period, symbol: PolySymbol::from_real_terms(&[(0, 2, kappa)]) }
}
