use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{propagate, PropagateOptions, Scheme, WignerField};
use crate::error::{Error, Result};
use crate::symbol::Hamiltonian;
use crate::wavelet::{dwt2_forward, dwt2_inverse, mra_components, WaveletBasis};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSeparationOptions {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// The trajectory is sampled at `2^time_levels` uniform times in `[0, t_end)`.
    pub time_levels: usize,
    /// Coarsest temporal level `N`: its approximation is the slow part.
    pub slow_time_level: usize,
    /// Coarsest spatial level `M` of the phase-space MRA.
    pub slow_space_level: usize,
}

/// One temporal detail level of the fast part.
#[derive(Clone, Debug)]
pub struct TemporalLevel {
    pub level: usize,
    /// Angular-frequency band `[2^l, 2^{l+1}] · π / t_end`.
    pub band: (f64, f64),
    /// Peak of the level's power spectrum; `None` when the level carries no energy.
    pub omega: Option<f64>,
    /// `∫∫ |component|² dq dp dt`.
    pub energy: f64,
    /// Component values per sample time, each a full grid.
    pub trajectory: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct ScaleSeparatedSolution {
    pub times: Vec<f64>,
    pub slow_time_level: usize,
    pub slow_space_level: usize,
    /// Temporal approximation at level `N`, per sample.
    pub slow: Vec<Vec<f64>>,
    pub slow_energy: f64,
    pub fast: Vec<TemporalLevel>,
    /// Projection of each sample onto the spatial scaling space of level `M`.
    pub spatial_slow: Vec<Vec<f64>>,
    /// Per sample: 2-D MRA energies, approximation first, then details coarse to fine.
    pub spatial_level_energies: Vec<Vec<f64>>,
    /// `a[i][j]`: root energy in spatial band `i` and temporal band `j` (`j = 0` is slow).
    pub amplitudes: Vec<Vec<f64>>,
    /// `max |slow + Σ fast − W| / max |W|` over all samples.
    pub reconstruction_error: f64,
}

impl ScaleSeparatedSolution {
    /// Fraction of each sample's energy outside the spatial approximation.
    pub fn spatial_detail_fraction(&self) -> Vec<f64> {
        self.spatial_level_energies
            .iter()
            .map(|e| {
                let total: f64 = e.iter().sum();
                if total > 0.0 {
                    1.0 - e[0] / total
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn dominant_frequency(series: &[Vec<f64>], t_end: f64, planner: &mut FftPlanner<f64>) -> Option<f64> {
    let s = series.len();
    let d = series.first()?.len();
    let fft = planner.plan_fft_forward(s);
    let mut power = vec![0.0; s / 2 + 1];
    let mut buf = vec![Complex64::default(); s];
    for i in 0..d {
        for (b, row) in buf.iter_mut().zip(series) {
            *b = Complex64::new(row[i], 0.0);
        }
        fft.process(&mut buf);
        for (p, b) in power.iter_mut().zip(&buf) {
            *p += b.norm_sqr();
        }
    }
    let total: f64 = power.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let m = (0..power.len()).max_by(|&a, &b| power[a].total_cmp(&power[b]))?;
    Some(std::f64::consts::TAU * m as f64 / t_end)
}

/// Propagates `w0` and splits the sampled trajectory into a slow part and
/// temporal detail levels, together with a spatial MRA of every sample.
pub fn scale_separated_solve(
    h: &Hamiltonian,
    basis: &WaveletBasis,
    w0: &WignerField,
    opts: &ScaleSeparationOptions,
) -> Result<ScaleSeparatedSolution> {
    let samples = 1usize << opts.time_levels;
    if opts.slow_time_level >= opts.time_levels {
        return Err(Error::param(
            "slow_time_level",
            format!("must be below time_levels = {}, got {}", opts.time_levels, opts.slow_time_level),
        ));
    }
    let space_levels = w0
        .grid
        .max_levels()
        .checked_sub(opts.slow_space_level)
        .ok_or_else(|| Error::param("slow_space_level", format!("exceeds the grid level {}", w0.grid.max_levels())))?;
    if !(opts.t_end > 0.0) || opts.t_end / opts.dt < samples as f64 {
        return Err(Error::param(
            "t_end",
            format!("too short: need at least {samples} steps of dt = {} for the coarsest time window", opts.dt),
        ));
    }
    let dt_sample = opts.t_end / samples as f64;
    let sub = (dt_sample / opts.dt - 1e-9).ceil() as usize;
    let popts = PropagateOptions::new(opts.t_end, dt_sample / sub as f64, opts.scheme).with_stride(sub);
    let traj = propagate(w0, h, basis, &popts)?;
    let frames: Vec<&Vec<f64>> = traj.frames.iter().take(samples).map(|f| &f.values).collect();
    let d = w0.grid.len();
    let area = w0.grid.cell_area();

    let n_components = opts.time_levels - opts.slow_time_level + 1;
    let mut comps = vec![vec![vec![0.0; d]; samples]; n_components];
    let mut series = vec![0.0; samples];
    for i in 0..d {
        for (s, f) in series.iter_mut().zip(&frames) {
            *s = f[i];
        }
        for (c, values) in mra_components(&series, basis, opts.slow_time_level)?.into_iter().enumerate() {
            for (t, v) in values.into_iter().enumerate() {
                comps[c][t][i] = v;
            }
        }
    }

    let mut reconstruction_error = 0.0f64;
    let scale = frames.iter().flat_map(|f| f.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for t in 0..samples {
        for i in 0..d {
            let sum: f64 = comps.iter().map(|c| c[t][i]).sum();
            reconstruction_error = reconstruction_error.max((sum - frames[t][i]).abs() / scale);
        }
    }

    let energy = |c: &Vec<Vec<f64>>| c.iter().flatten().map(|v| v * v).sum::<f64>() * area * dt_sample;
    let total_energy: f64 = comps.iter().map(energy).sum();
    let mut planner = FftPlanner::new();
    let (nq, np) = (w0.grid.nq(), w0.grid.np());
    let mut amplitudes = vec![vec![0.0; n_components]; space_levels + 1];
    for (j, c) in comps.iter().enumerate() {
        for frame in c {
            let t2 = dwt2_forward(frame, nq, np, basis, space_levels)?;
            for (i, e) in t2.band_energies().into_iter().enumerate() {
                amplitudes[i][j] += e * area * dt_sample;
            }
        }
    }
    amplitudes.iter_mut().flatten().for_each(|a| *a = a.sqrt());

    let mut spatial_slow = Vec::with_capacity(samples);
    let mut spatial_level_energies = Vec::with_capacity(samples);
    for f in &frames {
        let mut t2 = dwt2_forward(f, nq, np, basis, space_levels)?;
        spatial_level_energies.push(t2.band_energies().into_iter().map(|e| e * area).collect());
        let (r, c) = (nq >> space_levels, np >> space_levels);
        for row in 0..nq {
            for col in 0..np {
                if row >= r || col >= c {
                    t2.data[row * np + col] = 0.0;
                }
            }
        }
        spatial_slow.push(dwt2_inverse(&t2, basis));
    }

    let mut comps = comps.into_iter();
    let slow = comps.next().expect("slow component");
    let slow_energy = energy(&slow);
    let unit = std::f64::consts::PI / opts.t_end;
    let fast = comps
        .enumerate()
        .map(|(k, trajectory)| {
            let level = opts.slow_time_level + k;
            let e = energy(&trajectory);
            let omega = if e > 1e-24 * total_energy.max(f64::MIN_POSITIVE) {
                dominant_frequency(&trajectory, opts.t_end, &mut planner)
            } else {
                None
            };
            TemporalLevel {
                level,
                band: ((1u64 << level) as f64 * unit, (2u64 << level) as f64 * unit),
                omega,
                energy: e,
                trajectory,
            }
        })
        .collect();
    Ok(ScaleSeparatedSolution {
        times: (0..samples).map(|k| w0.time + k as f64 * dt_sample).collect(),
        slow_time_level: opts.slow_time_level,
        slow_space_level: opts.slow_space_level,
        slow,
        slow_energy,
        fast,
        spatial_slow,
        spatial_level_energies,
        amplitudes,
        reconstruction_error,
    })
}
