use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::WignerField;
use crate::wavelet::{dwt2_forward, WaveletBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LocalizedWaveleton,
    Chaotic,
    Intermediate,
}

/// Fixed classification thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub version: u32,
    /// Number of most energetic levels that must hold `energy_fraction`.
    pub top_levels: usize,
    pub energy_fraction: f64,
    /// Largest localization radius, as a fraction of the domain diagonal.
    pub radius_fraction: f64,
    /// Smallest scale entropy, as a fraction of `ln(n_levels)`, counted as chaotic.
    pub entropy_fraction: f64,
    /// Relative variation allowed inside a stability window.
    pub stability_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            version: 1,
            top_levels: 2,
            energy_fraction: 0.8,
            radius_fraction: 0.25,
            entropy_fraction: 0.9,
            stability_tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    /// Shannon entropy of the normalized per-level energy densities.
    pub scale_entropy: f64,
    /// `(Σ ρ_i)² / (n Σ ρ_i²)` over the level energy densities `ρ_i`.
    pub participation_ratio: f64,
    pub negativity_volume: f64,
    /// Root-mean-square distance of `|W|` from its centroid.
    pub localization_radius: f64,
    pub classification: Classification,
    pub time_window: Option<(f64, f64)>,
    /// Raw level energies, approximation first.
    pub level_energies: Vec<f64>,
    /// Share of energy held by the `top_levels` largest levels.
    pub top_level_fraction: f64,
    pub centroid: (f64, f64),
    pub domain_diameter: f64,
    pub time: f64,
    pub thresholds: Thresholds,
}

impl PatternReport {
    pub fn n_levels(&self) -> usize {
        self.level_energies.len()
    }

    /// Class implied by the metrics and thresholds stored in the report.
    pub fn classify(&self) -> Classification {
        let th = &self.thresholds;
        if self.top_level_fraction >= th.energy_fraction
            && self.localization_radius <= th.radius_fraction * self.domain_diameter
        {
            Classification::LocalizedWaveleton
        } else if self.scale_entropy >= th.entropy_fraction * (self.n_levels() as f64).ln() {
            Classification::Chaotic
        } else {
            Classification::Intermediate
        }
    }
}

/// Energies of the 2-D MRA components: approximation at the coarse level
/// first, then each detail level from coarse to fine. They sum to `‖W‖²`.
pub fn scale_energy_spectrum(field: &WignerField, basis: &WaveletBasis, levels: usize) -> Result<Vec<f64>> {
    Ok(level_spectrum(field, basis, levels)?.0)
}

fn level_spectrum(field: &WignerField, basis: &WaveletBasis, levels: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let t = dwt2_forward(&field.values, field.grid.nq(), field.grid.np(), basis, levels)?;
    let area = field.grid.cell_area();
    Ok((t.band_energies().into_iter().map(|e| e * area).collect(), t.band_sizes()))
}

/// Metrics and class of a single field.
pub fn analyze(field: &WignerField, basis: &WaveletBasis, levels: usize, thresholds: &Thresholds) -> Result<PatternReport> {
    if field.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("field", "contains non-finite values"));
    }
    let (energies, sizes) = level_spectrum(field, basis, levels)?;
    let density: Vec<f64> = energies.iter().zip(&sizes).map(|(e, &n)| e / n as f64).collect();
    let total_density: f64 = density.iter().sum();
    let n = density.len() as f64;
    let (scale_entropy, participation_ratio) = if total_density > 0.0 {
        let entropy = density
            .iter()
            .map(|d| d / total_density)
            .filter(|&x| x > 0.0)
            .map(|x| -x * x.ln())
            .sum();
        let sq: f64 = density.iter().map(|d| d * d).sum();
        (entropy, total_density * total_density / (n * sq))
    } else {
        (0.0, 1.0)
    };
    let total: f64 = energies.iter().sum();
    let mut sorted = energies.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top: f64 = sorted.iter().take(thresholds.top_levels).sum();
    let (centroid, radius) = field.centroid_and_radius();
    let mut report = PatternReport {
        scale_entropy,
        participation_ratio,
        negativity_volume: field.negativity_volume(),
        localization_radius: radius,
        classification: Classification::Intermediate,
        time_window: None,
        level_energies: energies,
        top_level_fraction: if total > 0.0 { top / total } else { 0.0 },
        centroid,
        domain_diameter: field.grid.diameter(),
        time: field.time,
        thresholds: *thresholds,
    };
    report.classification = report.classify();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub snapshots: usize,
    /// Longest run of snapshots over which every metric varies by less than
    /// the stability tolerance.
    pub stable_window: Option<(f64, f64)>,
    pub classification_counts: Vec<(Classification, usize)>,
    pub final_classification: Option<Classification>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub reports: Vec<PatternReport>,
    pub summary: TrajectorySummary,
}

fn metrics(r: &PatternReport) -> [f64; 4] {
    [r.scale_entropy, r.participation_ratio, r.negativity_volume, r.localization_radius]
}

fn stable(reports: &[PatternReport], tol: f64) -> bool {
    (0..4).all(|k| {
        let (lo, hi) = reports
            .iter()
            .map(|r| metrics(r)[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo <= tol * lo.abs().max(hi.abs()) + 1e-12
    })
}

/// Per-snapshot reports plus the longest stable window.
pub fn analyze_trajectory(
    frames: &[WignerField],
    basis: &WaveletBasis,
    levels: usize,
    thresholds: &Thresholds,
) -> Result<TrajectoryReport> {
    let mut reports = frames
        .iter()
        .map(|f| analyze(f, basis, levels, thresholds))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    for end in 0..reports.len() {
        while !stable(&reports[start..=end], thresholds.stability_tolerance) {
            start += 1;
        }
        if end > start && best.is_none_or(|(s, e)| end - start > e - s) {
            best = Some((start, end));
        }
    }
    let stable_window = best.map(|(s, e)| (reports[s].time, reports[e].time));
    for r in &mut reports {
        r.time_window = stable_window;
    }
    let mut counts = Vec::new();
    for class in [Classification::LocalizedWaveleton, Classification::Chaotic, Classification::Intermediate] {
        counts.push((class, reports.iter().filter(|r| r.classification == class).count()));
    }
    let summary = TrajectorySummary {
        snapshots: reports.len(),
        stable_window,
        classification_counts: counts,
        final_classification: reports.last().map(|r| r.classification),
    };
    Ok(TrajectoryReport { reports, summary })
}
