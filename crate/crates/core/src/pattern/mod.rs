//! Phase-space pattern diagnostics: discrete Wigner transforms, per-scale
//! energy spectra and the localized/chaotic classification.

mod metrics;
mod wigner;

pub use metrics::{
    analyze, analyze_trajectory, scale_energy_spectrum, Classification, PatternReport, Thresholds,
    TrajectoryReport, TrajectorySummary,
};
pub use wigner::{wigner_transform, WignerTransform};
