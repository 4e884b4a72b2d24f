//! Wavelet-Galerkin discretization of the stationary and time-dependent
//! Wigner equations on a periodic phase-space grid.
//!
//! Field values at the grid nodes serve as scaling-function coefficients:
//! derivatives act through connection-coefficient stencils and polynomial
//! coefficients act diagonally.

mod assemble;
mod evolve;
mod field;
mod scale;
mod stationary;

pub use assemble::operator_matrix;
pub use evolve::{propagate, quadratic_kick, PropagateOptions, Scheme, Trajectory, MAX_GROWTH, RK4_STABILITY_BOUND};
pub use field::{Grid, WignerField};
pub use scale::{scale_separated_solve, ScaleSeparatedSolution, ScaleSeparationOptions, TemporalLevel};
pub use stationary::{
    assemble_stationary, solve_stationary, StationaryOperators, StationaryOptions, StationaryResult,
};
