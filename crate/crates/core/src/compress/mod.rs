//! Wavelet-basis representations of phase-space operators: connection
//! coefficients, 1-D operator assembly and the nonstandard form.

mod assemble;
mod connection;
mod nonstandard;

pub use assemble::{
    assemble_1d_operator, assemble_1d_sparse, derivative_matrix, derivative_stencil, multiplication_matrix, Axis,
    OperatorKind,
};
pub use connection::{connection_coefficients, ConnectionTable};
pub use nonstandard::{to_nonstandard_form, CompressionStats, LevelBlocks, OperatorBlockMatrix};
