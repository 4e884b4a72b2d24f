//! Sparse storage, a symmetric eigensolver and a Krylov linear solver.

mod eigen;
mod krylov;
mod sparse;

pub use eigen::{lowest_eigenpairs, EigenOptions, EigenPairs};
pub use krylov::{bicgstab_shifted, SolveInfo};
pub use sparse::CsrMatrix;
