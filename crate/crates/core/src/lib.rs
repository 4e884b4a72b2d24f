//! Wigner functions of polynomial Hamiltonians by multiresolution
//! wavelet-Galerkin methods, and diagnostics that classify the resulting
//! phase-space patterns.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compress;
pub mod error;
pub mod galerkin;
pub mod io;
pub mod linalg;
pub mod pattern;
pub mod symbol;
pub mod wavelet;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/wavelets.md")]
    mod wavelets {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/galerkin.md")]
    mod galerkin {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
