//! Moyal star product and brackets on polynomial symbols.
//!
//! The product uses the standard normalization
//!
//! ```text
//! f ⋆ g = f · exp((iħ/2)(∂⃖_q ∂⃗_p − ∂⃖_p ∂⃗_q)) · g
//! ```
//!
//! so that `q ⋆ p − p ⋆ q = iħ`. Some texts write the first-order term as
//! `ħ{f, g}`; that form drops the `i/2` and is only schematic. For polynomial
//! symbols the exponential series stops after `min(deg f, deg g)` orders.

use num_complex::Complex64;

use super::PolySymbol;
use crate::error::{Error, Result};

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `(iħ/2)^n / n!`
pub(crate) fn series_prefactor(n: u32, hbar: f64) -> Complex64 {
    Complex64::new(0.0, hbar / 2.0).powu(n) / factorial(n)
}

/// Order-`n` term of the bidifferential series, without the `(iħ/2)^n/n!` prefactor:
/// `Σ_k C(n,k) (−1)^k (∂_q^{n−k} ∂_p^k f)(∂_q^k ∂_p^{n−k} g)`.
fn bidifferential_order(f: &PolySymbol, g: &PolySymbol, n: u32) -> PolySymbol {
    let mut acc = PolySymbol::zero();
    for k in 0..=n {
        let df = f.derivative(n - k, k);
        if df.is_zero() {
            continue;
        }
        let dg = g.derivative(k, n - k);
        if dg.is_zero() {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += &(&df * &dg).scale(sign * binomial(n, k));
    }
    acc
}

/// The Moyal star product `f ⋆ g`. Exact for polynomials; at `ħ = 0` it is
/// the pointwise product.
pub fn star_product(f: &PolySymbol, g: &PolySymbol, hbar: f64) -> PolySymbol {
    let mut out = f * g;
    if hbar == 0.0 {
        return out;
    }
    let top = f.degree().min(g.degree());
    for n in 1..=top {
        let term = bidifferential_order(f, g, n);
        out += &term.scale(series_prefactor(n, hbar));
    }
    out
}

/// Moyal bracket `(f ⋆ g − g ⋆ f) / (iħ)`.
///
/// Only odd orders of the series survive the antisymmetrization, so this is
/// computed from those directly; the result is exactly antisymmetric.
pub fn moyal_bracket(f: &PolySymbol, g: &PolySymbol, hbar: f64) -> Result<PolySymbol> {
    if hbar == 0.0 {
        return Err(Error::Degenerate {
            name: "hbar",
            reason: "the Moyal bracket divides by iħ; use poisson_bracket for ħ = 0".into(),
        });
    }
    let mut out = PolySymbol::zero();
    let top = f.degree().min(g.degree());
    let i_hbar = Complex64::new(0.0, hbar);
    for n in (1..=top).step_by(2) {
        let term = bidifferential_order(f, g, n);
        out += &term.scale(series_prefactor(n, hbar) * 2.0 / i_hbar);
    }
    Ok(out)
}

/// Poisson bracket `{f, g} = ∂_q f ∂_p g − ∂_p f ∂_q g`.
pub fn poisson_bracket(f: &PolySymbol, g: &PolySymbol) -> PolySymbol {
    &(&f.derivative(1, 0) * &g.derivative(0, 1)) - &(&f.derivative(0, 1) * &g.derivative(1, 0))
}
