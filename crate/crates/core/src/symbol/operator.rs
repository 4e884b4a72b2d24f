use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::star::{binomial, series_prefactor};
use super::PolySymbol;

/// One term `coeff(q, p) · ∂_q^dq ∂_p^dp` of a phase-space differential operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub coeff: PolySymbol,
    pub dq: u32,
    pub dp: u32,
}

/// A finite-order differential operator with polynomial coefficients,
/// `Σ coeff(q,p) ∂_q^dq ∂_p^dp`. Derivatives act first, then the coefficient
/// multiplies. Terms are kept sorted by `(dq, dp)` with one entry per pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceOperator {
    terms: Vec<OperatorTerm>,
}

impl PhaseSpaceOperator {
    fn from_map(map: BTreeMap<(u32, u32), PolySymbol>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((dq, dp), coeff)| OperatorTerm { coeff, dq, dp })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    /// Coefficient of `∂_q^dq ∂_p^dp`, zero if absent.
    pub fn coeff(&self, dq: u32, dp: u32) -> PolySymbol {
        self.terms
            .iter()
            .find(|t| t.dq == dq && t.dp == dp)
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    }

    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.dq + t.dp).max().unwrap_or(0)
    }

    /// Applies the operator to a polynomial symbol exactly.
    pub fn apply(&self, w: &PolySymbol) -> PolySymbol {
        let mut out = PolySymbol::zero();
        for t in &self.terms {
            let dw = w.derivative(t.dq, t.dp);
            if !dw.is_zero() {
                out += &(&t.coeff * &dw);
            }
        }
        out
    }

    /// Operator whose coefficients are the real parts of this one's.
    pub fn real_part(&self) -> Self {
        self.map_coeffs(PolySymbol::real_part)
    }

    /// Operator whose coefficients are the imaginary parts of this one's.
    pub fn imag_part(&self) -> Self {
        self.map_coeffs(PolySymbol::imag_part)
    }

    fn map_coeffs(&self, f: impl Fn(&PolySymbol) -> PolySymbol) -> Self {
        let map = self
            .terms
            .iter()
            .map(|t| ((t.dq, t.dp), f(&t.coeff)))
            .collect();
        Self::from_map(map)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.is_real(tol))
    }
}

/// Accumulates `Σ_n weight(n) Σ_k C(n,k)(−1)^k (∂_q^{n−k}∂_p^k H) ∂_q^k ∂_p^{n−k}`
/// over the orders `n` accepted by `weight`.
fn bopp_expansion(
    h: &PolySymbol,
    mut weight: impl FnMut(u32) -> Option<Complex64>,
) -> PhaseSpaceOperator {
    let mut map: BTreeMap<(u32, u32), PolySymbol> = BTreeMap::new();
    for n in 0..=h.degree() {
        let Some(w) = weight(n) else { continue };
        for k in 0..=n {
            let dh = h.derivative(n - k, k);
            if dh.is_zero() {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = dh.scale(w * sign * binomial(n, k));
            *map.entry((k, n - k)).or_default() += &c;
        }
    }
    PhaseSpaceOperator::from_map(map)
}

/// The differential operator `L` with `L[W] = H ⋆ W`, i.e. `H` evaluated at the
/// Bopp-shifted arguments `q − (ħ/2i)∂_p`, `p + (ħ/2i)∂_q` in Weyl order.
///
/// Even orders give the real part of the operator, odd orders the imaginary
/// part; at `ħ = 0` only multiplication by `H` remains.
pub fn stargen_operator(h: &PolySymbol, hbar: f64) -> PhaseSpaceOperator {
    bopp_expansion(h, |n| {
        if hbar == 0.0 && n > 0 {
            None
        } else {
            Some(series_prefactor(n, hbar))
        }
    })
}

/// The generator `L` of `∂W/∂t = (H ⋆ W − W ⋆ H)/(iħ) = L[W]`.
///
/// Only odd orders contribute and all their weights are real, so `L` maps real
/// symbols to real symbols whenever `H` is real. At `ħ = 0` this is the
/// Liouville operator `W ↦ {H, W}`.
pub fn evolution_operator(h: &PolySymbol, hbar: f64) -> PhaseSpaceOperator {
    bopp_expansion(h, |n| {
        if n % 2 == 0 || (hbar == 0.0 && n > 1) {
            return None;
        }
        // 2 (iħ/2)^n / (n! iħ) = (iħ/2)^(n-1) / n!, real for odd n.
        Some(series_prefactor(n - 1, hbar) / super::star::factorial(n) * super::star::factorial(n - 1))
    })
}
