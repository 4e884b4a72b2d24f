use serde::{Deserialize, Serialize};

use super::PolySymbol;
use crate::error::{Error, Result};

/// A periodic delta-kick train `symbol · Σ_n δ(t − n·period)`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kick {
    pub period: f64,
    pub symbol: PolySymbol,
}

/// A polynomial Hamiltonian `H(q, p, t) = base(q, p) + Σ kicks`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    base: PolySymbol,
    kicks: Vec<Kick>,
    hbar: f64,
}

impl Hamiltonian {
    pub fn new(base: PolySymbol, hbar: f64) -> Result<Self> {
        Self::with_kicks(base, Vec::new(), hbar)
    }

    pub fn with_kicks(base: PolySymbol, kicks: Vec<Kick>, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::param("hbar", format!("must be positive and finite, got {hbar}")));
        }
        if !base.is_real(0.0) {
            return Err(Error::param("hamiltonian", "coefficients must be real (Hermitian symbol)"));
        }
        for k in &kicks {
            if !(k.period > 0.0 && k.period.is_finite()) {
                return Err(Error::param("kicks.period", format!("must be positive, got {}", k.period)));
            }
            if !k.symbol.is_real(0.0) {
                return Err(Error::param("kicks.symbol", "coefficients must be real"));
            }
        }
        Ok(Self { base, kicks, hbar })
    }

    /// `p²/2 + ω²q²/2`.
    pub fn harmonic(omega: f64, hbar: f64) -> Result<Self> {
        Self::new(
            PolySymbol::from_real_terms(&[(2, 0, 0.5), (0, 2, 0.5 * omega * omega)]),
            hbar,
        )
    }

    pub fn base(&self) -> &PolySymbol {
        &self.base
    }

    pub fn kicks(&self) -> &[Kick] {
        &self.kicks
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_kicked(&self) -> bool {
        !self.kicks.is_empty()
    }
}
