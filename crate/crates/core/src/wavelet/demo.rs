use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Test signals for multiresolution demonstrations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DemoSignal {
    /// A single Gaussian bump centred at `center · length` with standard
    /// deviation `width` samples.
    Kick { center: f64, width: f64, length: usize },
    /// Gaussian bumps of standard deviation `width` samples, one per `period`,
    /// centred at `period/2 + k·period`.
    Multikick { period: usize, width: f64, length: usize },
    /// Partial Riemann–Weierstrass sum `Σ_{n<terms} a^n cos(b^n x)` on `[0, 2π)`.
    RiemannWeierstrass { a: f64, b: f64, terms: usize, length: usize },
}

impl DemoSignal {
    /// Riemann–Weierstrass signal with the default parameters `a = 0.5`, `b = 3`, 12 terms.
    pub fn riemann_weierstrass(length: usize) -> Self {
        DemoSignal::RiemannWeierstrass { a: 0.5, b: 3.0, terms: 12, length }
    }

    pub fn length(&self) -> usize {
        match *self {
            DemoSignal::Kick { length, .. }
            | DemoSignal::Multikick { length, .. }
            | DemoSignal::RiemannWeierstrass { length, .. } => length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length() == 0 {
            return Err(Error::param("length", "must be positive"));
        }
        match *self {
            DemoSignal::Kick { center, width, .. } => {
                if !(0.0..=1.0).contains(&center) {
                    return Err(Error::param("center", format!("must lie in [0, 1], got {center}")));
                }
                check_width(width)
            }
            DemoSignal::Multikick { period, width, length } => {
                if period == 0 || period > length {
                    return Err(Error::param("period", format!("must be in 1..={length}, got {period}")));
                }
                check_width(width)
            }
            DemoSignal::RiemannWeierstrass { a, b, terms, .. } => {
                if !(a > 0.0 && a < 1.0) {
                    return Err(Error::param("a", format!("must lie in (0, 1), got {a}")));
                }
                if !(b >= 1.0 && b.is_finite()) {
                    return Err(Error::param("b", format!("must be at least 1, got {b}")));
                }
                if terms == 0 || terms > 64 {
                    return Err(Error::param("terms", format!("must be in 1..=64, got {terms}")));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let bump = |i: usize, c: f64, w: f64| (-0.5 * ((i as f64 - c) / w).powi(2)).exp();
        Ok(match *self {
            DemoSignal::Kick { center, width, length } => {
                let c = center * length as f64;
                (0..length).map(|i| bump(i, c, width)).collect()
            }
            DemoSignal::Multikick { period, width, length } => {
                let count = length / period;
                (0..length)
                    .map(|i| {
                        (0..count)
                            .map(|k| bump(i, (k * period) as f64 + period as f64 / 2.0, width))
                            .sum()
                    })
                    .collect()
            }
            DemoSignal::RiemannWeierstrass { a, b, terms, length } => (0..length)
                .map(|i| {
                    let x = std::f64::consts::TAU * i as f64 / length as f64;
                    (0..terms)
                        .map(|n| a.powi(n as i32) * (b.powi(n as i32) * x).cos())
                        .sum()
                })
                .collect(),
        })
    }
}

fn check_width(width: f64) -> Result<()> {
    if width > 0.0 && width.is_finite() {
        Ok(())
    } else {
        Err(Error::param("width", format!("must be positive, got {width}")))
    }
}
