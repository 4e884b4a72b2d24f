use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// Exponent pair of a monomial `p^i q^j`: `i` is the power of `p`, `j` the power of `q`.
pub type Exponents = (u32, u32);

/// A polynomial in the phase-space coordinates with complex coefficients.
///
/// Terms are keyed by `(i, j)` for the monomial `p^i q^j`. The stored map is
/// canonical: an entry with a coefficient that is exactly zero is never kept,
/// so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolySymbol {
    terms: BTreeMap<Exponents, Complex64>,
}

impl PolySymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(0, 0, c)
    }

    /// The coordinate `q`.
    pub fn q() -> Self {
        Self::monomial(0, 1, 1.0)
    }

    /// The momentum `p`.
    pub fn p() -> Self {
        Self::monomial(1, 0, 1.0)
    }

    /// `coeff · p^i q^j`.
    pub fn monomial(i: u32, j: u32, coeff: impl Into<Complex64>) -> Self {
        let mut s = Self::zero();
        s.add_term(i, j, coeff.into());
        s
    }

    /// Builds a real symbol from `(i, j, coeff)` triples; repeated exponents add up.
    pub fn from_real_terms(terms: &[(u32, u32, f64)]) -> Self {
        let mut s = Self::zero();
        for &(i, j, c) in terms {
            s.add_term(i, j, Complex64::new(c, 0.0));
        }
        s
    }

    pub fn add_term(&mut self, i: u32, j: u32, coeff: Complex64) {
        let slot = self.terms.entry((i, j)).or_insert(Complex64::new(0.0, 0.0));
        *slot += coeff;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.terms
            .get(&(i, j))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, Complex64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `max(i + j)`; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_in_p(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn degree_in_q(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// True when every imaginary part is at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn real_part(&self) -> Self {
        self.map_coeffs(|c| Complex64::new(c.re, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.map_coeffs(|c| Complex64::new(c.im, 0.0))
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        self.map_coeffs(|c| c * s)
    }

    fn map_coeffs(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            out.add_term(i, j, f(c));
        }
        out
    }

    /// Mixed partial derivative `∂_q^dq ∂_p^dp`.
    pub fn derivative(&self, dq: u32, dp: u32) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            if i < dp || j < dq {
                continue;
            }
            let factor = falling(i, dp) * falling(j, dq);
            out.add_term(i - dp, j - dq, c * factor);
        }
        out
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * p.powi(i as i32) * q.powi(j as i32))
            .sum()
    }

    /// Evaluates the real part; intended for symbols already known to be real.
    pub fn eval_real(&self, q: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c.re * p.powi(i as i32) * q.powi(j as i32))
            .sum()
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Drops coefficients whose magnitude is at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            let re = if c.re.abs() <= tol { 0.0 } else { c.re };
            let im = if c.im.abs() <= tol { 0.0 } else { c.im };
            out.add_term(i, j, Complex64::new(re, im));
        }
        out
    }
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|t| (n - t) as f64).product()
}

impl<'a> Add<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add<&PolySymbol> for PolySymbol {
    type Output = PolySymbol;
    fn add(mut self, rhs: &PolySymbol) -> PolySymbol {
        self += rhs;
        self
    }
}

impl AddAssign<&PolySymbol> for PolySymbol {
    fn add_assign(&mut self, rhs: &PolySymbol) {
        for (&(i, j), &c) in &rhs.terms {
            self.add_term(i, j, c);
        }
    }
}

impl<'a> Sub<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        let mut out = self.clone();
        for (&(i, j), &c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        self.scale(-1.0)
    }
}

/// Pointwise (commutative) product.
impl<'a> Mul<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;
    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        let mut out = PolySymbol::zero();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            match i {
                0 => {}
                1 => write!(f, "·p")?,
                _ => write!(f, "·p^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "·q")?,
                _ => write!(f, "·q^{j}")?,
            }
        }
        Ok(())
    }
}

// Wire format: `[[i, j, re, im], ...]` sorted by `(i, j)`.
impl Serialize for PolySymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&(i, j), c) in &self.terms {
            seq.serialize_element(&(i, j, c.re, c.im))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for PolySymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TermsVisitor;

        impl<'de> Visitor<'de> for TermsVisitor {
            type Value = PolySymbol;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of [i, j, re, im] entries")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<PolySymbol, A::Error> {
                let mut out = PolySymbol::zero();
                while let Some((i, j, re, im)) = seq.next_element::<(u32, u32, f64, f64)>()? {
                    if !re.is_finite() || !im.is_finite() {
                        return Err(de::Error::custom(format!(
                            "non-finite coefficient at ({i}, {j})"
                        )));
                    }
                    if out.terms.contains_key(&(i, j)) {
                        return Err(de::Error::custom(format!("duplicate term ({i}, {j})")));
                    }
                    out.add_term(i, j, Complex64::new(re, im));
                }
                Ok(out)
            }
        }

        deserializer.deserialize_seq(TermsVisitor)
    }
}
