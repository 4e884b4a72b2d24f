//! Reference computations shared by the integration tests. None of them reuse
//! the library algorithm they check.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigneton::symbol::PolySymbol;
use wigneton::wavelet::{cascade_evaluate, WaveletBasis};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real polynomial of total degree `≤ degree` with coefficients in `[−1, 1]`.
pub fn random_poly(rng: &mut ChaCha8Rng, degree: u32) -> PolySymbol {
    let mut out = PolySymbol::zero();
    for i in 0..=degree {
        for j in 0..=degree - i {
            if rng.random_bool(0.6) {
                out.add_term(i, j, Complex64::from(rng.random_range(-1.0..1.0)));
            }
        }
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `exp(c ∂_q ∂_p) f`, a finite sum for polynomials.
fn exp_mixed(f: &PolySymbol, c: Complex64) -> PolySymbol {
    let mut out = PolySymbol::zero();
    for k in 0..=f.degree() {
        let d = f.derivative(k, k);
        if !d.is_zero() {
            out += &d.scale(c.powu(k) / factorial(k));
        }
    }
    out
}

/// Composition of q-left ordered symbols: `a ∘ b = Σ_k (−iħ)^k/k! ∂_p^k a ∂_q^k b`.
fn standard_product(a: &PolySymbol, b: &PolySymbol, hbar: f64) -> PolySymbol {
    let mut out = PolySymbol::zero();
    for k in 0..=a.degree_in_p().min(b.degree_in_q()) {
        let c = Complex64::new(0.0, -hbar).powu(k) / factorial(k);
        out += &(&a.derivative(0, k) * &b.derivative(k, 0)).scale(c);
    }
    out
}

/// Weyl-symbol product computed through operator ordering: convert both
/// symbols to q-left order with `exp(−(iħ/2)∂_q∂_p)`, compose the operators
/// and convert back.
pub fn star_by_ordering(f: &PolySymbol, g: &PolySymbol, hbar: f64) -> PolySymbol {
    let to_std = Complex64::new(0.0, -hbar / 2.0);
    let product = standard_product(&exp_mixed(f, to_std), &exp_mixed(g, to_std), hbar);
    exp_mixed(&product, -to_std)
}

pub fn max_coeff(f: &PolySymbol) -> f64 {
    f.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let b2 = if i == 0 { 0.0 } else { off * off };
        d = a - x - b2 / d;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenvalues of `−(ħ²/2) d²/dx² + V` on `[−half, half]` with
/// Dirichlet ends, 3-point differences on `intervals` cells, by bisection.
pub fn schrodinger_levels(v: impl Fn(f64) -> f64, half: f64, intervals: usize, hbar: f64, count: usize) -> Vec<f64> {
    let h = 2.0 * half / intervals as f64;
    let kin = hbar * hbar / (2.0 * h * h);
    let diag: Vec<f64> = (1..intervals).map(|i| 2.0 * kin + v(-half + i as f64 * h)).collect();
    let off = -kin;
    let lo0 = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * kin;
    let hi0 = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0 * kin;
    (0..count)
        .map(|k| {
            let (mut lo, mut hi) = (lo0, hi0);
            while hi - lo > 1e-13 * (1.0 + hi.abs()) {
                let mid = 0.5 * (lo + hi);
                if sturm_count(&diag, off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Richardson extrapolation of the second-order levels on `intervals` and
/// `intervals / 2` cells.
pub fn schrodinger_levels_extrapolated(v: impl Fn(f64) -> f64 + Copy, half: f64, intervals: usize, hbar: f64, count: usize) -> Vec<f64> {
    let fine = schrodinger_levels(v, half, intervals, hbar, count);
    let coarse = schrodinger_levels(v, half, intervals / 2, hbar, count);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}

/// Connection coefficients `Λ^{0,d}_l` (d = 1, 2) from the cascade samples of
/// `φ`: the autocorrelation `a(t) = ∫ φ(x) φ(x + t) dx` is summed on the
/// dyadic grid and differentiated by central differences, since `Λ^{0,d}_l = a^{(d)}(l)`.
pub fn connection_by_quadrature(basis: &WaveletBasis, d: usize, level: usize) -> Vec<(i64, f64)> {
    let s = cascade_evaluate(basis, level).unwrap();
    let phi = &s.phi;
    let n = phi.len() as i64;
    let h = s.step();
    let a = |shift: i64| -> f64 {
        let lo = 0.max(-shift);
        let hi = n.min(n - shift);
        (lo..hi).map(|i| phi[i as usize] * phi[(i + shift) as usize]).sum::<f64>() * h
    };
    let per = 1i64 << level;
    let span = basis.genus() as i64 - 1;
    (-span + 1..span)
        .map(|l| {
            let c = l * per;
            let v = match d {
                1 => (a(c + 1) - a(c - 1)) / (2.0 * h),
                2 => (a(c + 1) - 2.0 * a(c) + a(c - 1)) / (h * h),
                _ => unimplemented!("orders 1 and 2 only"),
            };
            (l, v)
        })
        .collect()
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
