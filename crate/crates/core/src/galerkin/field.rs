use serde::{Deserialize, Serialize};

use crate::compress::Axis;
use crate::error::{Error, Result};

/// Periodic phase-space grid. Values are stored row-major with `q` outer:
/// index `iq · Np + ip`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub q: Axis,
    pub p: Axis,
}

fn check_dyadic(name: &'static str, n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::param(name, format!("must be a power of two and at least 4, got {n}")));
    }
    Ok(())
}

impl Grid {
    pub fn new(q: (f64, f64), p: (f64, f64), points: (usize, usize)) -> Result<Self> {
        check_dyadic("grid.points[0]", points.0)?;
        check_dyadic("grid.points[1]", points.1)?;
        Ok(Grid { q: Axis::new(q.0, q.1, points.0)?, p: Axis::new(p.0, p.1, points.1)? })
    }

    /// Square grid `[−half, half)²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new((-half, half), (-half, half), (n, n))
    }

    pub fn nq(&self) -> usize {
        self.q.points
    }

    pub fn np(&self) -> usize {
        self.p.points
    }

    pub fn len(&self) -> usize {
        self.nq() * self.np()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.q.step() * self.p.step()
    }

    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.np() + ip
    }

    /// Largest level count both axes can be halved by.
    pub fn max_levels(&self) -> usize {
        self.q.level().min(self.p.level())
    }

    pub fn diameter(&self) -> f64 {
        (self.q.max - self.q.min).hypot(self.p.max - self.p.min)
    }
}

/// A real phase-space function sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WignerField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub hbar: f64,
    pub time: f64,
}

impl WignerField {
    pub fn new(grid: Grid, values: Vec<f64>, hbar: f64, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "field contains non-finite entries"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::param("hbar", format!("must be positive and finite, got {hbar}")));
        }
        Ok(WignerField { grid, values, hbar, time })
    }

    pub fn from_fn(grid: Grid, hbar: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for iq in 0..grid.nq() {
            let q = grid.q.node(iq);
            for ip in 0..grid.np() {
                values.push(f(q, grid.p.node(ip)));
            }
        }
        Self::new(grid, values, hbar, 0.0)
    }

    pub fn get(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.grid.index(iq, ip)]
    }

    /// `Σ W Δq Δp`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// `(Σ W² Δq Δp)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Scales to unit mass.
    pub fn normalize(&mut self) -> Result<()> {
        let m = self.mass();
        if m.abs() < 1e-300 || !m.is_finite() {
            return Err(Error::Degenerate { name: "field", reason: "zero mass cannot be normalized".into() });
        }
        self.values.iter_mut().for_each(|v| *v /= m);
        Ok(())
    }

    /// `∫ (|W| − W)/2 dq dp`.
    pub fn negativity_volume(&self) -> f64 {
        self.values.iter().map(|v| (v.abs() - v) / 2.0).sum::<f64>() * self.grid.cell_area()
    }

    /// `∫ W dp` at each `q` node.
    pub fn q_marginal(&self) -> Vec<f64> {
        let dp = self.grid.p.step();
        self.values.chunks(self.grid.np()).map(|row| row.iter().sum::<f64>() * dp).collect()
    }

    /// `∫ W dq` at each `p` node.
    pub fn p_marginal(&self) -> Vec<f64> {
        let dq = self.grid.q.step();
        let mut out = vec![0.0; self.grid.np()];
        for row in self.values.chunks(self.grid.np()) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * dq;
            }
        }
        out
    }

    /// Relative L2 distance `‖self − other‖/‖other‖` on a common grid.
    pub fn relative_l2_error(&self, other: &WignerField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::param("grid", "fields live on different grids"));
        }
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = other.values.iter().map(|b| b * b).sum();
        Ok((num / den.max(f64::MIN_POSITIVE)).sqrt())
    }

    /// Centroid of `|W|` and the root-mean-square distance from it.
    pub fn centroid_and_radius(&self) -> ((f64, f64), f64) {
        let mut w = 0.0;
        let (mut mq, mut mp) = (0.0, 0.0);
        for iq in 0..self.grid.nq() {
            let q = self.grid.q.node(iq);
            for ip in 0..self.grid.np() {
                let a = self.get(iq, ip).abs();
                w += a;
                mq += a * q;
                mp += a * self.grid.p.node(ip);
            }
        }
        if w == 0.0 {
            return ((0.0, 0.0), 0.0);
        }
        let (cq, cp) = (mq / w, mp / w);
        let mut m2 = 0.0;
        for iq in 0..self.grid.nq() {
            let dq = self.grid.q.node(iq) - cq;
            for ip in 0..self.grid.np() {
                let dp = self.grid.p.node(ip) - cp;
                m2 += self.get(iq, ip).abs() * (dq * dq + dp * dp);
            }
        }
        ((cq, cp), (m2 / w).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert!(Grid::new((-1.0, 1.0), (-1.0, 1.0), (100, 64)).is_err());
        assert!(Grid::new((1.0, -1.0), (-1.0, 1.0), (64, 64)).is_err());
        let g = Grid::square(8.0, 64).unwrap();
        assert_eq!(g.q.step(), 0.25);
        assert_eq!(g.index(2, 3), 131);
    }

    #[test]
    fn gaussian_mass_and_marginals() {
        let g = Grid::square(6.0, 64).unwrap();
        let mut w = WignerField::from_fn(g, 1.0, |q, p| (-(q * q + p * p)).exp() / PI).unwrap();
        assert!((w.mass() - 1.0).abs() < 1e-10);
        w.values.iter_mut().for_each(|v| *v *= 3.0);
        w.normalize().unwrap();
        assert!((w.mass() - 1.0).abs() < 1e-12);
        assert_eq!(w.negativity_volume(), 0.0);
        let mq = w.q_marginal();
        let expected = (-(g.q.node(32)).powi(2)).exp() / PI.sqrt();
        assert!((mq[32] - expected).abs() < 1e-10);
        let ((cq, cp), r) = w.centroid_and_radius();
        assert!(cq.abs() < 1e-10 && cp.abs() < 1e-10 && (r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_values() {
        let g = Grid::square(1.0, 4).unwrap();
        assert!(WignerField::new(g, vec![0.0; 15], 1.0, 0.0).is_err());
        assert!(WignerField::new(g, vec![f64::NAN; 16], 1.0, 0.0).is_err());
        let mut z = WignerField::new(g, vec![0.0; 16], 1.0, 0.0).unwrap();
        assert!(z.normalize().is_err());
    }
}
