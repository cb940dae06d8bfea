//! Uniform grids on `[0, 1]`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Samples `values[j] = u(j/(n-1))` with `n ≥ 9` odd.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < 9 || n % 2 == 0 {
            return Err(Error::GridTooCoarse(n));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        Ok(GridFunction { values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(n: usize, f: F) -> Result<Self> {
        if n < 9 || n % 2 == 0 {
            return Err(Error::GridTooCoarse(n));
        }
        let h = 1.0 / (n - 1) as f64;
        GridFunction::new((0..n).map(|j| f(j as f64 * h)).collect())
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        GridFunction::from_fn(n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        GridFunction::from_fn(n, |_| Complex64::new(0.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.n() - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// Composite Simpson rule for `∫₀¹ u`.
    pub fn integrate(&self) -> Complex64 {
        let n = self.n();
        let mut s = self.values[0] + self.values[n - 1];
        for j in 1..n - 1 {
            s += self.values[j] * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * (self.step() / 3.0)
    }

    /// `∫₀^{x_j} u` at every node, fourth order.
    ///
    /// Each cell uses the cubic through four neighbouring nodes; the end
    /// cells use one-sided stencils.
    pub fn cumulative(&self) -> Vec<Complex64> {
        cumulative(&self.values, self.step())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫₀¹ u v̄` by Simpson.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch(self.n(), other.n()));
        }
        let prod: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .collect();
        Ok(GridFunction { values: prod }.integrate())
    }

    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<Complex64> = self
            .values
            .iter()
            .map(|u| Complex64::new(u.norm_sqr(), 0.0))
            .collect();
        GridFunction { values: sq }.integrate().re
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> GridFunction {
        let h = self.step();
        GridFunction {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| f(j as f64 * h, *v))
                .collect(),
        }
    }

    /// `α u + β v`.
    pub fn combine(&self, alpha: Complex64, other: &GridFunction, beta: Complex64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch(self.n(), other.n()));
        }
        Ok(GridFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| alpha * u + beta * v)
                .collect(),
        })
    }

    /// Restriction to every other node.
    pub fn coarsen(&self) -> Result<Self> {
        GridFunction::new(self.values.iter().step_by(2).copied().collect())
    }
}

/// Fourth-order cumulative integral of equispaced samples (`n ≥ 4`).
pub fn cumulative(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let w = h / 24.0;
    for j in 0..n - 1 {
        let cell = if j == 0 {
            9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]
        } else if j == n - 2 {
            v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]
        } else {
            -v[j - 1] + 13.0 * v[j] + 13.0 * v[j + 1] - v[j + 2]
        };
        out[j + 1] = out[j] + cell * w;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(GridFunction::zeros(7), Err(Error::GridTooCoarse(7))));
        assert!(GridFunction::zeros(10).is_err());
        assert!(GridFunction::zeros(9).is_ok());
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let g = GridFunction::from_real_fn(9, |x| x * x * x - 2.0 * x + 1.0).unwrap();
        assert!((g.integrate().re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cumulative_exact_on_cubics() {
        let g = GridFunction::from_real_fn(11, |x| 4.0 * x * x * x + 3.0 * x * x).unwrap();
        for (j, v) in g.cumulative().iter().enumerate() {
            let x = g.x(j);
            assert!((v.re - (x.powi(4) + x.powi(3))).abs() < 1e-14);
        }
    }

    #[test]
    fn cumulative_fourth_order() {
        let err = |n: usize| {
            let g = GridFunction::from_real_fn(n, |x| (3.0 * x).cos()).unwrap();
            g.cumulative()
                .iter()
                .enumerate()
                .map(|(j, v)| (v.re - (3.0 * g.x(j)).sin() / 3.0).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(33) / err(65);
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn norm_and_inner() {
        let g = GridFunction::from_fn(65, |x| Complex64::new(x, 1.0)).unwrap();
        assert!((g.norm_sq() - 4.0 / 3.0).abs() < 1e-14);
        assert!((g.inner(&g).unwrap().re - g.norm_sq()).abs() < 1e-14);
        assert!(g.inner(&GridFunction::zeros(9).unwrap()).is_err());
        assert_eq!(g.coarsen().unwrap().n(), 33);
    }
}
