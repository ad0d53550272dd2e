//! Natural cubic spline on a uniform grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct UniformSpline {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    // Second derivatives at the knots.
    curvature: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) || !x0.is_finite() {
            return Err(Error::argument("spline needs ≥ 2 values and a positive step"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("spline values must be finite"));
        }
        let n = values.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for m[i-1] + 4 m[i] + m[i+1] = 6 Δ²y / h², natural ends.
            let inner = n - 2;
            let mut diag = vec![4.0; inner];
            let mut rhs: Vec<f64> = (1..n - 1)
                .map(|i| 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (step * step))
                .collect();
            for i in 1..inner {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            m[inner] = rhs[inner - 1] / diag[inner - 1];
            for i in (0..inner - 1).rev() {
                m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
            }
        }
        Ok(UniformSpline { x0, step, values, curvature: m })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.x0 + self.step * i as f64
    }

    /// Spline value at `x`; constant continuation of the end values outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x - self.x0) / self.step;
        if !(s > 0.0) {
            return self.values[0];
        }
        if s >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let i = (s.floor() as usize).min(n - 2);
        let b = s - i as f64;
        let a = 1.0 - b;
        let h2 = self.step * self.step / 6.0;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.curvature[i] + (b * b * b - b) * self.curvature[i + 1]) * h2
    }
}
