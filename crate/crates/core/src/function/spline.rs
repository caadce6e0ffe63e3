use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Headroom applied to the spline slope bound.
pub const SPLINE_LIPSCHITZ_SAFETY: f64 = 1.05;

/// Periodic C² cubic interpolant through `M` uniform samples `y_j = f(2πj/M)`.
///
/// Stored as knot values plus knot second derivatives ("moments"); on each
/// cell the interpolant is the usual moment-form cubic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSpline {
    values: Vec<f64>,
    moments: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InvalidFunction(format!(
                "a periodic spline needs at least 4 samples, got {}",
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("sample {j} is not finite")));
        }
        let moments = periodic_moments(&values);
        Ok(PeriodicSpline { values, moments })
    }

    pub fn knots(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    fn locate(&self, theta: f64) -> (usize, f64) {
        let m = self.values.len();
        let h = self.step();
        let u = theta / h;
        let i = (u.floor() as usize).min(m - 1);
        (i, theta - i as f64 * h)
    }

    /// Value, first and second derivative at `theta` (already reduced).
    pub(crate) fn jet(&self, theta: f64) -> [f64; 3] {
        let m = self.values.len();
        let h = self.step();
        let (i, t) = self.locate(theta);
        let j = (i + 1) % m;
        let (yi, yj) = (self.values[i], self.values[j]);
        let (mi, mj) = (self.moments[i], self.moments[j]);
        let s = h - t;
        let ci = yi / h - mi * h / 6.0;
        let cj = yj / h - mj * h / 6.0;
        let value = mi * s * s * s / (6.0 * h) + mj * t * t * t / (6.0 * h) + ci * s + cj * t;
        let d1 = -mi * s * s / (2.0 * h) + mj * t * t / (2.0 * h) - ci + cj;
        let d2 = (mi * s + mj * t) / h;
        [value, d1, d2]
    }

    /// `sup |f'|` computed cell by cell (the slope is quadratic on each
    /// cell), times [`SPLINE_LIPSCHITZ_SAFETY`].
    pub fn lipschitz_bound(&self) -> f64 {
        let m = self.values.len();
        let h = self.step();
        let mut best: f64 = 0.0;
        for i in 0..m {
            let j = (i + 1) % m;
            let slope = |t: f64| {
                let s = h - t;
                let ci = self.values[i] / h - self.moments[i] * h / 6.0;
                let cj = self.values[j] / h - self.moments[j] * h / 6.0;
                -self.moments[i] * s * s / (2.0 * h) + self.moments[j] * t * t / (2.0 * h) - ci + cj
            };
            best = best.max(slope(0.0).abs()).max(slope(h).abs());
            let dm = self.moments[i] - self.moments[j];
            if dm != 0.0 {
                let t = h * self.moments[i] / dm;
                if t > 0.0 && t < h {
                    best = best.max(slope(t).abs());
                }
            }
        }
        best * SPLINE_LIPSCHITZ_SAFETY
    }

    pub fn scaled(&self, factor: f64) -> PeriodicSpline {
        PeriodicSpline {
            values: self.values.iter().map(|v| v * factor).collect(),
            moments: self.moments.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Solves `M_{i-1} + 4 M_i + M_{i+1} = 6/h² (y_{i+1} - 2 y_i + y_{i-1})`
/// cyclically, via the Sherman–Morrison reduction to two tridiagonal solves.
fn periodic_moments(y: &[f64]) -> Vec<f64> {
    let m = y.len();
    let h = TAU / m as f64;
    let rhs: Vec<f64> = (0..m)
        .map(|i| {
            let prev = y[(i + m - 1) % m];
            let next = y[(i + 1) % m];
            6.0 / (h * h) * (next - 2.0 * y[i] + prev)
        })
        .collect();

    // Cyclic system with sub = super = 1, diag = 4, corners = 1.
    let gamma = -4.0;
    let mut diag = vec![4.0; m];
    diag[0] -= gamma;
    diag[m - 1] -= 1.0 / gamma;
    let x = solve_tridiagonal(&diag, &rhs);
    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = 1.0;
    let z = solve_tridiagonal(&diag, &u);
    let factor = (x[0] + x[m - 1] / gamma) / (1.0 + z[0] + z[m - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

/// Thomas algorithm with unit off-diagonals.
fn solve_tridiagonal(diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let denom = diag[i] - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs[i] - d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(m: usize, f: impl Fn(f64) -> f64) -> PeriodicSpline {
        PeriodicSpline::new((0..m).map(|j| f(TAU * j as f64 / m as f64)).collect()).unwrap()
    }

    #[test]
    fn interpolates_knots() {
        let s = sampled(16, |t| t.sin() + 0.3 * (3.0 * t).cos());
        for (j, y) in s.values().iter().enumerate() {
            let t = TAU * j as f64 / 16.0;
            assert!((s.jet(t)[0] - y).abs() < 1e-13);
        }
    }

    #[test]
    fn moments_satisfy_cyclic_system() {
        let s = sampled(9, |t| (2.0 * t).sin().exp());
        let m = s.knots();
        let h = TAU / m as f64;
        for i in 0..m {
            let (p, n) = ((i + m - 1) % m, (i + 1) % m);
            let lhs = s.moments[p] + 4.0 * s.moments[i] + s.moments[n];
            let rhs = 6.0 / (h * h) * (s.values[n] - 2.0 * s.values[i] + s.values[p]);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn second_derivative_is_continuous_across_knots() {
        let s = sampled(12, |t| t.cos() - 0.2 * (2.0 * t).sin());
        let h = TAU / 12.0;
        for j in 1..12 {
            let t = j as f64 * h;
            let left = s.jet(t - 1e-12);
            let right = s.jet(t + 1e-12);
            assert!((left[1] - right[1]).abs() < 1e-9);
            assert!((left[2] - right[2]).abs() < 1e-9);
        }
    }

    #[test]
    fn converges_to_smooth_function() {
        let s = sampled(256, |t| t.sin());
        for i in 0..100 {
            let t = i as f64 * 0.0627;
            let [v, d1, d2] = s.jet(t);
            assert!((v - t.sin()).abs() < 1e-8);
            assert!((d1 - t.cos()).abs() < 1e-5);
            assert!((d2 + t.sin()).abs() < 1e-3);
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(PeriodicSpline::new(vec![1.0, 2.0, 3.0]).is_err());
    }
}
